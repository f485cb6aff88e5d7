#pragma once

#include "coarseforge/hhs.hpp"

namespace coarseforge {

/// Named desk-scale spaces used by the CLI and the invariant suites.
/// z1: Z window [-64,64]; z2: Z^2 (l-inf) window [-8,8]^2; ray: [0,256];
/// two_clusters: two far components; path_graph / star_tree: combinatorial.
std::vector<SpaceHandle> builtin_spaces();
SpaceHandle builtin_space(const std::string& name);

/// Toy pairwise families: "z2-axes" (two Z factors, full constraints),
/// "diagonal" (two equal Z factors, diagonal constraint), "band-B",
/// "tree-product" (two finite trees, full constraints).
PairwiseFamily builtin_family(const std::string& name);

/// The axis-projection total-space candidate for a built-in family.
TotalSpaceCandidate builtin_candidate(const PairwiseFamily& f, const std::string& name);

/// Z window [-n, n] lattice handle.
SpaceHandle z_line(std::int64_t lo, std::int64_t hi, const std::string& name = "z1");
/// Z^2 l-inf box.
SpaceHandle z2_box(std::int64_t lo, std::int64_t hi, const std::string& name = "z2");
/// The even sublattice 2Z within [lo, hi].
SpaceHandle even_line(std::int64_t lo, std::int64_t hi, const std::string& name = "2z");

}  // namespace coarseforge
