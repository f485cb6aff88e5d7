#pragma once

#include "coarseforge/control.hpp"
#include "coarseforge/extdist.hpp"
#include "coarseforge/point.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace coarseforge {

struct SpaceError : std::runtime_error {
    std::string code;
    SpaceError(std::string c, const std::string& what)
        : std::runtime_error(c + ": " + what), code(std::move(c)) {}
};

class Space;
using SpaceHandle = std::shared_ptr<const Space>;

enum class LatticeNorm { L1, Linf, L2Rounded };

struct ExplicitMatrixOracle {
    std::vector<Point> points;
    std::vector<std::vector<ExtDist>> dist;  // symmetric, zero diagonal; validated
    std::map<Point, int> index;
};

struct LatticeOracle {
    int dim = 1;
    LatticeNorm norm = LatticeNorm::Linf;
};

/// Finite combinatorial graph with the hop metric; `tree` additionally
/// validates |E| = |V| - 1 and connectivity.
struct GraphOracle {
    std::vector<std::string> vertices;
    std::vector<std::pair<int, int>> edges;
    bool tree = false;
    std::map<std::string, int> index;
    std::vector<std::vector<int>> adjacency;
    mutable std::mutex cache_mutex;
    mutable std::map<int, std::vector<int>> bfs_rows;  // -1 encodes infinity
};

struct ProductLinfOracle {
    std::vector<SpaceHandle> parts;
};

struct SubspaceOracle {
    SpaceHandle parent;
};

class WeightedRipsGraph;

/// Metric derived from a weighted Rips graph over the parent's window
/// (shortest weighted paths); used by the shortcut-metric construction.
struct WeightedRipsDerivedOracle {
    SpaceHandle parent;
    ControlFn weight_fn;           // applied to parent distances, clamped below at 1
    std::optional<Rational> sigma;  // nullopt: complete on finite-distance pairs
    std::shared_ptr<WeightedRipsGraph> graph;  // built on demand
    mutable std::mutex build_mutex;
};

using Oracle = std::variant<ExplicitMatrixOracle, LatticeOracle, std::shared_ptr<GraphOracle>,
                            ProductLinfOracle, SubspaceOracle,
                            std::shared_ptr<WeightedRipsDerivedOracle>>;

/**
 * An extended-metric oracle over a point universe together with the finite
 * ordered window on which all computations run.
 */
class Space {
public:
    std::string name;
    Oracle oracle;
    std::vector<Point> window;

    ExtDist distance(const Point& x, const Point& y) const;
    bool resolvable(const Point& p) const;

    int window_size() const { return static_cast<int>(window.size()); }
    int window_index_of(const Point& p) const;  // -1 when absent
    ExtDist distance_by_index(int i, int j) const { return distance(window[i], window[j]); }

    const std::map<Point, int>& window_index() const;

private:
    mutable std::map<Point, int> window_index_;
    mutable std::once_flag window_index_once_;
};

SpaceHandle make_explicit_matrix_space(std::string name, std::vector<Point> points,
                                       std::vector<std::vector<ExtDist>> dist,
                                       std::vector<Point> window = {});
SpaceHandle make_lattice_space(std::string name, int dim, LatticeNorm norm,
                               std::vector<Point> window);
SpaceHandle make_graph_space(std::string name, std::vector<std::string> vertices,
                             std::vector<std::pair<int, int>> edges, bool tree,
                             std::vector<Point> window = {});
SpaceHandle make_product_linf_space(std::string name, std::vector<SpaceHandle> parts,
                                    std::vector<Point> window);
SpaceHandle make_subspace(std::string name, SpaceHandle parent, std::vector<Point> window);
SpaceHandle make_weighted_rips_derived_space(std::string name, SpaceHandle parent,
                                             ControlFn weight_fn, std::optional<Rational> sigma);

/// Convenience: 1-d lattice window {lo, ..., hi}.
std::vector<Point> z_window(std::int64_t lo, std::int64_t hi);
/// 2-d lattice window {lo..hi}^2 in row-major point order.
std::vector<Point> z2_window(std::int64_t lo, std::int64_t hi);

/// Indices of the inner window after shaving `margin_percent` of the
/// eccentricity spread: keep x with ecc(x) <= R_min + (1 - m/100) (R_max - R_min),
/// eccentricities taken over finite distances only.
std::vector<int> inner_window_indices(const Space& s, int margin_percent);

/// All-pairs distances over the window; rows[i][j] = d(w_i, w_j).
std::vector<std::vector<ExtDist>> window_distance_table(const Space& s);

struct MetricValidation {
    bool ok = true;
    std::string failure;
    long triples_checked = 0;
    bool exhaustive = false;
    std::uint64_t seed = 0;
};

/// Symmetry, zero diagonal, and triangle inequality on the window; exhaustive
/// for explicit matrices, otherwise min(|W|^3, budget) seeded triples.
MetricValidation validate_metric_axioms(const Space& s, std::uint64_t seed = 1,
                                        long triple_budget = 100000);

}  // namespace coarseforge
