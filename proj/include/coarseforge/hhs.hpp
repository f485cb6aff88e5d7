#pragma once

#include "coarseforge/checks.hpp"
#include "coarseforge/diagram.hpp"

namespace coarseforge {

/// Constraint over an unordered pair of factors: everything, the diagonal,
/// a band |x_U - x_V| <= B on 1-d lattice factors, or an explicit point set.
struct PairConstraint {
    enum class Kind { Full, Diagonal, Band, Points } kind = Kind::Full;
    Rational band = 0;
    std::vector<std::pair<Point, Point>> points;
};

/**
 * A pairwise-constrained family: factor spaces indexed by labels plus one
 * constraint per unordered pair of distinct labels (Full when omitted).
 */
struct PairwiseFamily {
    std::vector<std::string> labels;
    std::vector<SpaceHandle> factors;
    std::map<std::pair<int, int>, PairConstraint> constraints;  // key i<j

    int label_index(const std::string& label) const;
    const PairConstraint& constraint(int i, int j) const;

    /// l-inf distance from (xu, xv) to the constraint set of pair {i, j}.
    ExtDist constraint_distance(int i, int j, const Point& xu, const Point& xv) const;

    /// Enumerated constraint set of pair {i, j} as window point pairs.
    std::vector<std::pair<Point, Point>> constraint_pairs(int i, int j) const;
};

/// A candidate total space: a space plus one projection per label with a
/// common upper control; projections must respect every pair constraint.
struct TotalSpaceCandidate {
    SpaceHandle space;
    std::vector<MapTable> projections;  // aligned with family labels
};

/// Invariant replay: lambda_U x lambda_V lands in every constraint set.
Certificate validate_total_space_candidate(const PairwiseFamily& f, const TotalSpaceCandidate& t);

/// Primary vertices per label, secondary vertices per unordered pair carrying
/// the constraint set under l-inf, two projection arrows per pair; uniform
/// control affine(1,0), re-verified.
DiagramSpec encode_pairwise_diagram(const PairwiseFamily& f);

/**
 * The hatted tuple space over the primary factors only: tuples whose pairs
 * lie in every constraint set, relaxed to closed kappa-neighbourhoods for
 * kappa > 0. Isometric to the full primary+secondary tuple space via the
 * section embedding; the replay samples pairs and compares both metrics.
 */
TupleSpace hatted_tuple_space(const PairwiseFamily& f, const Rational& kappa,
                              long node_budget = 1000000);

struct RealizationResult {
    Rational kappa;
    ExtDist r_observed = ExtDist(0);
    Certificate certificate;
};

/// Brute-force realization: the worst over hatted tuples of the best total
/// point approximating it across every factor.
RealizationResult realization_check(const PairwiseFamily& f, const TotalSpaceCandidate& t,
                                    const Rational& kappa);

/// Fits rho with d_X <= rho(max_U d(lambda_U p, lambda_U q)) on inner pairs;
/// fails on collapse pairs (all projections agree, points far apart).
Certificate uniqueness_criterion_check(const PairwiseFamily& f, const TotalSpaceCandidate& t,
                                       int margin_percent);

struct HhsQiData {
    QuasiIsometryData qi;
    long tuple_count = 0;
};

/// Rips graph over the hatted tuple space, the product projection map from
/// the candidate total space into it, and its quasi-isometry certificate.
HhsQiData hhs_qi_certificate(const PairwiseFamily& f, const TotalSpaceCandidate& t,
                             const Rational& sigma, const Rational& kappa, int margin_percent);

/// (alpha_U x alpha_V)(R_UV) within r of R'_UV for every constrained pair;
/// reports the exact worst deviation.
Certificate compatible_family_check(const PairwiseFamily& f, const PairwiseFamily& f_prime,
                                    const std::vector<MapTable>& alpha, const Rational& r);

struct RetractionAssembly {
    // certified inputs
    Rational K, c, r;
    // emitted constants, exactly the formulas on the certified inputs
    Rational K_prime, sigma_prime, kappa_prime;
    TupleSpace source_tuples, target_tuples;
    MapTable induced;  // between hatted tuple spaces, componentwise alpha
    Certificate certificate;
};

/**
 * Assembles factorwise retractions into a tuple-space retraction with
 * explicit constants K' = K + rho(c) + r, sigma' = max(rho(sigma) + 2r, K'),
 * kappa' = 2K + 2 rho(c) + rho(kappa) + 4r. Secondary components are realized
 * by nearest-constraint snap with lexicographic tie-breaks and replay their
 * upper control rho'(t) = rho(t) + 2r; the induced map is replayed to be
 * edge-wise 1-Lipschitz into Rips_{sigma'} and a retraction within K'.
 */
RetractionAssembly assemble_retraction(const PairwiseFamily& f, const PairwiseFamily& f_prime,
                                       const std::vector<MapTable>& alpha,
                                       const std::vector<MapTable>& omega, const ControlFn& rho,
                                       const Rational& sigma, const Rational& kappa);

}  // namespace coarseforge
