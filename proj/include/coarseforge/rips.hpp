#pragma once

#include "coarseforge/certificate.hpp"
#include "coarseforge/space.hpp"

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

namespace coarseforge {

/**
 * Rips graph of a window at scale sigma: distinct points adjacent iff
 * d(x,x') <= sigma. Distances are hop counts computed by per-source BFS with
 * neighbor lists sorted in point order; rows are immutable once published.
 */
class RipsGraph {
public:
    RipsGraph(SpaceHandle base, Rational sigma);

    const SpaceHandle& base() const { return base_; }
    const Rational& sigma() const { return sigma_; }
    int n() const { return static_cast<int>(adjacency_.size()); }
    const std::vector<std::vector<int>>& adjacency() const { return adjacency_; }

    /// Graph distance in hops; -1 encodes infinity.
    const std::vector<std::int32_t>& row(int source) const;
    ExtDist distance_by_index(int i, int j) const;
    ExtDist distance(const Point& x, const Point& y) const;

    /// BFS parent tree from `source` with lexicographic tie-breaking; parent
    /// of the source is itself, unreached vertices get -1.
    std::vector<std::int32_t> parents(int source) const;

    void ensure_all_rows() const;

private:
    SpaceHandle base_;
    Rational sigma_;
    std::vector<std::vector<int>> adjacency_;
    mutable std::mutex cache_mutex_;
    mutable std::vector<std::shared_ptr<const std::vector<std::int32_t>>> rows_;
};

RipsGraph build_rips(const SpaceHandle& s, const Rational& sigma);
ExtDist rips_distance(const RipsGraph& g, const Point& x, const Point& y);

/**
 * Weighted Rips graph: an edge of weight Theta(d(x,x')) between distinct
 * points with d(x,x') <= sigma (all finite-distance pairs when sigma is
 * absent). Distances are exact shortest weighted paths; weights are scaled to
 * integers by their common denominator before Dijkstra, so no floating point
 * is involved. Above `kDenseEdgeThreshold` estimated edges the edge set is
 * kept implicit and relaxed on the fly.
 */
class WeightedRipsGraph {
public:
    static constexpr long kEdgeWarnThreshold = 10000000;   // density warning
    static constexpr long kDenseEdgeThreshold = 2000000;   // implicit mode above this

    WeightedRipsGraph(SpaceHandle base, ControlFn theta, std::optional<Rational> sigma,
                      bool clamp_weights_below_one);

    const SpaceHandle& base() const { return base_; }
    const ControlFn& theta() const { return theta_; }
    const std::optional<Rational>& sigma() const { return sigma_; }
    int n() const { return n_; }
    long edge_count() const { return edge_count_; }
    bool density_warning() const { return edge_count_ > kEdgeWarnThreshold; }

    /// Edge weight between window indices, or nullopt when not an edge.
    std::optional<Rational> edge_weight(int i, int j) const;

    const std::vector<ExtDist>& row(int source) const;
    ExtDist distance_by_index(int i, int j) const;
    ExtDist distance(const Point& x, const Point& y) const;

    void ensure_all_rows() const;

    /// Test hook: corrupt one edge weight (certificates must then fail).
    void corrupt_weight_for_test(int i, int j, const Rational& w);

private:
    void build_edges();
    std::vector<ExtDist> dijkstra(int source) const;

    SpaceHandle base_;
    ControlFn theta_;
    std::optional<Rational> sigma_;
    bool clamp_;
    int n_ = 0;
    long edge_count_ = 0;
    bool implicit_ = false;
    std::vector<std::vector<std::pair<int, Rational>>> adjacency_;  // explicit mode
    std::shared_ptr<struct WeightedRipsImpl> impl_;                 // implicit mode
    mutable std::map<std::pair<int, int>, Rational> overrides_;     // test corruption
    mutable std::mutex cache_mutex_;
    mutable std::vector<std::shared_ptr<const std::vector<ExtDist>>> rows_;
};

WeightedRipsGraph build_weighted_rips(const SpaceHandle& s, const ControlFn& theta,
                                      std::optional<Rational> sigma);

/// verify a (sigma,rho)-path: rho^T(|k-j|) <= d(x_j,x_k) <= sigma |k-j| for
/// all index pairs, both sides decided exactly via the Galois property.
Certificate verify_sigma_rho_path(const SpaceHandle& s, const std::vector<Point>& path,
                                  const Rational& sigma, const ControlFn& rho);

struct PathSearchResult {
    bool found = false;
    std::vector<Point> path;
    Certificate certificate;
};

/// BFS geodesic in Rips_sigma from x to y (lexicographic tie-breaking), then
/// replay of the path inequalities.
PathSearchResult find_sigma_rho_path(const RipsGraph& g, const Point& x, const Point& y,
                                     const ControlFn& rho);

/// Both characterisations on the inner window: a (sigma,rho)-path for every
/// finite-distance pair, and rho^T(d_sigma) <= d. The two verdicts must agree.
Certificate cgeodesic_certificate(const SpaceHandle& s, const Rational& sigma,
                                  const ControlFn& rho, int margin_percent);

struct SweepEntry {
    Rational sigma_lo, sigma_hi;
    Rational a, b;  // fitted d_lo <= a d_hi + b over inner pairs
};

struct StabilityReport {
    std::vector<SweepEntry> consecutive_fits;
    bool evidence = false;
    Rational evidence_scale = 0;
    std::string label;  // window-evidence disclaimer
};

StabilityReport filtration_sweep(const SpaceHandle& s, const std::vector<Rational>& sigma_grid,
                                 int margin_percent);

Certificate weight_control_check(const SpaceHandle& s, const ControlFn& theta,
                                 int margin_percent);
Certificate weight_control_check_graph(const WeightedRipsGraph& ginf, int margin_percent);

Certificate surplus_weight_check(const SpaceHandle& s, const ControlFn& theta,
                                 const ControlFn& rho, const Rational& sigma,
                                 int margin_percent);

/// Shortcut remetrisation d' = d^{Theta-perp}_inf with weights clamped below
/// at 1; the returned handle carries the derived metric.
SpaceHandle shortcut_metric(const SpaceHandle& s, const ControlFn& theta);

}  // namespace coarseforge
