#pragma once

#include "coarseforge/certificate.hpp"
#include "coarseforge/equalizer.hpp"
#include "coarseforge/map_table.hpp"
#include "coarseforge/rips.hpp"

#include <optional>

namespace coarseforge {

struct DiagramObject {
    std::string name;
    SpaceHandle space;
};

struct DiagramArrow {
    std::string id;
    int src = 0, dst = 0;   // object indices
    MapTable bonding;       // window(D_src) -> points of D_dst (must land in window(D_dst))
};

/**
 * A uniformly controlled diagram: a finite directed multigraph of spaces and
 * bonding maps admitting one common upper control. No composition or identity
 * arrows are required.
 */
struct DiagramSpec {
    std::vector<DiagramObject> objects;
    std::vector<DiagramArrow> arrows;
    std::optional<ControlFn> uniform_control;

    int object_index(const std::string& name) const;
};

/// Declared control replayed against every bonding map; without a declared
/// control, fits the least affine common control and reports it.
Certificate validate_uc_diagram(const DiagramSpec& d);

struct GammaDelta {
    SpaceHandle object_product;    // l-inf product of the objects, window = full product
    SpaceHandle codomain_product;  // l-inf product over arrows of the codomain objects
    MapTable gamma, delta;
};

/// The codomain and domain maps (x_j)_j -> (x_{cod phi})_phi and
/// (x_j)_j -> (beta_phi x_{dom phi})_phi over the materialized product window.
/// With no arrows the codomain product is the one-point empty-tuple space.
GammaDelta codomain_domain_maps(const DiagramSpec& d, long product_budget = 1000000);

/**
 * The consistent-tuple space Tuple_kappa: tuples of the object product
 * satisfying every arrow constraint within kappa, under the l-inf metric.
 * Enumerated by arc-consistency pruning plus backtracking in object order.
 */
struct TupleSpace {
    const DiagramSpec* diagram = nullptr;
    Rational kappa;
    std::vector<std::vector<int>> tuples;  // per-object window indices
    SpaceHandle space;                     // window = tuple points, metric = l-inf

    Point tuple_point(size_t t) const { return space->window[t]; }
    long size() const { return static_cast<long>(tuples.size()); }
};

TupleSpace tuple_space(const DiagramSpec& d, const Rational& kappa, long node_budget = 1000000);

/// Brute-force filter of the full product; the oracle that tuple_space must
/// agree with on small instances.
std::vector<std::vector<int>> tuple_space_bruteforce(const DiagramSpec& d, const Rational& kappa,
                                                     long product_budget = 10000);

/// Rips graph at scale sigma over the tuple space's l-inf metric.
RipsGraph rips_tuple(const TupleSpace& t, const Rational& sigma);

struct ConeSpec {
    SpaceHandle apex;
    std::vector<MapTable> legs;  // one per diagram object, all from the apex
    ControlFn uniform_control;
    Rational commutativity_bound;
};

/// Legs replay the uniform control and every arrow's coarse-commutativity
/// bound; the exact max deviation is reported as kappa_cone, and the
/// product-map route gamma o (prod legs) ~ delta o (prod legs) is replayed to
/// the same constant.
Certificate validate_uc_cone(const ConeSpec& c, const DiagramSpec& d);

struct ConeFactorization {
    MapTable induced;  // apex -> tuple space
    AffineFit upper;   // apex metric to Rips_sigma(tuple) metric
    Certificate certificate;
};

ConeFactorization cone_factorization(const ConeSpec& c, const DiagramSpec& d, const TupleSpace& t,
                                     const Rational& sigma);

/// Exact closeness bound between two factorizations of the same cone in the
/// Rips_sigma(tuple) metric; pass iff finite.
Certificate uniqueness_check(const MapTable& h1, const MapTable& h2, const ConeSpec& c,
                             const TupleSpace& t, const Rational& sigma);

/// Directed-Hausdorff stability table of Tuple_kappa across the grid, using
/// the pruned tuple sets only.
EqStabilityTable tuple_stability_report(const DiagramSpec& d,
                                        const std::vector<Rational>& kappa_grid,
                                        long node_budget = 1000000);

struct RetractionTransport {
    TupleSpace transported;     // Tuple_{kappa'} of the target diagram
    MapTable induced;           // tuple -> tuple, componentwise alpha
    Rational kappa_prime, sigma_prime;
    Rational retraction_deviation;  // observed max of d(alpha(omega(y)), y) on the target tuples
    Certificate certificate;
};

/**
 * Transport of a Rips-tuple structure along a uniformly controlled retraction
 * pair: kappa' = 2K + rho(kappa), sigma' = max(rho(sigma), K). Preconditions
 * (retraction within K, per-arrow naturality within the bound, uniform control
 * rho for the alpha family) are replayed before anything is built.
 */
RetractionTransport retraction_transport(const DiagramSpec& d, const DiagramSpec& d_prime,
                                         const std::vector<MapTable>& alpha,
                                         const std::vector<MapTable>& omega, const Rational& K,
                                         const Rational& naturality_bound, const ControlFn& rho,
                                         const TupleSpace& t, const Rational& sigma);

}  // namespace coarseforge
