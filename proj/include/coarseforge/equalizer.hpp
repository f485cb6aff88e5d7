#pragma once

#include "coarseforge/certificate.hpp"
#include "coarseforge/map_table.hpp"

#include <optional>

namespace coarseforge {

/**
 * The kappa-equaliser of a parallel pair: the source-window points where the
 * maps agree within kappa, with the metric inherited by restriction.
 */
struct EqualizerSpace {
    MapTable f, g;
    Rational kappa;
    std::vector<int> members;  // indices into the shared source window
    SpaceHandle space;         // subspace handle over the member points

    std::vector<Point> member_points() const {
        std::vector<Point> pts;
        for (int i : members) pts.push_back(f.src->window[i]);
        return pts;
    }
};

EqualizerSpace kappa_equalizer(const MapTable& f, const MapTable& g, const Rational& kappa);

struct StabilityRow {
    Rational kappa, kappa_prime;
    ExtDist radius;  // directed Hausdorff of Eq^{kappa'} into Eq^{kappa}
};

struct EqStabilityTable {
    std::vector<StabilityRow> rows;
    std::optional<Rational> threshold;  // least grid kappa whose tail radii are finite and stable
    std::string label = "grid-evidence";
};

/// Directed Hausdorff radii r(kappa, kappa') across the grid, with the
/// empty-set conventions r = 0 when both sets are empty and r = infinite when
/// only the smaller one is.
EqStabilityTable equalizer_stability(const MapTable& f, const MapTable& g,
                                     const std::vector<Rational>& kappa_grid);

struct FactorResult {
    Rational kappa_min;
    std::optional<Rational> kappa_grid_pick;  // least grid value >= kappa_min, if a grid was given
    EqualizerSpace target;
    MapTable corestriction;
};

/// kappa_min = max over h's window of d(f(hx), g(hx)); the corestriction is h
/// with codomain narrowed to Eq^{kappa_min}, identical on values.
FactorResult factor_through_equalizer(const MapTable& h, const MapTable& f, const MapTable& g,
                                      const std::vector<Rational>& kappa_grid = {});

/// Directed Hausdorff of point set B into point set A inside `ambient`.
ExtDist directed_hausdorff(const Space& ambient, const std::vector<int>& a,
                           const std::vector<int>& b);

}  // namespace coarseforge
