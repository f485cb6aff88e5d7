#include "coarseforge/equalizer.hpp"

#include "coarseforge/parallel.hpp"

#include <algorithm>

namespace coarseforge {

namespace {

void require_parallel_pair(const MapTable& f, const MapTable& g) {
    if (f.src->window != g.src->window)
        throw SpaceError("MismatchedSpaces", "equaliser needs a shared source window");
    // destinations must at least agree on the points involved; distance calls
    // below will throw if they cannot resolve both images
}

}  // namespace

EqualizerSpace kappa_equalizer(const MapTable& f, const MapTable& g, const Rational& kappa) {
    require_parallel_pair(f, g);
    EqualizerSpace eq;
    eq.f = f;
    eq.g = g;
    eq.kappa = kappa;
    for (int i = 0; i < f.src->window_size(); ++i) {
        ExtDist d = f.dst->distance(f.apply_index(i), g.apply_index(i));
        if (d <= ExtDist(kappa)) eq.members.push_back(i);
    }
    std::vector<Point> pts;
    for (int i : eq.members) pts.push_back(f.src->window[i]);
    eq.space = make_subspace("eq_" + rat_str(kappa) + "(" + f.name + "," + g.name + ")", f.src,
                             std::move(pts));
    return eq;
}

ExtDist directed_hausdorff(const Space& ambient, const std::vector<int>& a,
                           const std::vector<int>& b) {
    if (b.empty()) return ExtDist(0);      // nothing to cover
    if (a.empty()) return ExtDist::inf();  // cannot cover anything
    ExtDist radius(0);
    std::vector<ExtDist> per_outer(b.size());
    parallel_for(static_cast<long>(b.size()), [&](long t) {
        ExtDist nearest = ExtDist::inf();
        for (int y : a) {
            nearest = ext_min(nearest, ambient.distance_by_index(b[static_cast<size_t>(t)], y));
            if (nearest == ExtDist(0)) break;  // early exit, cannot improve
        }
        per_outer[static_cast<size_t>(t)] = nearest;
    });
    for (const auto& d : per_outer) radius = ext_max(radius, d);
    return radius;
}

EqStabilityTable equalizer_stability(const MapTable& f, const MapTable& g,
                                     const std::vector<Rational>& kappa_grid) {
    if (kappa_grid.empty()) throw SpaceError("BadInput", "empty kappa grid");
    require_parallel_pair(f, g);
    std::vector<Rational> grid(kappa_grid);
    std::sort(grid.begin(), grid.end());

    std::vector<std::vector<int>> sets;
    for (const auto& k : grid) sets.push_back(kappa_equalizer(f, g, k).members);

    EqStabilityTable table;
    std::vector<std::vector<ExtDist>> radii(grid.size(),
                                            std::vector<ExtDist>(grid.size(), ExtDist(0)));
    for (size_t a = 0; a < grid.size(); ++a) {
        for (size_t b = a; b < grid.size(); ++b) {
            ExtDist r;
            if (sets[a].empty() && sets[b].empty()) r = ExtDist(0);
            else r = directed_hausdorff(*f.src, sets[a], sets[b]);
            radii[a][b] = r;
            table.rows.push_back(StabilityRow{grid[a], grid[b], r});
        }
    }
    // least grid kappa whose radii to every larger grid value are finite and
    // have stopped growing at the grid's tail
    for (size_t a = 0; a < grid.size(); ++a) {
        bool finite = true;
        for (size_t b = a; b < grid.size(); ++b) finite = finite && radii[a][b].is_finite();
        if (!finite) continue;
        if (grid.size() - a >= 2) {
            const ExtDist& last = radii[a][grid.size() - 1];
            const ExtDist& prev = radii[a][grid.size() - 2];
            if (last == prev) {
                table.threshold = grid[a];
                break;
            }
        }
    }
    return table;
}

FactorResult factor_through_equalizer(const MapTable& h, const MapTable& f, const MapTable& g,
                                      const std::vector<Rational>& kappa_grid) {
    require_parallel_pair(f, g);
    // h lands in the shared source of f and g
    Rational kappa_min = 0;
    for (const auto& hx : h.values) {
        int i = f.src->window_index_of(hx);
        if (i < 0)
            throw SpaceError("UnknownPoint", "h image escapes the equaliser's ambient window");
        ExtDist d = f.dst->distance(f.apply_index(i), g.apply_index(i));
        if (d.is_inf())
            throw SpaceError("BadInput", "f,g disagree at infinite distance on the image of h");
        kappa_min = rat_max(kappa_min, d.finite());
    }
    FactorResult res;
    res.kappa_min = kappa_min;
    if (!kappa_grid.empty()) {
        std::vector<Rational> grid(kappa_grid);
        std::sort(grid.begin(), grid.end());
        for (const auto& k : grid)
            if (k >= kappa_min) {
                res.kappa_grid_pick = k;
                break;
            }
    }
    res.target = kappa_equalizer(f, g, kappa_min);
    res.corestriction = make_map_table(h.name + "_corestricted", h.src, res.target.space, h.values);
    // replay: every image point is a member, and values are untouched
    for (const auto& hx : res.corestriction.values)
        if (res.target.space->window_index_of(hx) < 0)
            throw SpaceError("BadInput", "corestriction image escaped the equaliser");
    return res;
}

}  // namespace coarseforge
