#pragma once

#include "coarseforge/space.hpp"

#include <functional>
#include <vector>

namespace coarseforge {

/**
 * A total assignment from the source window into the destination oracle.
 * Values may lie anywhere the destination can resolve, not only in its window.
 */
struct MapTable {
    std::string name;
    SpaceHandle src;
    SpaceHandle dst;
    std::vector<Point> values;  // aligned with src->window

    const Point& apply(const Point& x) const {
        int i = src->window_index_of(x);
        if (i < 0) throw SpaceError("UnknownPoint", "map argument outside source window");
        return values[static_cast<size_t>(i)];
    }
    const Point& apply_index(int i) const { return values[static_cast<size_t>(i)]; }
};

/// Validates totality and destination resolvability.
MapTable make_map_table(std::string name, SpaceHandle src, SpaceHandle dst,
                        std::vector<Point> values);

/// Pointwise map build from a function over the source window.
MapTable make_map_table_fn(std::string name, SpaceHandle src, SpaceHandle dst,
                           const std::function<Point(const Point&)>& fn);

/// Identity on a shared window (dst may be a different metric on the same points).
MapTable identity_map(SpaceHandle src, SpaceHandle dst);

/// g after f; every f-image must lie in g's source window.
MapTable compose_maps(const MapTable& g, const MapTable& f);

}  // namespace coarseforge
