#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace coarseforge {

/// A point of some space: lattice coordinates, a named graph vertex, or a
/// tuple of component points (product spaces, tuple spaces). Points carry a
/// total order used for deterministic tie-breaking and witness selection.
struct Point {
    using Coords = std::vector<std::int64_t>;
    using Tuple = std::vector<Point>;

    std::variant<Coords, std::string, Tuple> v;

    Point() : v(Coords{}) {}
    Point(Coords c) : v(std::move(c)) {}
    Point(std::string s) : v(std::move(s)) {}
    Point(Tuple t) : v(std::move(t)) {}

    static Point lattice(std::initializer_list<std::int64_t> xs) { return Point(Coords(xs)); }

    bool is_coords() const { return v.index() == 0; }
    bool is_name() const { return v.index() == 1; }
    bool is_tuple() const { return v.index() == 2; }

    const Coords& coords() const { return std::get<Coords>(v); }
    const std::string& name() const { return std::get<std::string>(v); }
    const Tuple& tuple() const { return std::get<Tuple>(v); }

    friend bool operator==(const Point& a, const Point& b) { return a.v == b.v; }
    friend bool operator!=(const Point& a, const Point& b) { return !(a.v == b.v); }
    friend bool operator<(const Point& a, const Point& b) {
        if (a.v.index() != b.v.index()) return a.v.index() < b.v.index();
        return a.v < b.v;
    }
    friend bool operator<=(const Point& a, const Point& b) { return a < b || a == b; }
};

std::string point_str(const Point& p);

}  // namespace coarseforge
