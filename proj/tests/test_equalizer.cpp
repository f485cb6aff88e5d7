#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "coarseforge/builtins.hpp"
#include "coarseforge/equalizer.hpp"

using namespace coarseforge;

namespace {

struct Pair {
    SpaceHandle z, universe;
    MapTable f, g;
};

Pair id_vs_shift(std::int64_t lo, std::int64_t hi, std::int64_t shift) {
    Pair p;
    p.z = z_line(lo, hi, "z");
    p.universe = make_lattice_space("z_univ", 1, LatticeNorm::Linf, p.z->window);
    p.f = identity_map(p.z, p.universe);
    p.g = make_map_table_fn("shift", p.z, p.universe, [shift](const Point& q) {
        return Point(Point::Coords{q.coords()[0] + shift});
    });
    return p;
}

}  // namespace

TEST_CASE("membership is the defining inequality") {
    auto p = id_vs_shift(-12, 12, 5);
    CHECK(kappa_equalizer(p.f, p.f, 0).members.size() == p.z->window.size());
    CHECK(kappa_equalizer(p.f, p.g, 4).members.empty());
    CHECK(kappa_equalizer(p.f, p.g, 5).members.size() == p.z->window.size());

    // id vs negation at kappa = 2: the points with |2x| <= 2
    auto neg = make_map_table_fn("neg", p.z, p.universe, [](const Point& q) {
        return Point(Point::Coords{-q.coords()[0]});
    });
    auto eq = kappa_equalizer(p.f, neg, 2);
    CHECK(eq.member_points() ==
          std::vector<Point>{Point::lattice({-1}), Point::lattice({0}), Point::lattice({1})});
    // the equaliser inherits the ambient metric by restriction
    CHECK(eq.space->distance(Point::lattice({-1}), Point::lattice({1})) == ExtDist(2));
}

TEST_CASE("nestedness in kappa") {
    auto p = id_vs_shift(-10, 10, 3);
    auto small = kappa_equalizer(p.f, p.g, 2).members;
    auto large = kappa_equalizer(p.f, p.g, 3).members;
    for (int m : small) CHECK(std::find(large.begin(), large.end(), m) != large.end());
}

TEST_CASE("stability table: threshold at the shift") {
    auto p = id_vs_shift(-20, 20, 5);
    std::vector<Rational> grid;
    for (int k = 0; k <= 10; ++k) grid.emplace_back(k);
    auto table = equalizer_stability(p.f, p.g, grid);
    REQUIRE(table.threshold.has_value());
    CHECK(*table.threshold == Rational(5));
    for (const auto& row : table.rows) {
        if (row.kappa >= Rational(5)) CHECK(row.radius == ExtDist(0));
        else if (row.kappa_prime >= Rational(5)) CHECK(row.radius.is_inf());
        else CHECK(row.radius == ExtDist(0));  // both empty
    }
}

TEST_CASE("stability radii are monotone in both grid arguments") {
    auto p = id_vs_shift(-20, 20, 0);
    auto neg = make_map_table_fn("neg", p.z, p.universe, [](const Point& q) {
        return Point(Point::Coords{-q.coords()[0]});
    });
    auto table = equalizer_stability(p.f, neg, {0, 2, 4, 8});
    // r(0,4) = 2, r(2,4) = 1: nonincreasing in kappa; r(0,2) = 1 <= r(0,4)
    auto radius = [&](long a, long b) {
        for (const auto& row : table.rows)
            if (row.kappa == Rational(a) && row.kappa_prime == Rational(b)) return row.radius;
        return ExtDist::inf();
    };
    CHECK(radius(0, 2) == ExtDist(1));
    CHECK(radius(0, 4) == ExtDist(2));
    CHECK(radius(2, 4) == ExtDist(1));
    CHECK(radius(0, 2) <= radius(0, 4));
    CHECK(radius(2, 4) <= radius(0, 4));
    CHECK_FALSE(table.threshold.has_value());  // radii keep growing within the grid
}

TEST_CASE("f = g stabilises at the grid minimum") {
    auto p = id_vs_shift(-10, 10, 0);
    auto table = equalizer_stability(p.f, p.f, {0, 1, 2});
    REQUIRE(table.threshold.has_value());
    CHECK(*table.threshold == Rational(0));
    for (const auto& row : table.rows) CHECK(row.radius == ExtDist(0));
}

TEST_CASE("factoring through the equaliser") {
    auto p = id_vs_shift(-20, 20, 5);
    auto inner = z_line(-5, 5, "inner");
    // h with f h = g h nowhere: kappa_min is the constant gap 5
    MapTable h = make_map_table_fn("h", inner, p.z, [](const Point& q) { return q; });
    auto res = factor_through_equalizer(h, p.f, p.g, {0, 2, 4, 6, 8});
    CHECK(res.kappa_min == Rational(5));
    REQUIRE(res.kappa_grid_pick.has_value());
    CHECK(*res.kappa_grid_pick == Rational(6));
    // corestriction keeps values and lands inside the equaliser
    for (size_t i = 0; i < h.values.size(); ++i) {
        CHECK(res.corestriction.values[i] == h.values[i]);
        CHECK(res.target.space->window_index_of(res.corestriction.values[i]) >= 0);
    }

    // exact agreement gives kappa_min = 0
    auto resid = factor_through_equalizer(h, p.f, p.f, {});
    CHECK(resid.kappa_min == Rational(0));

    // constant h at a point where the maps disagree by exactly 5
    MapTable hconst = make_map_table_fn("hc", inner, p.z,
                                        [](const Point&) { return Point::lattice({0}); });
    CHECK(factor_through_equalizer(hconst, p.f, p.g, {}).kappa_min == Rational(5));
}

TEST_CASE("directed Hausdorff conventions") {
    auto z = z_line(0, 10, "z");
    CHECK(directed_hausdorff(*z, {}, {}) == ExtDist(0));
    CHECK(directed_hausdorff(*z, {}, {3}).is_inf());
    CHECK(directed_hausdorff(*z, {0, 1, 2}, {}) == ExtDist(0));
    CHECK(directed_hausdorff(*z, {0}, {10}) == ExtDist(10));
}
