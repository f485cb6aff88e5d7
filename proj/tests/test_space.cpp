#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "coarseforge/builtins.hpp"
#include "coarseforge/space.hpp"

using namespace coarseforge;

TEST_CASE("lattice distances") {
    auto linf = make_lattice_space("l", 2, LatticeNorm::Linf, z2_window(-4, 4));
    CHECK(linf->distance(Point::lattice({0, 0}), Point::lattice({3, -2})) == ExtDist(3));
    auto l1 = make_lattice_space("l1", 2, LatticeNorm::L1, z2_window(-4, 4));
    CHECK(l1->distance(Point::lattice({0, 0}), Point::lattice({3, -2})) == ExtDist(5));
    auto l2 = make_lattice_space("l2", 2, LatticeNorm::L2Rounded, z2_window(-4, 4));
    CHECK(l2->distance(Point::lattice({0, 0}), Point::lattice({3, 4})) == ExtDist(5));
    CHECK(l2->distance(Point::lattice({0, 0}), Point::lattice({1, 1})) == ExtDist(2));  // ceil
}

TEST_CASE("explicit matrix with two components") {
    auto s = builtin_space("two_clusters");
    CHECK(s->distance(Point("p0"), Point("p1")) == ExtDist(1));
    CHECK(s->distance(Point("p0"), Point("p7")).is_inf());
    CHECK(s->distance(Point("p3"), Point("p3")) == ExtDist(0));
}

TEST_CASE("matrix construction rejects broken metrics") {
    std::vector<Point> pts{Point("a"), Point("b"), Point("c")};
    std::vector<std::vector<ExtDist>> bad{
        {ExtDist(0), ExtDist(1), ExtDist(5)},
        {ExtDist(1), ExtDist(0), ExtDist(1)},
        {ExtDist(5), ExtDist(1), ExtDist(0)},
    };
    CHECK_THROWS_AS(make_explicit_matrix_space("bad", pts, bad), SpaceError);  // 5 > 1 + 1
}

TEST_CASE("product l-inf takes the componentwise max") {
    auto a = z_line(-3, 3, "a");
    auto b = z_line(-3, 3, "b");
    std::vector<Point> window;
    for (auto x : {-1L, 0L, 2L})
        for (auto y : {-1L, 0L, 2L})
            window.push_back(Point(Point::Tuple{Point::lattice({x}), Point::lattice({y})}));
    auto prod = make_product_linf_space("p", {a, b}, window);
    Point u(Point::Tuple{Point::lattice({-1}), Point::lattice({2})});
    Point v(Point::Tuple{Point::lattice({2}), Point::lattice({0})});
    CHECK(prod->distance(u, v) == ExtDist(3));
}

TEST_CASE("graph and tree oracles") {
    auto path = builtin_space("path64");
    CHECK(path->distance(Point("v0"), Point("v5")) == ExtDist(5));
    auto star = builtin_space("star");
    CHECK(star->distance(Point("a0_3"), Point("a1_2")) == ExtDist(5));  // through the center
    CHECK_THROWS_AS(make_graph_space("t", {"x", "y", "z"}, {{0, 1}}, /*tree=*/true), SpaceError);
}

TEST_CASE("subspace inherits the parent metric") {
    auto z = z_line(-8, 8);
    auto evens = make_subspace("evens", z, z_window(-8, 8));
    CHECK(evens->distance(Point::lattice({-2}), Point::lattice({6})) == ExtDist(8));
}

TEST_CASE("metric axioms validate on every built-in") {
    for (const auto& s : builtin_spaces()) {
        auto v = validate_metric_axioms(*s, 1, 20000);
        CHECK(v.ok);
        CHECK(v.triples_checked > 0);
    }
}

TEST_CASE("inner window shaves the boundary") {
    auto z = z_line(-64, 64);
    auto inner = inner_window_indices(*z, 10);
    CHECK(inner.size() < z->window.size());
    CHECK(inner.size() > z->window.size() * 3 / 4);
    // margin zero keeps everything
    CHECK(inner_window_indices(*z, 0).size() == z->window.size());
}

TEST_CASE("extended arithmetic laws") {
    ExtDist inf = ExtDist::inf();
    CHECK((ExtDist(3) + inf).is_inf());
    CHECK(ext_min(ExtDist(3), inf) == ExtDist(3));
    CHECK(ext_max(ExtDist(3), inf).is_inf());
    CHECK(inf == inf);
    CHECK(ExtDist(Rational(1, 2)) < ExtDist(1));
}
