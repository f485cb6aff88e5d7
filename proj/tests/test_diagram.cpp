#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "coarseforge/builtins.hpp"
#include "coarseforge/diagram.hpp"

#include <algorithm>

using namespace coarseforge;

namespace {

DiagramSpec two_lines_one_arrow(std::int64_t lo, std::int64_t hi, std::int64_t shift,
                                std::vector<SpaceHandle>& keep) {
    auto a = z_line(lo, hi, "A");
    auto b = z_line(lo, hi, "B");
    keep = {a, b};
    DiagramSpec d;
    d.objects = {DiagramObject{"A", a}, DiagramObject{"B", b}};
    std::vector<Point> values;
    for (const auto& p : a->window) {
        std::int64_t x = p.coords()[0] + shift;
        x = std::clamp(x, lo, hi);
        values.push_back(Point(Point::Coords{x}));
    }
    d.arrows.push_back(DiagramArrow{"ab", 0, 1, make_map_table("beta", a, b, values)});
    return d;
}

}  // namespace

TEST_CASE("uniform control validation") {
    std::vector<SpaceHandle> keep;
    DiagramSpec d = two_lines_one_arrow(-6, 6, 0, keep);
    d.uniform_control = ControlFn::affine(1, 0);
    CHECK(validate_uc_diagram(d).passed());

    // a doubling bonding breaks affine(1,0) and reports the arrow
    auto a = z_line(-4, 4, "A");
    auto b = z_line(-8, 8, "B");
    DiagramSpec dd;
    dd.objects = {DiagramObject{"A", a}, DiagramObject{"B", b}};
    std::vector<Point> values;
    for (const auto& p : a->window) values.push_back(Point(Point::Coords{2 * p.coords()[0]}));
    dd.arrows.push_back(DiagramArrow{"dbl", 0, 1, make_map_table("dbl", a, b, values)});
    dd.uniform_control = ControlFn::affine(1, 0);
    Certificate c = validate_uc_diagram(dd);
    CHECK(c.failed());
    CHECK(c.notes.at("arrow") == "dbl");
    CHECK(c.witness.has_value());

    // fit mode over {identity, doubling} lands on affine(2,0)
    dd.uniform_control.reset();
    dd.arrows.push_back(
        DiagramArrow{"id", 1, 1, identity_map(b, b)});
    Certificate fit = validate_uc_diagram(dd);
    CHECK(fit.passed());
    CHECK(fit.at("fitted_a") == ExtDist(2));
    CHECK(fit.at("fitted_b") == ExtDist(0));
}

TEST_CASE("codomain and domain maps over the product window") {
    std::vector<SpaceHandle> keep;
    DiagramSpec d = two_lines_one_arrow(0, 3, 1, keep);
    auto gd = codomain_domain_maps(d);
    CHECK(gd.object_product->window.size() == 16);
    // gamma picks the codomain coordinate, delta pushes through the bonding
    Point x(Point::Tuple{Point::lattice({0}), Point::lattice({2})});
    int xi = gd.object_product->window_index_of(x);
    REQUIRE(xi >= 0);
    CHECK(gd.gamma.apply_index(xi) == Point(Point::Tuple{Point::lattice({2})}));
    CHECK(gd.delta.apply_index(xi) == Point(Point::Tuple{Point::lattice({1})}));

    // no arrows: the codomain product is the one-point empty-tuple space
    DiagramSpec d2;
    d2.objects = d.objects;
    auto gd2 = codomain_domain_maps(d2);
    CHECK(gd2.codomain_product->window.size() == 1);
    CHECK(gd2.gamma.apply_index(0) == Point(Point::Tuple{}));
    CHECK(gd2.delta.apply_index(0) == Point(Point::Tuple{}));

    // budget guard
    auto big = z_line(0, 1000, "big");
    DiagramSpec d3;
    d3.objects = {DiagramObject{"A", big}, DiagramObject{"B", big}};
    CHECK_THROWS_AS(codomain_domain_maps(d3, 1000), SpaceError);
}

TEST_CASE("tuple space equals its brute-force oracle") {
    std::vector<SpaceHandle> keep;
    DiagramSpec d = two_lines_one_arrow(-5, 5, 0, keep);
    for (long kappa : {0L, 1L, 2L}) {
        TupleSpace fast = tuple_space(d, Rational(kappa));
        auto slow = tuple_space_bruteforce(d, Rational(kappa));
        auto sorted_fast = fast.tuples;
        std::sort(sorted_fast.begin(), sorted_fast.end());
        std::sort(slow.begin(), slow.end());
        CHECK(sorted_fast == slow);
    }
    // identity arrow at kappa=0 is the diagonal; kappa=1 the width-1 band
    TupleSpace diag = tuple_space(d, 0);
    CHECK(diag.size() == 11);
    TupleSpace band = tuple_space(d, 1);
    CHECK(band.size() == 11 + 2 * 10);
}

TEST_CASE("no-arrow diagrams give the full product at any kappa") {
    auto a = z_line(0, 2, "A");
    auto b = z_line(0, 4, "B");
    DiagramSpec d;
    d.objects = {DiagramObject{"A", a}, DiagramObject{"B", b}};
    CHECK(tuple_space(d, 0).size() == 15);
    CHECK(tuple_space(d, 7).size() == 15);
}

TEST_CASE("tuple monotonicity in kappa") {
    std::vector<SpaceHandle> keep;
    DiagramSpec d = two_lines_one_arrow(-4, 4, 2, keep);
    TupleSpace t1 = tuple_space(d, 1);
    TupleSpace t2 = tuple_space(d, 3);
    for (const auto& tup : t1.tuples)
        CHECK(std::find(t2.tuples.begin(), t2.tuples.end(), tup) != t2.tuples.end());
}

TEST_CASE("rips over the tuple space: Chebyshev on the no-arrow square") {
    auto a = z_line(-4, 4, "A");
    auto b = z_line(-4, 4, "B");
    DiagramSpec d;
    d.objects = {DiagramObject{"A", a}, DiagramObject{"B", b}};
    TupleSpace t = tuple_space(d, 0);
    RipsGraph g = rips_tuple(t, 1);
    auto inner = inner_window_indices(*t.space, 10);
    for (size_t i = 0; i < inner.size(); ++i)
        for (size_t j = i + 1; j < inner.size(); ++j)
            CHECK(g.distance_by_index(inner[i], inner[j]) ==
                  t.space->distance_by_index(inner[i], inner[j]));

    // sigma = 0: empty graph over the tuples
    RipsGraph g0 = rips_tuple(t, 0);
    for (const auto& nb : g0.adjacency()) CHECK(nb.empty());

    // diagonal diagram at kappa=0, sigma=1 is isometric to Rips_1(Z) via x -> (x,x)
    std::vector<SpaceHandle> keep;
    DiagramSpec diag = two_lines_one_arrow(-4, 4, 0, keep);
    TupleSpace td = tuple_space(diag, 0);
    RipsGraph gd = rips_tuple(td, 1);
    RipsGraph line(z_line(-4, 4, "L"), 1);
    for (std::int64_t x = -4; x <= 4; ++x)
        for (std::int64_t y = -4; y <= 4; ++y) {
            Point tx(Point::Tuple{Point::lattice({x}), Point::lattice({x})});
            Point ty(Point::Tuple{Point::lattice({y}), Point::lattice({y})});
            CHECK(gd.distance(tx, ty) == line.distance(Point::lattice({x}), Point::lattice({y})));
        }

    DiagramSpec impossible = two_lines_one_arrow(0, 4, 4, keep);
    // at kappa=0 the clamp-shifted arrow only fixes the top point; tuples exist
    CHECK_THROWS_AS(rips_tuple(TupleSpace{}, 1), SpaceError);
}

TEST_CASE("cone validation and factorization through the tuples") {
    std::vector<SpaceHandle> keep;
    DiagramSpec d = two_lines_one_arrow(-6, 6, 0, keep);
    auto apex = z_line(-6, 6, "W");

    ConeSpec cone;
    cone.apex = apex;
    cone.legs = {identity_map(apex, d.objects[0].space), identity_map(apex, d.objects[1].space)};
    cone.uniform_control = ControlFn::affine(1, 0);
    cone.commutativity_bound = 0;
    Certificate vc = validate_uc_cone(cone, d);
    CHECK(vc.passed());
    CHECK(vc.at("kappa_cone") == ExtDist(0));

    TupleSpace t = tuple_space(d, 0);
    auto cf = cone_factorization(cone, d, t, 1);
    CHECK(cf.certificate.passed());
    CHECK(cf.upper.a == Rational(1));
    CHECK(cf.upper.b == Rational(0));
    // post-composition with each projection returns the legs exactly
    for (int w = 0; w < apex->window_size(); ++w) {
        const auto& tup = cf.induced.apply_index(w).tuple();
        CHECK(tup[0] == cone.legs[0].apply_index(w));
        CHECK(tup[1] == cone.legs[1].apply_index(w));
    }

    // legs off by a shift of 3 on one side: kappa_cone = 3
    auto shifted = make_map_table_fn("s3", apex, d.objects[1].space, [](const Point& p) {
        std::int64_t x = std::clamp<std::int64_t>(p.coords()[0] + 3, -6, 6);
        return Point(Point::Coords{x});
    });
    ConeSpec off = cone;
    off.legs[1] = shifted;
    off.commutativity_bound = 3;
    Certificate voff = validate_uc_cone(off, d);
    CHECK(voff.passed());
    CHECK(voff.at("kappa_cone") == ExtDist(3));
    // tuples at kappa=0 cannot absorb the shifted cone
    CHECK_THROWS_AS(cone_factorization(off, d, t, 1), SpaceError);
    // but the kappa=3 tuples can
    TupleSpace t3 = tuple_space(d, 3);
    CHECK(cone_factorization(off, d, t3, 1).certificate.passed());
}

TEST_CASE("uniqueness bound between factorizations") {
    std::vector<SpaceHandle> keep;
    DiagramSpec d = two_lines_one_arrow(-5, 5, 0, keep);
    auto apex = z_line(-5, 5, "W");
    ConeSpec cone;
    cone.apex = apex;
    cone.legs = {identity_map(apex, d.objects[0].space), identity_map(apex, d.objects[1].space)};
    cone.uniform_control = ControlFn::affine(1, 0);
    cone.commutativity_bound = 1;

    TupleSpace t = tuple_space(d, 1);
    auto h1 = cone_factorization(cone, d, t, 1).induced;
    Certificate same = uniqueness_check(h1, h1, cone, t, 1);
    CHECK(same.passed());
    CHECK(same.at("closeness_bound") == ExtDist(0));

    // a one-step perturbation inside the band
    std::vector<Point> perturbed = h1.values;
    for (auto& p : perturbed) {
        auto tup = p.tuple();
        std::int64_t x = tup[1].coords()[0];
        if (x < 5) {
            tup[1] = Point(Point::Coords{x + 1});
            p = Point(tup);
        }
    }
    MapTable h2 = make_map_table("h2", apex, t.space, perturbed);
    Certificate close = uniqueness_check(h1, h2, cone, t, 1);
    CHECK(close.passed());
    CHECK(close.at("closeness_bound") == ExtDist(1));
}

TEST_CASE("tuple stability table mirrors the equaliser semantics") {
    std::vector<SpaceHandle> keep;
    // no arrows: constant tuple space, all radii zero
    auto a = z_line(0, 3, "A");
    DiagramSpec d0;
    d0.objects = {DiagramObject{"A", a}};
    auto table0 = tuple_stability_report(d0, {0, 1, 2});
    for (const auto& row : table0.rows) CHECK(row.radius == ExtDist(0));
    REQUIRE(table0.threshold.has_value());
    CHECK(*table0.threshold == Rational(0));

    // diagonal constraint: the band widens, radii grow along the grid
    DiagramSpec d = two_lines_one_arrow(-8, 8, 0, keep);
    auto table = tuple_stability_report(d, {0, 2, 4});
    auto radius = [&](long x, long y) {
        for (const auto& row : table.rows)
            if (row.kappa == Rational(x) && row.kappa_prime == Rational(y)) return row.radius;
        return ExtDist::inf();
    };
    CHECK(radius(0, 0) == ExtDist(0));
    CHECK(radius(0, 2) == ExtDist(1));
    CHECK(radius(0, 4) == ExtDist(2));
    CHECK(radius(2, 4) == ExtDist(1));
}

TEST_CASE("retraction transport: identity and the even sublattice") {
    std::vector<SpaceHandle> keep;
    DiagramSpec d = two_lines_one_arrow(-8, 8, 0, keep);

    // identity retraction: kappa' = rho(kappa) bookkeeping only
    std::vector<MapTable> ids = {identity_map(d.objects[0].space, d.objects[0].space),
                                 identity_map(d.objects[1].space, d.objects[1].space)};
    TupleSpace t = tuple_space(d, 0);
    auto rt = retraction_transport(d, d, ids, ids, 0, 0, ControlFn::affine(1, 0), t, 1);
    CHECK(rt.certificate.passed());
    CHECK(rt.kappa_prime == Rational(0));
    CHECK(rt.sigma_prime == Rational(1));
    CHECK(rt.transported.size() == t.size());

    // Z -> 2Z floor-even with the inclusion back, K = 1
    auto evens = even_line(-8, 8, "E");
    DiagramSpec dp;
    dp.objects = {DiagramObject{"A", evens}, DiagramObject{"B", evens}};
    dp.arrows.push_back(DiagramArrow{"ab", 0, 1, identity_map(evens, evens)});
    auto floor_even = [](const Point& p) {
        std::int64_t x = p.coords()[0];
        std::int64_t e = x >= 0 ? x - (x % 2) : x - ((x % 2) ? 2 + (x % 2) : 0);
        return Point(Point::Coords{e});
    };
    std::vector<MapTable> alpha = {
        make_map_table_fn("alpha", d.objects[0].space, evens, floor_even),
        make_map_table_fn("alpha", d.objects[1].space, evens, floor_even)};
    std::vector<MapTable> omega = {identity_map(evens, d.objects[0].space),
                                   identity_map(evens, d.objects[1].space)};
    ControlFn rho = ControlFn::affine(1, 1);
    auto rt2 = retraction_transport(d, dp, alpha, omega, 1, 1, rho, t, 1);
    CHECK(rt2.certificate.passed());
    // the formulas on the given constants: kappa' = 2K + rho(kappa), sigma' = max(rho(sigma), K)
    CHECK(rt2.kappa_prime == Rational(2) * 1 + rho.eval(0));
    CHECK(rt2.sigma_prime == rat_max(rho.eval(1), Rational(1)));
    CHECK(rt2.retraction_deviation == Rational(0));

    // a map family that is not controlled by rho is rejected during replay
    CHECK_THROWS_AS(retraction_transport(d, dp, alpha, omega, 1, 1, ControlFn::affine(1, 0), t, 1),
                    SpaceError);
}
