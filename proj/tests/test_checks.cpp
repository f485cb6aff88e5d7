#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "coarseforge/builtins.hpp"
#include "coarseforge/checks.hpp"
#include "coarseforge/rips.hpp"

using namespace coarseforge;

namespace {

SpaceHandle zline(std::int64_t lo, std::int64_t hi) { return z_line(lo, hi, "z"); }

MapTable doubling(const SpaceHandle& src) {
    auto universe = make_lattice_space("z_univ", 1, LatticeNorm::Linf, src->window);
    return make_map_table_fn("double", src, universe,
                             [](const Point& p) { return Point(Point::Coords{2 * p.coords()[0]}); });
}

}  // namespace

TEST_CASE("upper control certificates") {
    auto z = zline(-10, 10);
    CHECK(check_upper_control(identity_map(z, z), ControlFn::affine(1, 0)).passed());

    MapTable dbl = doubling(z);
    Certificate fail = check_upper_control(dbl, ControlFn::affine(1, 0));
    CHECK(fail.failed());
    REQUIRE(fail.witness.has_value());
    // worst pair is the extreme one; excess = 2|x-y| - |x-y| maximized
    CHECK(fail.witness->data.at("excess") == ExtDist(20));
    CHECK(check_upper_control(dbl, ControlFn::affine(2, 0)).passed());
}

TEST_CASE("lower control certificates and the infinity convention") {
    auto z = zline(-10, 10);
    CHECK(check_lower_control(identity_map(z, z), ControlFn::affine(1, 0)).passed());

    auto universe = make_lattice_space("z_univ", 1, LatticeNorm::Linf, z->window);
    MapTable constant = make_map_table_fn("const", z, universe,
                                          [](const Point&) { return Point::lattice({0}); });
    CHECK(check_lower_control(constant, ControlFn::affine(1, 0)).failed());

    MapTable halve = make_map_table_fn("halve", z, universe, [](const Point& p) {
        std::int64_t x = p.coords()[0];
        std::int64_t h = x >= 0 ? x / 2 : -((-x + 1) / 2);
        return Point(Point::Coords{h});
    });
    // floor-halving admits the lower control inverse_T(2t+1)
    CHECK(check_lower_control(halve, ControlFn::inverse_T(ControlFn::affine(2, 1))).passed());

    // d_src infinite with finite image distance breaks the convention
    auto clusters = builtin_space("two_clusters");
    MapTable collapse = make_map_table_fn("collapse", clusters, clusters,
                                          [](const Point&) { return Point("p0"); });
    Certificate conv = check_lower_control(collapse, ControlFn::affine(1, 0));
    CHECK(conv.failed());
    CHECK(conv.notes.at("violated") == "extended-metric convention");
}

TEST_CASE("closeness certificates") {
    auto z = zline(-10, 10);
    auto universe = make_lattice_space("z_univ", 1, LatticeNorm::Linf, z->window);
    MapTable id = identity_map(z, universe);
    MapTable shift = make_map_table_fn("shift5", z, universe, [](const Point& p) {
        return Point(Point::Coords{p.coords()[0] + 5});
    });
    CHECK(check_closeness(id, id, 0).passed());
    Certificate c5 = check_closeness(id, shift, 5);
    CHECK(c5.passed());
    CHECK(c5.at("max_deviation") == ExtDist(5));
    CHECK(check_closeness(id, shift, 4).failed());
}

TEST_CASE("coarse surjectivity radius") {
    auto z = zline(-8, 8);
    MapTable dbl = doubling(z);
    std::vector<Point> target = z_window(-16, 16);
    Certificate hit = check_coarse_surjectivity(dbl, 1, target);
    CHECK(hit.passed());
    CHECK(hit.at("covering_radius") == ExtDist(1));
    CHECK(check_coarse_surjectivity(dbl, 0, target).failed());
    CHECK(check_coarse_surjectivity(identity_map(z, z), 0, z->window).passed());
}

TEST_CASE("quasi-isometry certificate replays with its constants") {
    auto z = zline(-32, 32);
    auto data = certify_quasi_isometry(identity_map(z, z), 10);
    CHECK(data.certificate.passed());
    CHECK(data.upper.a == Rational(1));
    CHECK(data.upper.b == Rational(0));
    CHECK(data.covering_radius == ExtDist(0));

    auto universe = make_lattice_space("z_univ", 1, LatticeNorm::Linf, z_window(-64, 64));
    MapTable dbl = make_map_table_fn("double", z, universe, [](const Point& p) {
        return Point(Point::Coords{2 * p.coords()[0]});
    });
    auto qi = certify_quasi_isometry(dbl, 10);
    CHECK(qi.certificate.passed());
    CHECK(qi.upper.a == Rational(2));
    // replay the emitted inequalities on the inner window exactly
    auto inner = inner_window_indices(*z, 10);
    for (size_t a = 0; a < inner.size(); ++a)
        for (size_t b = a + 1; b < inner.size(); ++b) {
            Rational ds = z->distance_by_index(inner[a], inner[b]).finite();
            Rational dd = universe
                              ->distance(dbl.apply_index(inner[a]), dbl.apply_index(inner[b]))
                              .finite();
            CHECK(dd <= qi.upper.a * ds + qi.upper.b);
            CHECK(ds <= qi.lower_rho.a * dd + qi.lower_rho.b);
        }

    MapTable collapse = make_map_table_fn("collapse", z, universe,
                                          [](const Point&) { return Point::lattice({0}); });
    CHECK(certify_quasi_isometry(collapse, 10).certificate.failed());
}

TEST_CASE("coarse pullback metric satisfies the sandwich") {
    auto z = zline(-6, 6);
    auto universe = make_lattice_space("z_univ", 1, LatticeNorm::Linf, z->window);
    MapTable constant = make_map_table_fn("const", z, universe,
                                          [](const Point&) { return Point::lattice({0}); });
    SpaceHandle pulled = coarse_pullback_metric(constant);
    // constant map: all off-diagonal distances are max(1, 0) = 1
    CHECK(pulled->distance_by_index(0, 5) == ExtDist(1));
    CHECK(pulled->distance_by_index(3, 3) == ExtDist(0));

    MapTable dbl = doubling(z);
    SpaceHandle pulled2 = coarse_pullback_metric(dbl);
    for (int i = 0; i < z->window_size(); ++i)
        for (int j = i + 1; j < z->window_size(); ++j) {
            Rational dy = universe->distance(dbl.apply_index(i), dbl.apply_index(j)).finite();
            Rational dp = pulled2->distance_by_index(i, j).finite();
            CHECK(dp - 1 <= dy);
            CHECK(dy <= dp);
        }
}

TEST_CASE("metric preorder: reflexive, Rips comparison, transitive replay") {
    auto z = zline(-32, 32);
    Certificate self = metric_preorder_check(z, z, ControlClass::Aff);
    CHECK(self.passed());
    CHECK(self.at("a") == ExtDist(1));
    CHECK(self.at("b") == ExtDist(0));

    // d <= 2 d_2 on the shared window
    RipsGraph g2(z, 2);
    g2.ensure_all_rows();
    std::vector<std::vector<ExtDist>> table(z->window_size(),
                                            std::vector<ExtDist>(z->window_size()));
    for (int i = 0; i < z->window_size(); ++i)
        for (int j = 0; j < z->window_size(); ++j) table[i][j] = g2.distance_by_index(i, j);
    auto d2 = make_explicit_matrix_space("d2", z->window, table);
    Certificate cmp = metric_preorder_check(d2, z, ControlClass::Aff);
    CHECK(cmp.passed());
    CHECK(cmp.at("a") == ExtDist(2));
    CHECK(cmp.at("b") == ExtDist(0));

    // transitivity via composed fitted controls: z <= 2 d_2 and d_2 <= 1 z
    Certificate other = metric_preorder_check(z, d2, ControlClass::Aff);
    CHECK(other.passed());
    auto composed = ControlFn::composed(
        ControlFn::affine(cmp.at("a").finite(), cmp.at("b").finite()),
        ControlFn::affine(other.at("a").finite(), other.at("b").finite()));
    for (int i = 0; i < z->window_size(); ++i)
        for (int j = i + 1; j < z->window_size(); ++j)
            CHECK(z->distance_by_index(i, j).finite() <=
                  composed.eval(z->distance_by_index(i, j).finite()));
}

TEST_CASE("preorder under Poly and All") {
    auto z = zline(-16, 16);
    CHECK(metric_preorder_check(z, z, ControlClass::Poly).passed());
    CHECK(metric_preorder_check(z, z, ControlClass::All).passed());
    // finite-incompatible pair fails even under All
    auto clusters = builtin_space("two_clusters");
    std::vector<std::vector<ExtDist>> flat(10, std::vector<ExtDist>(10, ExtDist(1)));
    for (int i = 0; i < 10; ++i) flat[i][i] = ExtDist(0);
    auto bounded = make_explicit_matrix_space("flat", clusters->window, flat);
    CHECK(metric_preorder_check(bounded, clusters, ControlClass::All).failed());
}

TEST_CASE("extremality of the Rips metric at scale sigma") {
    auto z = zline(-24, 24);
    // candidates: the base metric and the Rips metric at a smaller scale
    RipsGraph g1(z, 1);
    g1.ensure_all_rows();
    std::vector<std::vector<ExtDist>> t1(z->window_size(), std::vector<ExtDist>(z->window_size()));
    for (int i = 0; i < z->window_size(); ++i)
        for (int j = 0; j < z->window_size(); ++j) t1[i][j] = g1.distance_by_index(i, j);
    auto d1 = make_explicit_matrix_space("d1", z->window, t1);

    // d_2 as its own candidate must come back with (1,0)
    RipsGraph g2x(z, 2);
    g2x.ensure_all_rows();
    std::vector<std::vector<ExtDist>> t2(z->window_size(), std::vector<ExtDist>(z->window_size()));
    for (int i = 0; i < z->window_size(); ++i)
        for (int j = 0; j < z->window_size(); ++j) t2[i][j] = g2x.distance_by_index(i, j);
    auto d2self = make_explicit_matrix_space("d2self", z->window, t2);

    auto report = extremality_report(z, 2, {z, d1, d2self}, ControlClass::Aff);
    CHECK(report.maximal);
    REQUIRE(report.entries.size() == 3);
    CHECK(report.entries[0].preorder.passed());
    CHECK(report.entries[1].preorder.at("a") == ExtDist(2));  // d_1 <= 2 d_2
    CHECK(report.entries[2].preorder.at("a") == ExtDist(1));
    CHECK(report.entries[2].preorder.at("b") == ExtDist(0));

    auto mismatched = builtin_space("two_clusters");
    CHECK_THROWS_AS(extremality_report(z, 2, {mismatched}, ControlClass::Aff), SpaceError);
}
