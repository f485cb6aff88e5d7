#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "coarseforge/builtins.hpp"
#include "coarseforge/rips.hpp"

using namespace coarseforge;

TEST_CASE("rips adjacency matches the definition") {
    auto z = z_line(-8, 8);
    RipsGraph g(z, 2);
    int zero = z->window_index_of(Point::lattice({0}));
    // neighbours of 0 at sigma=2: -2,-1,1,2
    CHECK(g.adjacency()[zero].size() == 4);
    for (int nb : g.adjacency()[zero]) {
        Rational d = z->distance_by_index(zero, nb).finite();
        CHECK(d <= Rational(2));
        CHECK(d > Rational(0));
    }
    // sigma = 0: the empty graph
    RipsGraph g0(z, 0);
    for (const auto& nb : g0.adjacency()) CHECK(nb.empty());
}

TEST_CASE("two far clusters split into components") {
    auto s = builtin_space("two_clusters");
    RipsGraph g(s, 3);
    CHECK(g.distance(Point("p0"), Point("p3")) == ExtDist(1));
    CHECK(g.distance(Point("p0"), Point("p7")).is_inf());
}

TEST_CASE("rips distance: BFS equals the ceiling closed form on Z") {
    auto z = z_line(-16, 16);
    RipsGraph g2(z, 2);
    CHECK(g2.distance(Point::lattice({0}), Point::lattice({5})) == ExtDist(3));
    RipsGraph g1(z, 1);
    for (long n : {1L, 4L, 9L})
        CHECK(g1.distance(Point::lattice({0}), Point::lattice({n})) == ExtDist(Rational(n)));
    for (long sigma : {1L, 2L, 3L}) {
        RipsGraph g(z, Rational(sigma));
        for (int i = 0; i < z->window_size(); ++i)
            for (int j = 0; j < z->window_size(); ++j) {
                Rational d = z->distance_by_index(i, j).finite();
                CHECK(g.distance_by_index(i, j) == ExtDist(Rational(rat_ceil(d / sigma))));
            }
    }
}

TEST_CASE("sigma-rho path verification") {
    auto z = z_line(-8, 8);
    auto rho = ControlFn::affine(1, 1);
    std::vector<Point> good{Point::lattice({0}), Point::lattice({1}), Point::lattice({2}),
                            Point::lattice({3})};
    CHECK(verify_sigma_rho_path(z, good, 1, rho).passed());

    std::vector<Point> jump{Point::lattice({0}), Point::lattice({5})};
    Certificate cj = verify_sigma_rho_path(z, jump, 1, rho);
    CHECK(cj.failed());
    CHECK(cj.notes.at("violated") == "upper");

    std::vector<Point> backtrack{Point::lattice({0}), Point::lattice({1}), Point::lattice({0}),
                                 Point::lattice({1})};
    Certificate cb = verify_sigma_rho_path(z, backtrack, 1, rho);
    CHECK(cb.failed());
    CHECK(cb.notes.at("violated") == "lower");
    CHECK(cb.witness->data.at("j") == ExtDist(0));
    CHECK(cb.witness->data.at("k") == ExtDist(2));
}

TEST_CASE("path search finds verified geodesics") {
    auto z = z_line(-8, 8);
    RipsGraph g(z, 2);
    auto rho = ControlFn::affine(2, 0);
    auto res = find_sigma_rho_path(g, Point::lattice({0}), Point::lattice({5}), rho);
    CHECK(res.found);
    CHECK(res.path.size() == 4);  // three Rips steps
    CHECK(res.path.front() == Point::lattice({0}));
    CHECK(res.path.back() == Point::lattice({5}));
    CHECK(verify_sigma_rho_path(z, res.path, 2, rho).passed());
    // the canonical even-step path also verifies
    std::vector<Point> canonical{Point::lattice({0}), Point::lattice({2}), Point::lattice({4}),
                                 Point::lattice({5})};
    CHECK(verify_sigma_rho_path(z, canonical, 2, rho).passed());

    auto self = find_sigma_rho_path(g, Point::lattice({3}), Point::lattice({3}), rho);
    CHECK(self.found);
    CHECK(self.path.size() == 1);

    auto clusters = builtin_space("two_clusters");
    RipsGraph gc(clusters, 1);
    CHECK_THROWS_AS(find_sigma_rho_path(gc, Point("p0"), Point("p7"), rho), SpaceError);

    // finite distance but no Rips path at this scale: NotFound, not an error
    std::vector<Point> pts{Point("a"), Point("b")};
    std::vector<std::vector<ExtDist>> dm{{ExtDist(0), ExtDist(10)}, {ExtDist(10), ExtDist(0)}};
    auto gap = make_explicit_matrix_space("gap", pts, dm);
    RipsGraph gg(gap, 3);
    auto miss = find_sigma_rho_path(gg, Point("a"), Point("b"), rho);
    CHECK_FALSE(miss.found);
    CHECK(miss.certificate.notes.at("reason").find("NotFound") == 0);
}

TEST_CASE("geodesic certificates on lattices, negative on the shortcut space") {
    auto rho = ControlFn::affine(1, 1);
    CHECK(cgeodesic_certificate(z_line(-24, 24), 1, rho, 10).passed());
    CHECK(cgeodesic_certificate(z2_box(-5, 5), 1, rho, 10).passed());
    // geodesic graphs pass at sigma = 1, rho = t + 1
    CHECK(cgeodesic_certificate(builtin_space("path64"), 1, rho, 10).passed());
    CHECK(cgeodesic_certificate(builtin_space("star"), 1, rho, 10).passed());

    // shortcut-remetrised ray: fails for any affine rho at fixed sigma once
    // the window is long enough
    auto ray = z_line(0, 512, "ray");
    auto shortcut = shortcut_metric(ray, ControlFn::exp_base(2));
    Certificate c = cgeodesic_certificate(shortcut, 2, ControlFn::affine(8, 8), 10);
    CHECK(c.failed());
}

TEST_CASE("filtration sweep reports evidence on Z and flags bounded windows") {
    auto z = z_line(-32, 32);
    auto rep = filtration_sweep(z, {1, 2, 4}, 10);
    REQUIRE(rep.consecutive_fits.size() == 2);
    CHECK(rep.consecutive_fits[0].a == Rational(2));
    CHECK(rep.consecutive_fits[0].b == Rational(0));
    CHECK(rep.consecutive_fits[1].a == Rational(2));
    CHECK(rep.consecutive_fits[1].b == Rational(0));
    CHECK(rep.evidence);
    CHECK(rep.evidence_scale == Rational(1));

    // bounded space: beyond the diameter every Rips graph is complete
    auto small = z_line(0, 3, "small");
    auto rep2 = filtration_sweep(small, {1, 3, 4, 5}, 0);
    CHECK(rep2.evidence);
    CHECK(rep2.evidence_scale == Rational(3));
}

TEST_CASE("weighted rips: weights, distances, and the unweighted reduction") {
    auto z = z_line(-8, 8);
    WeightedRipsGraph g(z, ControlFn::exp_base(2), std::nullopt, false);
    int zero = z->window_index_of(Point::lattice({0}));
    int three = z->window_index_of(Point::lattice({3}));
    CHECK(g.edge_weight(zero, three).value() == Rational(8));
    // three unit edges of weight 2 beat one weight-8 edge
    CHECK(g.distance_by_index(zero, three) == ExtDist(6));

    // constant weight 1 reduces to the unweighted Rips metric
    WeightedRipsGraph unit(z, ControlFn::affine(0, 1), Rational(2), false);
    RipsGraph plain(z, 2);
    for (int i = 0; i < z->window_size(); ++i)
        for (int j = 0; j < z->window_size(); ++j)
            CHECK(unit.distance_by_index(i, j) == plain.distance_by_index(i, j));

    // weight below one is rejected without the clamp
    CHECK_THROWS_AS(WeightedRipsGraph(z, ControlFn::affine(0, Rational(1, 2)), std::nullopt, false),
                    SpaceError);
}

TEST_CASE("subgraph monotonicity of weighted distances") {
    auto z = z_line(-10, 10);
    WeightedRipsGraph sigma2(z, ControlFn::exp_base(2), Rational(2), false);
    WeightedRipsGraph sigma4(z, ControlFn::exp_base(2), Rational(4), false);
    WeightedRipsGraph inf(z, ControlFn::exp_base(2), std::nullopt, false);
    for (int i = 0; i < z->window_size(); ++i)
        for (int j = 0; j < z->window_size(); ++j) {
            CHECK(sigma4.distance_by_index(i, j) <= sigma2.distance_by_index(i, j));
            CHECK(inf.distance_by_index(i, j) <= sigma4.distance_by_index(i, j));
        }
}

TEST_CASE("weight control certificate, including the corrupted negative") {
    auto z = z_line(-8, 8);
    CHECK(weight_control_check(z, ControlFn::exp_base(2), 10).passed());
    // theta == 1 on a unit-step space: equality on adjacent pairs
    Certificate unit = weight_control_check(z, ControlFn::affine(0, 1), 10);
    CHECK(unit.passed());
    CHECK(unit.at("max_slack") == ExtDist(0));

    WeightedRipsGraph corrupted(z, ControlFn::exp_base(2), std::nullopt, false);
    corrupted.corrupt_weight_for_test(0, 1, Rational(1000000));
    CHECK(weight_control_check_graph(corrupted, 0).failed());
}

TEST_CASE("surplus weight: isometry, trivial scale, and failing hypothesis") {
    auto z = z_line(-16, 16);
    Certificate ok = surplus_weight_check(z, ControlFn::exp_base(2), ControlFn::affine(2, 0), 3, 10);
    CHECK(ok.passed());

    // sigma beyond the diameter: the same edge set, trivially isometric
    Certificate trivial =
        surplus_weight_check(z, ControlFn::exp_base(2), ControlFn::affine(2, 0), 40, 10);
    CHECK(trivial.passed());

    Certificate bad = surplus_weight_check(z, ControlFn::exp_base(2), ControlFn::affine(2, 0), 1, 10);
    CHECK(bad.verdict == Verdict::Inconclusive);
    CHECK(bad.notes.at("reason").find("HypothesisUnverified") == 0);
}

TEST_CASE("shortcut metric compresses the ray logarithmically") {
    auto ray = z_line(0, 1023, "ray");
    auto theta = ControlFn::exp_base(2);
    auto shortcut = shortcut_metric(ray, theta);
    ExtDist d = shortcut->distance(Point::lattice({0}), Point::lattice({1023}));
    REQUIRE(d.is_finite());
    CHECK(d.finite() <= ControlFn::perp(theta).eval(1023) + 1);
    // a concrete affine violation at the doubled pair
    CHECK(Rational(10) * ControlFn::perp(theta).eval(1024) + 10 < Rational(1024));
    CHECK_THROWS_AS(shortcut_metric(builtin_space("two_clusters"), theta), SpaceError);

    // identity-like weight on a unit-step graph: d' coincides with d up to the clamp
    auto path = z_line(0, 12, "p");
    auto same = shortcut_metric(path, ControlFn::affine(1, 0));
    for (int i = 0; i < path->window_size(); ++i)
        for (int j = i + 1; j < path->window_size(); ++j)
            CHECK(same->distance_by_index(i, j) == path->distance_by_index(i, j));
}
