#include "coarseforge/scenarios.hpp"

#include "coarseforge/rng.hpp"

#include <algorithm>

#include <chrono>

namespace coarseforge {

namespace {

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double elapsed() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

ScenarioResult finish(ScenarioResult res, const Timer& t) {
    res.seconds = t.elapsed();
    if (res.pass && res.budget_seconds > 0 && res.seconds >= res.budget_seconds) {
        res.pass = false;
        res.detail += " [runtime budget exceeded]";
    }
    res.report["elapsed_seconds"] = res.seconds;
    res.report["pass"] = res.pass;
    return res;
}

}  // namespace

ScenarioResult scenario_rips_closed_form() {
    Timer t;
    ScenarioResult res;
    res.name = "rips-closed-form";
    res.budget_seconds = 1.0;
    auto z1 = z_line(-64, 64);
    auto inner = inner_window_indices(*z1, 10);
    res.pass = true;
    for (long sigma : {1L, 2L, 3L, 5L}) {
        RipsGraph g(z1, Rational(sigma));
        g.ensure_all_rows();
        for (size_t a = 0; a < inner.size() && res.pass; ++a) {
            const auto& row = g.row(inner[a]);
            for (size_t b = a + 1; b < inner.size(); ++b) {
                int j = inner[b];
                Rational d = z1->distance_by_index(inner[a], j).finite();
                BigInt expect = rat_ceil(d / sigma);
                if (!(Rational(row[j]) == Rational(expect))) {
                    res.pass = false;
                    res.detail = "closed form broke at sigma=" + std::to_string(sigma);
                    break;
                }
            }
        }
    }
    if (res.pass) res.detail = "d_sigma == ceil(|x-y|/sigma) for sigma in {1,2,3,5}";
    res.report["window"] = "[-64,64]";
    return finish(res, t);
}

ScenarioResult scenario_duality_sandwich() {
    Timer t;
    ScenarioResult res;
    res.name = "duality-sandwich";
    res.budget_seconds = 1.0;
    std::vector<ControlFn> rhos = {
        ControlFn::affine(1, 0), ControlFn::affine(2, 1), ControlFn::exp_base(2),
        ControlFn::step_table({{0, 1}, {2, 3}, {5, 8}, {9, 20}, {12, 40}}, /*proper=*/true)};
    std::vector<Rational> grid;
    for (int k = 0; k < 1000; ++k) grid.emplace_back(Rational(k, 8));
    res.pass = true;
    for (const auto& rho : rhos) {
        ControlFn g = ControlFn::inverse_T(rho);
        std::vector<Rational> G, R;
        for (const auto& x : grid) {
            G.push_back(g.eval(x));
            R.push_back(rho.eval(x));
        }
        // monotonicity on the grid (needed to reduce the pairwise equivalence)
        for (size_t i = 0; i + 1 < grid.size() && res.pass; ++i)
            if (G[i] > G[i + 1] || R[i] > R[i + 1]) {
                res.pass = false;
                res.detail = "monotonicity broke for " + rho.describe();
            }
        // duality g(t) <= s <=> t <= rho(s), via the threshold index per t
        for (size_t ti = 0; ti < grid.size() && res.pass; ++ti) {
            size_t lo = 0, hi = grid.size();
            while (lo < hi) {  // least grid index s with G[ti] <= grid[s]
                size_t mid = (lo + hi) / 2;
                if (G[ti] <= grid[mid]) hi = mid;
                else lo = mid + 1;
            }
            if (lo < grid.size() && !(grid[ti] <= R[lo])) {
                res.pass = false;
                res.detail = "duality (=>) broke for " + rho.describe() + " at t=" + rat_str(grid[ti]);
            }
            if (lo > 0 && grid[ti] <= R[lo - 1]) {
                res.pass = false;
                res.detail = "duality (<=) broke for " + rho.describe() + " at t=" + rat_str(grid[ti]);
            }
        }
        // sandwich rho^T(rho(t)) <= t <= rho(rho^T(t))
        for (const auto& x : grid) {
            if (!res.pass) break;
            if (!(g.eval(rho.eval(x)) <= x && x <= rho.eval(g.eval(x)))) {
                res.pass = false;
                res.detail = "sandwich broke for " + rho.describe() + " at t=" + rat_str(x);
            }
        }
    }
    if (res.pass) res.detail = "Galois duality and sandwich exact on a 1000-point grid, 4 controls";
    return finish(res, t);
}

ScenarioResult scenario_cgeodesic() {
    Timer t;
    ScenarioResult res;
    res.name = "cgeodesic";
    res.budget_seconds = 5.0;
    auto rho = ControlFn::affine(1, 1);
    Certificate c1 = cgeodesic_certificate(z_line(-64, 64), 1, rho, 10);
    Certificate c2 = cgeodesic_certificate(z2_box(-8, 8), 1, rho, 10);
    res.pass = c1.passed() && c2.passed();
    res.detail = "Z: " + verdict_str(c1.verdict) + ", Z^2 (l-inf): " + verdict_str(c2.verdict) +
                 " at sigma=1, rho=t+1";
    res.report["z"] = certificate_to_json(c1);
    res.report["z2"] = certificate_to_json(c2);
    return finish(res, t);
}

ScenarioResult scenario_surplus_weight() {
    Timer t;
    ScenarioResult res;
    res.name = "surplus-weight";
    res.budget_seconds = 10.0;
    Certificate c = surplus_weight_check(z_line(-32, 32), ControlFn::exp_base(2),
                                         ControlFn::affine(2, 0), 3, 10);
    res.pass = c.passed();
    res.detail = "weighted Rips at sigma=3 vs sigma=inf: " + verdict_str(c.verdict);
    res.report["certificate"] = certificate_to_json(c);
    return finish(res, t);
}

ScenarioResult scenario_shortcut_negative() {
    Timer t;
    ScenarioResult res;
    res.name = "shortcut-negative";
    res.budget_seconds = 30.0;
    auto theta = ControlFn::exp_base(2);

    auto ray_full = z_line(0, 4096, "ray4096");
    auto shortcut_full = shortcut_metric(ray_full, theta);
    PreorderOptions half;
    half.fit_fraction = Rational(1, 2);
    Certificate fail_cert = metric_preorder_check(shortcut_full, ray_full, ControlClass::Aff, half);

    PreorderOptions whole;
    Certificate full_fit = metric_preorder_check(shortcut_full, ray_full, ControlClass::Aff, whole);

    auto ray_half = z_line(0, 2048, "ray2048");
    auto shortcut_half = shortcut_metric(ray_half, theta);
    Certificate half_fit = metric_preorder_check(shortcut_half, ray_half, ControlClass::Aff, whole);

    bool witnessed = fail_cert.failed() && fail_cert.witness.has_value();
    bool slope_grows = half_fit.at("a") < full_fit.at("a");
    res.pass = witnessed && slope_grows;
    res.detail = "half-window fit misses the full window (" + verdict_str(fail_cert.verdict) +
                 "), slope " + ext_str(half_fit.at("a")) + " -> " + ext_str(full_fit.at("a")) +
                 " when the window doubles";
    res.report["extrapolation"] = certificate_to_json(fail_cert);
    res.report["fit_2048"] = certificate_to_json(half_fit);
    res.report["fit_4096"] = certificate_to_json(full_fit);
    return finish(res, t);
}

ScenarioResult scenario_equalizer_threshold() {
    Timer t;
    ScenarioResult res;
    res.name = "equalizer-threshold";
    res.budget_seconds = 1.0;
    auto z = z_line(-20, 20, "z");
    auto universe = make_lattice_space("zline", 1, LatticeNorm::Linf, z->window);
    MapTable f = identity_map(z, universe);
    MapTable g = make_map_table_fn("shift5", z, universe, [](const Point& p) {
        return Point(Point::Coords{p.coords()[0] + 5});
    });
    std::vector<Rational> grid;
    for (int k = 0; k <= 10; ++k) grid.emplace_back(k);
    res.pass = true;
    for (int k = 0; k <= 10; ++k) {
        auto eq = kappa_equalizer(f, g, Rational(k));
        bool expect_full = k >= 5;
        bool ok = expect_full ? static_cast<int>(eq.members.size()) == z->window_size()
                              : eq.members.empty();
        if (!ok) {
            res.pass = false;
            res.detail = "membership broke at kappa=" + std::to_string(k);
        }
    }
    auto table = equalizer_stability(f, g, grid);
    for (const auto& row : table.rows)
        if (row.kappa == Rational(5) && !(row.radius == ExtDist(0))) {
            res.pass = false;
            res.detail = "r(5,kappa') nonzero";
        }
    if (!(table.threshold && *table.threshold == Rational(5))) {
        res.pass = false;
        res.detail = "threshold is not 5";
    }
    if (res.pass) res.detail = "Eq empty below 5, full from 5; r(5,.) = 0; threshold 5";
    res.report["table"] = stability_table_to_json(table);
    return finish(res, t);
}

namespace {

DiagramSpec random_diagram(Rng& rng, std::vector<SpaceHandle>& keep_alive) {
    DiagramSpec d;
    int objects = 1 + static_cast<int>(rng.below(4));
    for (int j = 0; j < objects; ++j) {
        std::int64_t lo = static_cast<std::int64_t>(rng.below(5));
        std::int64_t len = 1 + static_cast<std::int64_t>(rng.below(10));
        auto sp = z_line(lo, std::min<std::int64_t>(lo + len - 1, lo + 9),
                         "D" + std::to_string(j));
        keep_alive.push_back(sp);
        d.objects.push_back(DiagramObject{"D" + std::to_string(j), sp});
    }
    int arrows = static_cast<int>(rng.below(5));
    for (int a = 0; a < arrows; ++a) {
        int src = static_cast<int>(rng.below(objects));
        int dst = static_cast<int>(rng.below(objects));
        const auto& sw = d.objects[src].space->window;
        const auto& dw = d.objects[dst].space->window;
        std::vector<Point> values;
        for (size_t i = 0; i < sw.size(); ++i) values.push_back(dw[rng.below(dw.size())]);
        d.arrows.push_back(DiagramArrow{"a" + std::to_string(a), src, dst,
                                        make_map_table("b" + std::to_string(a),
                                                       d.objects[src].space, d.objects[dst].space,
                                                       std::move(values))});
    }
    return d;
}

}  // namespace

ScenarioResult scenario_tuple_oracle() {
    Timer t;
    ScenarioResult res;
    res.name = "tuple-oracle";
    res.budget_seconds = 10.0;
    Rng rng(31337);
    res.pass = true;
    int trials = 24;
    for (int trial = 0; trial < trials && res.pass; ++trial) {
        std::vector<SpaceHandle> keep_alive;
        DiagramSpec d = random_diagram(rng, keep_alive);
        for (long kappa : {0L, 1L, 2L}) {
            auto fast = tuple_space(d, Rational(kappa));
            auto slow = tuple_space_bruteforce(d, Rational(kappa));
            std::sort(slow.begin(), slow.end());
            auto fast_sorted = fast.tuples;
            std::sort(fast_sorted.begin(), fast_sorted.end());
            if (fast_sorted != slow) {
                res.pass = false;
                res.detail = "oracle mismatch on trial " + std::to_string(trial) + " at kappa=" +
                             std::to_string(kappa);
                break;
            }
        }
    }
    if (res.pass)
        res.detail = std::to_string(trials) +
                     " random diagrams, kappa in {0,1,2}: pruned enumeration == brute force";
    res.report["trials"] = trials;
    return finish(res, t);
}

ScenarioResult scenario_rips_tuple_z2() {
    Timer t;
    ScenarioResult res;
    res.name = "rips-tuple-z2";
    res.budget_seconds = 30.0;
    PairwiseFamily f = builtin_family("z2-axes");
    TotalSpaceCandidate cand = builtin_candidate(f, "product-linf");
    Certificate inv = validate_total_space_candidate(f, cand);
    HhsQiData data = hhs_qi_certificate(f, cand, 1, 0, 10);
    const auto& qi = data.qi;
    bool exact_constants = qi.upper.a == 1 && qi.upper.b == 0 && qi.lower_rho.a == 1 &&
                           qi.lower_rho.b == 0 && qi.covering_radius == ExtDist(0);
    res.pass = inv.passed() && qi.certificate.passed() && exact_constants;
    res.detail = "upper (" + rat_str(qi.upper.a) + "," + rat_str(qi.upper.b) + "), lower rho (" +
                 rat_str(qi.lower_rho.a) + "," + rat_str(qi.lower_rho.b) + "), covering radius " +
                 ext_str(qi.covering_radius) + " on " + std::to_string(data.tuple_count) + " tuples";
    res.report["certificate"] = certificate_to_json(qi.certificate);
    return finish(res, t);
}

ScenarioResult scenario_realization_z2() {
    Timer t;
    ScenarioResult res;
    res.name = "realization-z2";
    res.budget_seconds = 10.0;
    PairwiseFamily f = builtin_family("z2-axes");
    TotalSpaceCandidate cand = builtin_candidate(f, "product-linf");
    res.pass = true;
    Json grid = Json::array();
    for (long kappa : {0L, 1L, 2L}) {
        RealizationResult r = realization_check(f, cand, Rational(kappa));
        grid.push_back(Json{{"kappa", kappa}, {"r_observed", extdist_to_json(r.r_observed)}});
        bool ok = kappa == 0 ? r.r_observed == ExtDist(0) : r.r_observed <= ExtDist(Rational(kappa));
        if (!ok) {
            res.pass = false;
            res.detail = "r_observed escaped kappa at kappa=" + std::to_string(kappa);
        }
    }
    if (res.pass) res.detail = "r_observed = 0 at kappa = 0 and r_observed <= kappa on {0,1,2}";
    res.report["grid"] = grid;
    return finish(res, t);
}

ScenarioResult scenario_retraction_constants() {
    Timer t;
    ScenarioResult res;
    res.name = "retraction-constants";
    res.budget_seconds = 30.0;
    PairwiseFamily f;
    f.labels = {"U", "V"};
    f.factors = {z_line(-16, 16, "U"), z_line(-16, 16, "V")};
    PairwiseFamily fp;
    fp.labels = {"U", "V"};
    fp.factors = {even_line(-16, 16, "U2"), even_line(-16, 16, "V2")};

    auto floor_even = [](const Point& p) {
        std::int64_t x = p.coords()[0];
        std::int64_t e = x >= 0 ? x - (x % 2) : x - ((x % 2) ? 2 + (x % 2) : 0);
        return Point(Point::Coords{e});
    };
    std::vector<MapTable> alpha, omega;
    for (int u = 0; u < 2; ++u) {
        alpha.push_back(make_map_table_fn("alpha", f.factors[u], fp.factors[u], floor_even));
        omega.push_back(identity_map(fp.factors[u], f.factors[u]));
    }
    ControlFn rho = ControlFn::affine(1, 1);
    RetractionAssembly ra = assemble_retraction(f, fp, alpha, omega, rho, 1, 0);

    // emitted constants must equal the formulas on the certified inputs
    bool formulas_hold = ra.K_prime == ra.K + rho.eval(ra.c) + ra.r &&
                         ra.sigma_prime == rat_max(rho.eval(1) + 2 * ra.r, ra.K_prime) &&
                         ra.kappa_prime == 2 * ra.K + 2 * rho.eval(ra.c) + rho.eval(0) + 4 * ra.r;
    bool expected_inputs = ra.K == 0 && ra.c == 0 && ra.r == 0;
    res.pass = ra.certificate.passed() && formulas_hold && expected_inputs;
    res.detail = "K=" + rat_str(ra.K) + " c=" + rat_str(ra.c) + " r=" + rat_str(ra.r) +
                 " => K'=" + rat_str(ra.K_prime) + " sigma'=" + rat_str(ra.sigma_prime) +
                 " kappa'=" + rat_str(ra.kappa_prime) + "; replay " +
                 verdict_str(ra.certificate.verdict);
    res.report["certificate"] = certificate_to_json(ra.certificate);
    return finish(res, t);
}

ScenarioResult scenario_filtration_invariants() {
    Timer t;
    ScenarioResult res;
    res.name = "filtration-invariants";
    res.budget_seconds = 10.0;
    res.pass = true;
    std::vector<Rational> grid = {1, 2, 3, 5};
    for (const auto& s : builtin_spaces()) {
        std::vector<std::shared_ptr<RipsGraph>> graphs;
        for (const auto& sg : grid) graphs.push_back(std::make_shared<RipsGraph>(s, sg));
        for (auto& g : graphs) g->ensure_all_rows();
        const int n = s->window_size();
        for (size_t a = 0; a + 1 < grid.size() && res.pass; ++a) {
            for (int i = 0; i < n && res.pass; ++i) {
                const auto& row_lo = graphs[a]->row(i);
                const auto& row_hi = graphs[a + 1]->row(i);
                for (int j = 0; j < n; ++j) {
                    // sigma <= tau: d_tau <= d_sigma (with -1 encoding infinity)
                    bool mono = row_lo[j] < 0 || (row_hi[j] >= 0 && row_hi[j] <= row_lo[j]);
                    if (!mono) {
                        res.pass = false;
                        res.detail = "monotonicity broke on " + s->name;
                        break;
                    }
                }
            }
        }
        for (size_t a = 0; a < grid.size() && res.pass; ++a) {
            for (int i = 0; i < n && res.pass; ++i) {
                const auto& row = graphs[a]->row(i);
                for (int j = 0; j < n; ++j) {
                    ExtDist d = s->distance_by_index(i, j);
                    bool lip = row[j] >= 0 ? d <= ExtDist(grid[a] * row[j]) : d.is_inf();
                    if (!lip) {
                        res.pass = false;
                        res.detail = "sigma-Lipschitz bound broke on " + s->name;
                        break;
                    }
                }
            }
        }
    }
    if (res.pass) res.detail = "d_tau <= d_sigma and d <= sigma d_sigma exact on all built-ins";
    return finish(res, t);
}

std::vector<ScenarioResult (*)()> all_scenarios() {
    return {
        scenario_rips_closed_form,    scenario_duality_sandwich, scenario_cgeodesic,
        scenario_surplus_weight,      scenario_shortcut_negative, scenario_equalizer_threshold,
        scenario_tuple_oracle,        scenario_rips_tuple_z2,     scenario_realization_z2,
        scenario_retraction_constants, scenario_filtration_invariants,
    };
}

ScenarioResult run_demo(const std::string& name) {
    if (name == "rips-closed-form") return scenario_rips_closed_form();
    if (name == "duality-sandwich") return scenario_duality_sandwich();
    if (name == "cgeodesic") return scenario_cgeodesic();
    if (name == "surplus-weight") return scenario_surplus_weight();
    if (name == "shortcut-negative") return scenario_shortcut_negative();
    if (name == "equalizer-threshold") return scenario_equalizer_threshold();
    if (name == "tuple-oracle") return scenario_tuple_oracle();
    if (name == "rips-tuple-z2") return scenario_rips_tuple_z2();
    if (name == "realization-z2") return scenario_realization_z2();
    if (name == "retraction-constants") return scenario_retraction_constants();
    if (name == "filtration-invariants") return scenario_filtration_invariants();
    throw SpaceError("UnknownDemo", "no demo named " + name);
}

std::vector<std::string> demo_names() {
    return {"rips-closed-form",  "duality-sandwich",  "cgeodesic",
            "surplus-weight",    "shortcut-negative", "equalizer-threshold",
            "tuple-oracle",      "rips-tuple-z2",     "realization-z2",
            "retraction-constants", "filtration-invariants"};
}

}  // namespace coarseforge
