#include "coarseforge/diagram.hpp"

#include "coarseforge/checks.hpp"
#include "coarseforge/parallel.hpp"
#include "coarseforge/rng.hpp"

#include <algorithm>
#include <numeric>

namespace coarseforge {

int DiagramSpec::object_index(const std::string& name) const {
    for (int i = 0; i < static_cast<int>(objects.size()); ++i)
        if (objects[i].name == name) return i;
    return -1;
}

namespace {

void validate_diagram_shape(const DiagramSpec& d) {
    if (d.objects.empty()) throw SpaceError("BadInput", "diagram needs at least one object");
    for (const auto& arr : d.arrows) {
        if (arr.src < 0 || arr.dst < 0 || arr.src >= static_cast<int>(d.objects.size()) ||
            arr.dst >= static_cast<int>(d.objects.size()))
            throw SpaceError("BadInput", "arrow endpoints out of range");
        if (arr.bonding.src->window != d.objects[arr.src].space->window)
            throw SpaceError("MismatchedSpaces",
                             "bonding map of arrow " + arr.id + " not defined on its source window");
        for (const auto& v : arr.bonding.values)
            if (d.objects[arr.dst].space->window_index_of(v) < 0)
                throw SpaceError("MismatchedSpaces",
                                 "bonding map of arrow " + arr.id + " escapes the target window");
    }
}

Point tuple_point_of(const DiagramSpec& d, const std::vector<int>& assignment) {
    Point::Tuple parts;
    parts.reserve(assignment.size());
    for (size_t j = 0; j < assignment.size(); ++j)
        parts.push_back(d.objects[j].space->window[assignment[j]]);
    return Point(std::move(parts));
}

SpaceHandle tuple_ambient(const DiagramSpec& d, std::vector<Point> window, const std::string& tag) {
    std::vector<SpaceHandle> parts;
    for (const auto& o : d.objects) parts.push_back(o.space);
    return make_product_linf_space("tuples_" + tag, std::move(parts), std::move(window));
}

/// d(x_dst, beta(x_src)) for one arrow, by window indices.
ExtDist arrow_deviation(const DiagramSpec& d, const DiagramArrow& arr, int src_idx, int dst_idx) {
    const Point& image = arr.bonding.apply_index(src_idx);
    return d.objects[arr.dst].space->distance(d.objects[arr.dst].space->window[dst_idx], image);
}

}  // namespace

Certificate validate_uc_diagram(const DiagramSpec& d) {
    validate_diagram_shape(d);
    if (d.uniform_control) {
        Certificate cert = make_pass("uc_diagram");
        for (const auto& arr : d.arrows) {
            Certificate c = check_upper_control(arr.bonding, *d.uniform_control);
            if (!c.passed()) {
                c.check = "uc_diagram";
                c.notes["arrow"] = arr.id;
                return c;
            }
        }
        cert.notes["control"] = d.uniform_control->describe();
        return cert;
    }
    // fit mode: per-arrow envelopes, combined by the componentwise max (the
    // least affine control shared by every arrow on these windows)
    AffineFit common{0, 0};
    for (const auto& arr : d.arrows) {
        const auto& src = *arr.bonding.src;
        const auto& dst = *arr.bonding.dst;
        std::vector<std::pair<Rational, Rational>> samples;
        for (int i = 0; i < src.window_size(); ++i)
            for (int j = i + 1; j < src.window_size(); ++j) {
                ExtDist ds = src.distance_by_index(i, j);
                ExtDist dd = dst.distance(arr.bonding.apply_index(i), arr.bonding.apply_index(j));
                if (ds.is_finite() && dd.is_inf()) {
                    Certificate cert = make_fail("uc_diagram");
                    cert.notes["arrow"] = arr.id;
                    cert.notes["violated"] = "extended-metric convention";
                    cert.witness = Witness{{src.window[i], src.window[j]}, {{"d_src", ds}, {"d_dst", dd}}};
                    return cert;
                }
                if (ds.is_finite() && dd.is_finite()) samples.emplace_back(ds.finite(), dd.finite());
            }
        if (!samples.empty()) {
            AffineFit fit = fit_affine_upper_control(samples);
            common.a = rat_max(common.a, fit.a);
            common.b = rat_max(common.b, fit.b);
        }
    }
    Certificate cert = make_pass("uc_diagram");
    if (d.arrows.empty()) common = AffineFit{1, 0};
    cert.set("fitted_a", ExtDist(common.a));
    cert.set("fitted_b", ExtDist(common.b));
    cert.notes["control"] = "fitted";
    return cert;
}

GammaDelta codomain_domain_maps(const DiagramSpec& d, long product_budget) {
    validate_diagram_shape(d);
    long total = 1;
    for (const auto& o : d.objects) {
        total *= o.space->window_size();
        if (total > product_budget)
            throw SpaceError("ProductTooLarge",
                             "object product exceeds the budget; use tuple_space instead");
    }
    // full product window by odometer, lexicographic in object order
    std::vector<Point> product_window;
    std::vector<int> idx(d.objects.size(), 0);
    for (long c = 0; c < total; ++c) {
        product_window.push_back(tuple_point_of(d, idx));
        for (int j = static_cast<int>(idx.size()) - 1; j >= 0; --j) {
            if (++idx[j] < d.objects[j].space->window_size()) break;
            idx[j] = 0;
        }
    }
    GammaDelta gd;
    gd.object_product = tuple_ambient(d, product_window, "product");

    std::vector<SpaceHandle> cod_parts;
    for (const auto& arr : d.arrows) cod_parts.push_back(d.objects[arr.dst].space);

    auto project = [&](const Point& tuple, bool domain) {
        Point::Tuple out;
        out.reserve(d.arrows.size());
        for (const auto& arr : d.arrows) {
            if (domain) out.push_back(arr.bonding.apply(tuple.tuple()[arr.src]));
            else out.push_back(tuple.tuple()[arr.dst]);
        }
        return Point(std::move(out));
    };

    std::vector<Point> gamma_vals, delta_vals, cod_window;
    for (const auto& x : product_window) {
        gamma_vals.push_back(project(x, false));
        delta_vals.push_back(project(x, true));
    }
    cod_window = gamma_vals;
    for (const auto& p : delta_vals) cod_window.push_back(p);
    std::sort(cod_window.begin(), cod_window.end());
    cod_window.erase(std::unique(cod_window.begin(), cod_window.end()), cod_window.end());
    if (cod_window.empty()) cod_window.push_back(Point(Point::Tuple{}));
    gd.codomain_product =
        make_product_linf_space("codomain_product", cod_parts, std::move(cod_window));

    gd.gamma = make_map_table("gamma", gd.object_product, gd.codomain_product, std::move(gamma_vals));
    gd.delta = make_map_table("delta", gd.object_product, gd.codomain_product, std::move(delta_vals));

    // replay on sampled product pairs: gamma 1-Lipschitz, delta within the
    // declared (or implied) uniform control
    Rng rng(7);
    const long n = static_cast<long>(product_window.size());
    long checks = std::min<long>(2000, n * (n - 1) / 2);
    ControlFn delta_control =
        d.uniform_control ? *d.uniform_control : ControlFn::affine(1, 0);
    for (long c = 0; c < checks; ++c) {
        long i = static_cast<long>(rng.below(n)), j = static_cast<long>(rng.below(n));
        if (i == j) continue;
        ExtDist dx = gd.object_product->distance_by_index(static_cast<int>(i), static_cast<int>(j));
        if (dx.is_inf()) continue;
        ExtDist dg = gd.codomain_product->distance(gd.gamma.apply_index(static_cast<int>(i)),
                                                   gd.gamma.apply_index(static_cast<int>(j)));
        if (!(dg <= dx)) throw SpaceError("BadInput", "gamma failed its 1-Lipschitz replay");
        ExtDist dd = gd.codomain_product->distance(gd.delta.apply_index(static_cast<int>(i)),
                                                   gd.delta.apply_index(static_cast<int>(j)));
        if (!d.arrows.empty() && dd.is_finite() && dx.is_finite() &&
            !(dd.finite() <= delta_control.eval(dx.finite())))
            throw SpaceError("BadInput", "delta escaped the diagram's uniform control in replay");
    }
    return gd;
}

TupleSpace tuple_space(const DiagramSpec& d, const Rational& kappa, long node_budget) {
    validate_diagram_shape(d);
    const int m = static_cast<int>(d.objects.size());

    // domains, pre-sorted by point order
    std::vector<std::vector<int>> domain(m);
    for (int j = 0; j < m; ++j) {
        domain[j].resize(d.objects[j].space->window_size());
        std::iota(domain[j].begin(), domain[j].end(), 0);
        const auto& w = d.objects[j].space->window;
        std::sort(domain[j].begin(), domain[j].end(), [&](int a, int b) { return w[a] < w[b]; });
    }

    auto satisfies = [&](const DiagramArrow& arr, int src_idx, int dst_idx) {
        return arrow_deviation(d, arr, src_idx, dst_idx) <= ExtDist(kappa);
    };

    // arc-consistency to fixpoint: drop values with no support across an arrow
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& arr : d.arrows) {
            auto& ds = domain[arr.src];
            auto& dt = domain[arr.dst];
            std::vector<int> keep;
            for (int x : ds) {
                bool ok = false;
                for (int y : dt)
                    if (satisfies(arr, x, y)) {
                        ok = true;
                        break;
                    }
                if (ok) keep.push_back(x);
            }
            if (keep.size() != ds.size()) {
                ds = std::move(keep);
                changed = true;
            }
            keep.clear();
            for (int y : dt) {
                bool ok = false;
                for (int x : ds)
                    if (satisfies(arr, x, y)) {
                        ok = true;
                        break;
                    }
                if (ok) keep.push_back(y);
            }
            if (keep.size() != dt.size()) {
                dt = std::move(keep);
                changed = true;
            }
        }
    }

    // arrows grouped by the later-assigned endpoint for early checking
    std::vector<std::vector<const DiagramArrow*>> checks_at(m);
    for (const auto& arr : d.arrows) checks_at[std::max(arr.src, arr.dst)].push_back(&arr);

    TupleSpace out;
    out.diagram = &d;
    out.kappa = kappa;
    std::vector<int> assignment(m, -1);
    long nodes = 0;

    std::function<void(int)> backtrack = [&](int j) {
        if (j == m) {
            out.tuples.push_back(assignment);
            return;
        }
        for (int cand : domain[j]) {
            if (++nodes > node_budget)
                throw SpaceError("Overflow", "tuple enumeration exceeded its node budget");
            assignment[j] = cand;
            bool ok = true;
            for (const auto* arr : checks_at[j]) {
                if (!satisfies(*arr, assignment[arr->src], assignment[arr->dst])) {
                    ok = false;
                    break;
                }
            }
            if (ok) backtrack(j + 1);
        }
        assignment[j] = -1;
    };
    backtrack(0);

    std::vector<Point> window;
    window.reserve(out.tuples.size());
    for (const auto& t : out.tuples) window.push_back(tuple_point_of(d, t));
    out.space = tuple_ambient(d, std::move(window), "kappa_" + rat_str(kappa));

    // on small products, replay the enumeration against brute-force filtering
    long product = 1;
    bool small = true;
    for (const auto& o : d.objects) {
        product *= o.space->window_size();
        if (product > 10000) {
            small = false;
            break;
        }
    }
    if (small) {
        auto oracle = tuple_space_bruteforce(d, kappa, 10000);
        auto mine = out.tuples;
        std::sort(mine.begin(), mine.end());
        std::sort(oracle.begin(), oracle.end());
        if (mine != oracle)
            throw SpaceError("BadInput", "tuple enumeration disagrees with its brute-force oracle");
    }
    return out;
}

std::vector<std::vector<int>> tuple_space_bruteforce(const DiagramSpec& d, const Rational& kappa,
                                                     long product_budget) {
    validate_diagram_shape(d);
    long total = 1;
    for (const auto& o : d.objects) {
        total *= o.space->window_size();
        if (total > product_budget)
            throw SpaceError("ProductTooLarge", "brute-force oracle restricted to small products");
    }
    std::vector<std::vector<int>> out;
    std::vector<int> idx(d.objects.size(), 0);
    for (long c = 0; c < total; ++c) {
        bool ok = true;
        for (const auto& arr : d.arrows)
            if (!(arrow_deviation(d, arr, idx[arr.src], idx[arr.dst]) <= ExtDist(kappa))) {
                ok = false;
                break;
            }
        if (ok) out.push_back(idx);
        for (int j = static_cast<int>(idx.size()) - 1; j >= 0; --j) {
            if (++idx[j] < d.objects[j].space->window_size()) break;
            idx[j] = 0;
        }
    }
    return out;
}

RipsGraph rips_tuple(const TupleSpace& t, const Rational& sigma) {
    if (t.tuples.empty()) throw SpaceError("EmptyTupleSpace", "no consistent tuples at this kappa");
    return RipsGraph(t.space, sigma);
}

Certificate validate_uc_cone(const ConeSpec& c, const DiagramSpec& d) {
    validate_diagram_shape(d);
    if (c.legs.size() != d.objects.size())
        throw SpaceError("BadInput", "cone needs one leg per diagram object");
    Certificate cert = make_pass("uc_cone");
    for (size_t j = 0; j < c.legs.size(); ++j) {
        if (c.legs[j].src->window != c.apex->window)
            throw SpaceError("MismatchedSpaces", "cone leg not defined on the apex window");
        Certificate ctrl = check_upper_control(c.legs[j], c.uniform_control);
        if (!ctrl.passed()) {
            ctrl.check = "uc_cone";
            ctrl.notes["leg"] = d.objects[j].name;
            return ctrl;
        }
    }
    // legs must land in the object windows so bonding maps can replay
    for (size_t j = 0; j < c.legs.size(); ++j)
        for (const auto& v : c.legs[j].values)
            if (d.objects[j].space->window_index_of(v) < 0)
                throw SpaceError("MismatchedSpaces", "cone leg escapes the object window");

    ExtDist kappa_cone(0);
    std::optional<Witness> worst;
    for (const auto& arr : d.arrows) {
        for (int w = 0; w < c.apex->window_size(); ++w) {
            const Point& via = arr.bonding.apply(c.legs[arr.src].apply_index(w));
            ExtDist dev = d.objects[arr.dst].space->distance(c.legs[arr.dst].apply_index(w), via);
            if (kappa_cone < dev) {
                kappa_cone = dev;
                worst = Witness{{c.apex->window[w]}, {{"deviation", dev}}};
                worst->data["arrow"] = ExtDist(0);
            }
        }
    }
    // product-map route must reproduce the same constant exactly
    ExtDist product_route(0);
    for (int w = 0; w < c.apex->window_size(); ++w) {
        ExtDist dev(0);
        for (const auto& arr : d.arrows) {
            const Point& via = arr.bonding.apply(c.legs[arr.src].apply_index(w));
            dev = ext_max(dev, d.objects[arr.dst].space->distance(c.legs[arr.dst].apply_index(w), via));
        }
        product_route = ext_max(product_route, dev);
    }
    if (!(product_route == kappa_cone)) {
        cert.verdict = Verdict::Inconclusive;
        cert.notes["warning"] = "product-map route disagrees with the per-arrow route";
        return cert;
    }
    cert.set("kappa_cone", kappa_cone);
    cert.set("declared_bound", ExtDist(c.commutativity_bound));
    if (!(kappa_cone <= ExtDist(c.commutativity_bound))) {
        cert.verdict = Verdict::Fail;
        cert.witness = worst;
    }
    return cert;
}

ConeFactorization cone_factorization(const ConeSpec& c, const DiagramSpec& d, const TupleSpace& t,
                                     const Rational& sigma) {
    if (c.legs.size() != d.objects.size())
        throw SpaceError("BadInput", "cone needs one leg per diagram object");
    ConeFactorization out;
    std::vector<Point> values;
    values.reserve(c.apex->window.size());
    for (int w = 0; w < c.apex->window_size(); ++w) {
        Point::Tuple parts;
        for (const auto& leg : c.legs) parts.push_back(leg.apply_index(w));
        Point tuple(std::move(parts));
        if (t.space->window_index_of(tuple) < 0)
            throw SpaceError("KappaTooSmall", "image tuple violates a constraint at apex point " +
                                                  point_str(c.apex->window[w]));
        values.push_back(std::move(tuple));
    }
    out.induced = make_map_table("cone_factor", c.apex, t.space, std::move(values));

    RipsGraph rips(t.space, sigma);
    rips.ensure_all_rows();
    std::vector<std::pair<Rational, Rational>> samples;
    Certificate cert = make_pass("cone_factorization");
    for (int i = 0; i < c.apex->window_size(); ++i) {
        int ti = t.space->window_index_of(out.induced.apply_index(i));
        const auto& row = rips.row(ti);
        for (int j = i + 1; j < c.apex->window_size(); ++j) {
            ExtDist da = c.apex->distance_by_index(i, j);
            int tj = t.space->window_index_of(out.induced.apply_index(j));
            if (da.is_inf()) continue;
            if (row[tj] < 0) {
                cert.verdict = Verdict::Fail;
                cert.notes["violated"] = "induced map disconnects a finite-distance pair at this scale";
                cert.witness = Witness{{c.apex->window[i], c.apex->window[j]}, {{"d_apex", da}}};
                out.certificate = cert;
                return out;
            }
            samples.emplace_back(da.finite(), Rational(row[tj]));
        }
    }
    if (!samples.empty()) {
        out.upper = fit_affine_upper_control(samples);
        cert.set("upper_a", ExtDist(out.upper.a));
        cert.set("upper_b", ExtDist(out.upper.b));
    }
    out.certificate = cert;
    return out;
}

Certificate uniqueness_check(const MapTable& h1, const MapTable& h2, const ConeSpec& c,
                             const TupleSpace& t, const Rational& sigma) {
    if (h1.src->window != h2.src->window)
        throw SpaceError("MismatchedSpaces", "factorizations need a shared apex window");
    RipsGraph rips(t.space, sigma);
    Certificate cert = make_pass("uniqueness");
    // how far each candidate strays from the cone legs, per object, max over apex
    ExtDist cone_dev(0);
    for (size_t j = 0; j < c.legs.size(); ++j) {
        for (int w = 0; w < h1.src->window_size(); ++w) {
            for (const MapTable* h : {&h1, &h2}) {
                const Point& tuple = h->apply_index(w);
                const Point& comp = tuple.tuple()[j];
                cone_dev = ext_max(cone_dev,
                                   c.legs[j].dst->distance(comp, c.legs[j].apply_index(w)));
            }
        }
    }
    cert.set("cone_deviation", cone_dev);

    ExtDist bound(0);
    std::optional<int> worst;
    for (int w = 0; w < h1.src->window_size(); ++w) {
        int a = t.space->window_index_of(h1.apply_index(w));
        int b = t.space->window_index_of(h2.apply_index(w));
        if (a < 0 || b < 0)
            throw SpaceError("UnknownPoint", "factorization image is not a tuple");
        ExtDist dd = rips.distance_by_index(a, b);
        if (bound < dd) {
            bound = dd;
            worst = w;
        }
    }
    cert.set("closeness_bound", bound);
    if (bound.is_inf()) {
        cert.verdict = Verdict::Fail;
        if (worst) cert.witness = Witness{{h1.src->window[*worst]}, {}};
    }
    return cert;
}

EqStabilityTable tuple_stability_report(const DiagramSpec& d,
                                        const std::vector<Rational>& kappa_grid,
                                        long node_budget) {
    if (kappa_grid.empty()) throw SpaceError("BadInput", "empty kappa grid");
    std::vector<Rational> grid(kappa_grid);
    std::sort(grid.begin(), grid.end());

    std::vector<TupleSpace> spaces;
    for (const auto& k : grid) spaces.push_back(tuple_space(d, k, node_budget));

    // ambient: the largest tuple set (superset of the others by monotonicity)
    const TupleSpace& big = spaces.back();
    std::vector<std::vector<int>> sets(grid.size());
    for (size_t a = 0; a < grid.size(); ++a) {
        for (size_t ti = 0; ti < spaces[a].tuples.size(); ++ti) {
            int idx = big.space->window_index_of(spaces[a].space->window[ti]);
            if (idx < 0) throw SpaceError("BadInput", "tuple monotonicity violated");
            sets[a].push_back(idx);
        }
    }

    EqStabilityTable table;
    std::vector<std::vector<ExtDist>> radii(grid.size(),
                                            std::vector<ExtDist>(grid.size(), ExtDist(0)));
    for (size_t a = 0; a < grid.size(); ++a) {
        for (size_t b = a; b < grid.size(); ++b) {
            ExtDist r = (sets[a].empty() && sets[b].empty())
                            ? ExtDist(0)
                            : directed_hausdorff(*big.space, sets[a], sets[b]);
            radii[a][b] = r;
            table.rows.push_back(StabilityRow{grid[a], grid[b], r});
        }
    }
    for (size_t a = 0; a < grid.size(); ++a) {
        bool finite = true;
        for (size_t b = a; b < grid.size(); ++b) finite = finite && radii[a][b].is_finite();
        if (!finite) continue;
        if (grid.size() - a >= 2 && radii[a][grid.size() - 1] == radii[a][grid.size() - 2]) {
            table.threshold = grid[a];
            break;
        }
    }
    return table;
}

RetractionTransport retraction_transport(const DiagramSpec& d, const DiagramSpec& d_prime,
                                         const std::vector<MapTable>& alpha,
                                         const std::vector<MapTable>& omega, const Rational& K,
                                         const Rational& naturality_bound, const ControlFn& rho,
                                         const TupleSpace& t, const Rational& sigma) {
    if (alpha.size() != d.objects.size() || omega.size() != d_prime.objects.size() ||
        d.objects.size() != d_prime.objects.size())
        throw SpaceError("BadInput", "retraction families need one map per object");
    for (size_t j = 0; j < alpha.size(); ++j) {
        if (alpha[j].src->window != d.objects[j].space->window ||
            omega[j].src->window != d_prime.objects[j].space->window)
            throw SpaceError("MismatchedSpaces",
                             "retraction family maps must live on the object windows");
    }
    if (naturality_bound > K)
        throw SpaceError("BadInput", "per-arrow naturality bound must not exceed K");
    if (d.arrows.size() != d_prime.arrows.size())
        throw SpaceError("BadInput", "diagrams must share their arrow shape");

    const int m = static_cast<int>(d.objects.size());
    // replay: alpha_j o omega_j within K of the identity on each primed object
    for (int j = 0; j < m; ++j) {
        const auto& wj = d_prime.objects[j].space->window;
        for (int y = 0; y < static_cast<int>(wj.size()); ++y) {
            const Point& back = omega[j].apply_index(y);
            int bi = d.objects[j].space->window_index_of(back);
            if (bi < 0)
                throw SpaceError("PreconditionReplayFailed",
                                 "omega escapes the window of object " + d.objects[j].name);
            ExtDist dev = d_prime.objects[j].space->distance(alpha[j].apply_index(bi), wj[y]);
            if (!(dev <= ExtDist(K)))
                throw SpaceError("PreconditionReplayFailed",
                                 "alpha o omega strays " + ext_str(dev) + " > K on object " +
                                     d.objects[j].name);
        }
    }
    // replay: per-arrow coarse naturality within the bound
    for (size_t a = 0; a < d.arrows.size(); ++a) {
        const auto& arr = d.arrows[a];
        const auto& arrp = d_prime.arrows[a];
        if (arr.src != arrp.src || arr.dst != arrp.dst)
            throw SpaceError("BadInput", "diagrams must share their arrow shape");
        const auto& src_window = d.objects[arr.src].space->window;
        for (int x = 0; x < static_cast<int>(src_window.size()); ++x) {
            const Point& via_alpha = alpha[arr.src].apply_index(x);
            int ai = d_prime.objects[arr.src].space->window_index_of(via_alpha);
            if (ai < 0)
                throw SpaceError("PreconditionReplayFailed", "alpha escapes the primed window");
            const Point& lhs = arrp.bonding.apply_index(ai);  // beta' o alpha
            const Point& mid = arr.bonding.apply_index(x);
            int mi = d.objects[arr.dst].space->window_index_of(mid);
            const Point& rhs = alpha[arr.dst].apply_index(mi);  // alpha o beta
            ExtDist dev = d_prime.objects[arr.dst].space->distance(lhs, rhs);
            if (!(dev <= ExtDist(naturality_bound)))
                throw SpaceError("PreconditionReplayFailed",
                                 "naturality strays " + ext_str(dev) + " on arrow " + arr.id);
        }
    }
    // replay: rho upper-controls every alpha component
    for (int j = 0; j < m; ++j) {
        Certificate ctrl = check_upper_control(alpha[j], rho);
        if (!ctrl.passed())
            throw SpaceError("PreconditionReplayFailed",
                             "rho is not an upper control for alpha on object " + d.objects[j].name);
    }

    RetractionTransport out;
    out.kappa_prime = 2 * K + rho.eval(t.kappa);
    out.sigma_prime = rat_max(rho.eval(sigma), K);
    out.transported = tuple_space(d_prime, out.kappa_prime);

    // componentwise alpha on tuples
    std::vector<Point> values;
    values.reserve(t.tuples.size());
    for (const auto& tup : t.tuples) {
        Point::Tuple parts;
        for (int j = 0; j < m; ++j) parts.push_back(alpha[j].apply_index(tup[j]));
        Point p(std::move(parts));
        if (out.transported.space->window_index_of(p) < 0)
            throw SpaceError("PreconditionReplayFailed",
                             "transported tuple misses Tuple_kappa' (constant bookkeeping broke)");
        values.push_back(std::move(p));
    }
    out.induced = make_map_table("retraction_transport", t.space, out.transported.space,
                                 std::move(values));

    Certificate cert = make_pass("retraction_transport");
    cert.set("kappa_prime", ExtDist(out.kappa_prime));
    cert.set("sigma_prime", ExtDist(out.sigma_prime));
    cert.set("K", ExtDist(K));

    // 1-Lipschitz into Rips_{sigma'}: every tuple edge maps to an edge or a vertex
    RipsGraph source_rips(t.space, sigma);
    for (int i = 0; i < source_rips.n(); ++i) {
        for (int j : source_rips.adjacency()[i]) {
            if (j <= i) continue;
            ExtDist dd = out.transported.space->distance(out.induced.apply_index(i),
                                                         out.induced.apply_index(j));
            if (!(dd <= ExtDist(out.sigma_prime))) {
                cert.verdict = Verdict::Fail;
                cert.notes["violated"] = "edge image exceeds sigma'";
                cert.witness = Witness{{t.space->window[i], t.space->window[j]}, {{"image_gap", dd}}};
                out.certificate = cert;
                return out;
            }
        }
    }
    // retraction identity on the transported tuples
    ExtDist worst(0);
    for (size_t y = 0; y < out.transported.tuples.size(); ++y) {
        const auto& tup = out.transported.tuples[y];
        Point::Tuple back_parts, round_parts;
        for (int j = 0; j < m; ++j) {
            const Point& yj = d_prime.objects[j].space->window[tup[j]];
            int yi = d_prime.objects[j].space->window_index_of(yj);
            const Point& back = omega[j].apply_index(yi);
            int bi = d.objects[j].space->window_index_of(back);
            round_parts.push_back(alpha[j].apply_index(bi));
            back_parts.push_back(yj);
        }
        ExtDist dev = out.transported.space->distance(Point(round_parts), Point(back_parts));
        worst = ext_max(worst, dev);
    }
    out.retraction_deviation = worst.is_finite() ? worst.finite() : Rational(0);
    cert.set("retraction_deviation", worst);
    if (!(worst <= ExtDist(K))) {
        cert.verdict = Verdict::Fail;
        cert.notes["violated"] = "retraction identity on the transported tuples";
    }
    out.certificate = cert;
    return out;
}

}  // namespace coarseforge
