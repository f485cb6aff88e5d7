#include "coarseforge/checks.hpp"

#include "coarseforge/rips.hpp"

#include <algorithm>
#include <functional>

namespace coarseforge {

MapTable make_map_table(std::string name, SpaceHandle src, SpaceHandle dst,
                        std::vector<Point> values) {
    if (values.size() != src->window.size())
        throw SpaceError("BadInput", "map table must be total on the source window");
    for (const auto& v : values)
        if (!dst->resolvable(v))
            throw SpaceError("UnknownPoint", "map value not resolvable in destination: " + point_str(v));
    MapTable m;
    m.name = std::move(name);
    m.src = std::move(src);
    m.dst = std::move(dst);
    m.values = std::move(values);
    return m;
}

MapTable make_map_table_fn(std::string name, SpaceHandle src, SpaceHandle dst,
                           const std::function<Point(const Point&)>& fn) {
    std::vector<Point> values;
    values.reserve(src->window.size());
    for (const auto& p : src->window) values.push_back(fn(p));
    return make_map_table(std::move(name), std::move(src), std::move(dst), std::move(values));
}

MapTable identity_map(SpaceHandle src, SpaceHandle dst) {
    return make_map_table("id", src, dst ? dst : src, src->window);
}

MapTable compose_maps(const MapTable& g, const MapTable& f) {
    std::vector<Point> values;
    values.reserve(f.values.size());
    for (const auto& mid : f.values) values.push_back(g.apply(mid));
    return make_map_table(g.name + "o" + f.name, f.src, g.dst, std::move(values));
}

Certificate check_upper_control(const MapTable& f, const ControlFn& rho) {
    Certificate cert = make_pass("upper_control");
    const int n = f.src->window_size();
    std::optional<Rational> worst;  // largest d_dst - rho(d_src)
    std::optional<std::pair<int, int>> worst_pair;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            ExtDist ds = f.src->distance_by_index(i, j);
            ExtDist dd = f.dst->distance(f.apply_index(i), f.apply_index(j));
            if (dd.is_inf()) {
                if (ds.is_finite()) {
                    cert.verdict = Verdict::Fail;
                    cert.notes["violated"] = "extended-metric convention";
                    cert.witness = Witness{{f.src->window[i], f.src->window[j]},
                                           {{"d_src", ds}, {"d_dst", dd}}};
                    return cert;
                }
                continue;
            }
            if (ds.is_inf()) continue;
            Rational slack = dd.finite() - rho.eval(ds.finite());
            if (!worst || slack > *worst ||
                (slack == *worst && worst_pair &&
                 std::make_pair(f.src->window[i], f.src->window[j]) <
                     std::make_pair(f.src->window[worst_pair->first], f.src->window[worst_pair->second]))) {
                worst = slack;
                worst_pair = {i, j};
            }
        }
    }
    if (worst && *worst > 0) {
        cert.verdict = Verdict::Fail;
        cert.witness = Witness{
            {f.src->window[worst_pair->first], f.src->window[worst_pair->second]},
            {{"d_src", f.src->distance_by_index(worst_pair->first, worst_pair->second)},
             {"d_dst", f.dst->distance(f.apply_index(worst_pair->first), f.apply_index(worst_pair->second))},
             {"excess", ExtDist(*worst)}}};
        return cert;
    }
    if (worst) cert.set("max_slack", ExtDist(-*worst));
    return cert;
}

Certificate check_lower_control(const MapTable& f, const ControlFn& rho_lower) {
    Certificate cert = make_pass("lower_control");
    const int n = f.src->window_size();
    std::optional<Rational> worst;  // largest rho(d_src) - d_dst
    std::optional<std::pair<int, int>> worst_pair;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            ExtDist ds = f.src->distance_by_index(i, j);
            ExtDist dd = f.dst->distance(f.apply_index(i), f.apply_index(j));
            if (ds.is_inf()) {
                if (dd.is_finite()) {
                    cert.verdict = Verdict::Fail;
                    cert.notes["violated"] = "extended-metric convention";
                    cert.witness = Witness{{f.src->window[i], f.src->window[j]},
                                           {{"d_src", ds}, {"d_dst", dd}}};
                    return cert;
                }
                continue;
            }
            if (dd.is_inf()) continue;
            Rational slack = rho_lower.eval(ds.finite()) - dd.finite();
            if (!worst || slack > *worst) {
                worst = slack;
                worst_pair = {i, j};
            }
        }
    }
    if (worst && *worst > 0) {
        cert.verdict = Verdict::Fail;
        cert.witness = Witness{
            {f.src->window[worst_pair->first], f.src->window[worst_pair->second]},
            {{"d_src", f.src->distance_by_index(worst_pair->first, worst_pair->second)},
             {"d_dst", f.dst->distance(f.apply_index(worst_pair->first), f.apply_index(worst_pair->second))},
             {"deficit", ExtDist(*worst)}}};
        return cert;
    }
    if (worst) cert.set("max_slack", ExtDist(-*worst));
    return cert;
}

Certificate check_closeness(const MapTable& f, const MapTable& g, const Rational& kappa) {
    if (f.src->window != g.src->window)
        throw SpaceError("MismatchedSpaces", "closeness needs a shared source window");
    Certificate cert = make_pass("closeness");
    ExtDist worst(0);
    std::optional<int> worst_at;
    for (int i = 0; i < f.src->window_size(); ++i) {
        ExtDist d = f.dst->distance(f.apply_index(i), g.apply_index(i));
        if (worst < d) {
            worst = d;
            worst_at = i;
        }
    }
    cert.set("max_deviation", worst);
    cert.set("kappa", ExtDist(kappa));
    if (!(worst <= ExtDist(kappa))) {
        cert.verdict = Verdict::Fail;
        cert.witness = Witness{{f.src->window[*worst_at]}, {{"deviation", worst}}};
    }
    return cert;
}

Certificate check_coarse_surjectivity(const MapTable& f, const Rational& r,
                                      const std::vector<Point>& target_window) {
    Certificate cert = make_pass("coarse_surjectivity");
    ExtDist radius(0);
    std::optional<Point> worst;
    for (const auto& y : target_window) {
        ExtDist nearest = ExtDist::inf();
        for (const auto& img : f.values) nearest = ext_min(nearest, f.dst->distance(y, img));
        if (radius < nearest) {
            radius = nearest;
            worst = y;
        }
    }
    cert.set("covering_radius", radius);
    cert.set("r", ExtDist(r));
    if (!(radius <= ExtDist(r))) {
        cert.verdict = Verdict::Fail;
        if (worst) cert.witness = Witness{{*worst}, {{"nearest_image", radius}}};
    }
    return cert;
}

QuasiIsometryData certify_quasi_isometry(const MapTable& f, int margin_percent) {
    QuasiIsometryData out;
    auto inner_src = inner_window_indices(*f.src, margin_percent);
    if (inner_src.empty()) throw SpaceError("EmptyInnerWindow", "margin leaves no inner window");
    Certificate cert = make_pass("quasi_isometry");
    cert.notes["margin_percent"] = std::to_string(margin_percent);

    std::vector<std::pair<Rational, Rational>> up_samples, low_samples;
    for (size_t a = 0; a < inner_src.size(); ++a) {
        for (size_t b = a + 1; b < inner_src.size(); ++b) {
            int i = inner_src[a], j = inner_src[b];
            ExtDist ds = f.src->distance_by_index(i, j);
            ExtDist dd = f.dst->distance(f.apply_index(i), f.apply_index(j));
            if (ds.is_inf() != dd.is_inf()) {
                cert.verdict = Verdict::Fail;
                cert.notes["violated"] = "extended-metric convention";
                cert.witness = Witness{{f.src->window[i], f.src->window[j]},
                                       {{"d_src", ds}, {"d_dst", dd}}};
                out.certificate = cert;
                return out;
            }
            if (ds.is_inf()) continue;
            if (dd.finite() == 0 && ds.finite() > 0) {
                cert.verdict = Verdict::Fail;
                cert.notes["violated"] = "lower control (collapsed pair)";
                cert.witness = Witness{{f.src->window[i], f.src->window[j]},
                                       {{"d_src", ds}, {"d_dst", dd}}};
                out.certificate = cert;
                return out;
            }
            up_samples.emplace_back(ds.finite(), dd.finite());
            low_samples.emplace_back(dd.finite(), ds.finite());
        }
    }
    if (!up_samples.empty()) {
        out.upper = fit_affine_upper_control(up_samples);
        out.lower_rho = fit_affine_upper_control(low_samples);
    }

    auto inner_dst = inner_window_indices(*f.dst, margin_percent);
    ExtDist radius(0);
    for (int t : inner_dst) {
        const Point& y = f.dst->window[t];
        ExtDist nearest = ExtDist::inf();
        for (const auto& img : f.values) nearest = ext_min(nearest, f.dst->distance(y, img));
        radius = ext_max(radius, nearest);
    }
    out.covering_radius = radius;
    if (radius.is_inf()) {
        cert.verdict = Verdict::Fail;
        cert.notes["violated"] = "coarse surjectivity";
    }
    cert.set("upper_a", ExtDist(out.upper.a));
    cert.set("upper_b", ExtDist(out.upper.b));
    cert.set("lower_rho_a", ExtDist(out.lower_rho.a));
    cert.set("lower_rho_b", ExtDist(out.lower_rho.b));
    cert.set("covering_radius", radius);
    out.certificate = cert;
    return out;
}

SpaceHandle coarse_pullback_metric(const MapTable& f) {
    const int n = f.src->window_size();
    std::vector<std::vector<ExtDist>> d(n, std::vector<ExtDist>(n, ExtDist(0)));
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            ExtDist dy = f.dst->distance(f.apply_index(i), f.apply_index(j));
            ExtDist dp = dy.is_inf() ? ExtDist::inf() : ExtDist(rat_max(Rational(1), dy.finite()));
            d[i][j] = dp;
            d[j][i] = dp;
        }
    }
    auto space = make_explicit_matrix_space(f.src->name + "_pullback", f.src->window, d);
    // replay the sandwich d' - 1 <= d_dst(fx, fx') <= d' on every pair
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            ExtDist dy = f.dst->distance(f.apply_index(i), f.apply_index(j));
            ExtDist dp = space->distance_by_index(i, j);
            bool ok;
            if (dp.is_inf()) ok = dy.is_inf();
            else ok = dy.is_finite() && dp.finite() - 1 <= dy.finite() && dy.finite() <= dp.finite();
            if (!ok) throw SpaceError("BadInput", "pullback sandwich replay failed");
        }
    }
    return space;
}

namespace {

/// Deterministic pair policy: all pairs when cheap, otherwise all pairs among
/// a stride subsample that always contains the window's first and last point.
std::vector<int> preorder_points(int n, long pair_budget) {
    std::vector<int> pts;
    long all_pairs = static_cast<long>(n) * (n - 1) / 2;
    if (all_pairs <= pair_budget) {
        for (int i = 0; i < n; ++i) pts.push_back(i);
        return pts;
    }
    long target = std::max<long>(3, static_cast<long>(std::sqrt(2.0 * pair_budget)));
    long stride = std::max<long>(1, (n + target - 1) / target);
    for (int i = 0; i < n; i += stride) pts.push_back(i);
    if (pts.back() != n - 1) pts.push_back(n - 1);
    return pts;
}

}  // namespace

Certificate metric_preorder_check(const SpaceHandle& d_hi, const SpaceHandle& d_lo,
                                  ControlClass cls, const PreorderOptions& opts) {
    if (d_hi->window != d_lo->window)
        throw SpaceError("MismatchedSpaces", "preorder check needs a shared window");
    const int n = d_hi->window_size();
    Certificate cert = make_pass("metric_preorder");
    cert.notes["class"] = class_name(cls);

    auto pts = preorder_points(n, opts.pair_budget);
    cert.notes["pair_policy"] = (static_cast<long>(n) * (n - 1) / 2 <= opts.pair_budget)
                                    ? "exhaustive"
                                    : "stride-subsampled (" + std::to_string(pts.size()) + " points)";

    // fit window: first fit_fraction of the window by order
    int fit_limit = n;
    if (opts.fit_fraction < 1) {
        Rational lim = opts.fit_fraction * n;
        fit_limit = static_cast<int>(rat_ceil(lim).convert_to<long>());
        cert.notes["fit_window"] = "first " + std::to_string(fit_limit) + " of " +
                                   std::to_string(n) + " window points";
    }

    std::vector<std::pair<Rational, Rational>> fit_samples;
    struct PairSample {
        int i, j;
        ExtDist hi, lo;
    };
    std::vector<PairSample> check_samples;
    for (size_t a = 0; a < pts.size(); ++a) {
        for (size_t b = a + 1; b < pts.size(); ++b) {
            int i = pts[a], j = pts[b];
            ExtDist hi = d_hi->distance_by_index(i, j);
            ExtDist lo = d_lo->distance_by_index(i, j);
            if (hi.is_finite() && lo.is_inf()) {
                cert.verdict = Verdict::Fail;
                cert.notes["violated"] = "finite-compatibility";
                cert.witness = Witness{{d_hi->window[i], d_hi->window[j]},
                                       {{"d_hi", hi}, {"d_lo", lo}}};
                return cert;
            }
            if (hi.is_inf()) continue;
            check_samples.push_back({i, j, hi, lo});
            if (i < fit_limit && j < fit_limit) fit_samples.emplace_back(hi.finite(), lo.finite());
        }
    }
    if (cls == ControlClass::All) {
        cert.notes["control"] = "finite-compatible; any window envelope works under All";
        return cert;
    }
    if (fit_samples.empty()) {
        cert.verdict = Verdict::Inconclusive;
        cert.notes["reason"] = "no finite pairs in the fit window";
        return cert;
    }

    ControlFn control;
    if (cls == ControlClass::Aff) {
        AffineFit fit = fit_affine_upper_control(fit_samples);
        cert.set("a", ExtDist(fit.a));
        cert.set("b", ExtDist(fit.b));
        control = ControlFn::affine(fit.a, fit.b);
    } else {
        auto coeffs = fit_poly_upper_control(fit_samples, opts.poly_degree);
        cert.set("c0", ExtDist(coeffs.front()));
        cert.set("ck", ExtDist(coeffs.back()));
        cert.notes["degree"] = std::to_string(opts.poly_degree);
        control = ControlFn::polynomial(coeffs);
    }

    std::optional<Rational> worst;
    std::optional<std::pair<int, int>> worst_pair;
    for (const auto& smp : check_samples) {
        Rational excess = smp.lo.finite() - control.eval(smp.hi.finite());
        if (!worst || excess > *worst) {
            worst = excess;
            worst_pair = {smp.i, smp.j};
        }
    }
    if (worst && *worst > 0) {
        cert.verdict = Verdict::Fail;
        cert.notes["violated"] = "fitted control does not extend to the full window";
        cert.witness = Witness{{d_hi->window[worst_pair->first], d_hi->window[worst_pair->second]},
                               {{"d_hi", d_hi->distance_by_index(worst_pair->first, worst_pair->second)},
                                {"d_lo", d_lo->distance_by_index(worst_pair->first, worst_pair->second)},
                                {"excess", ExtDist(*worst)}}};
    }
    return cert;
}

ExtremalityReport extremality_report(const SpaceHandle& d, const Rational& sigma,
                                     const std::vector<SpaceHandle>& candidates,
                                     ControlClass cls, const PreorderOptions& opts) {
    // materialize the Rips metric at scale sigma over the shared window
    RipsGraph g(d, sigma);
    g.ensure_all_rows();
    const int n = d->window_size();
    std::vector<std::vector<ExtDist>> table(n, std::vector<ExtDist>(n, ExtDist(0)));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) table[i][j] = g.distance_by_index(i, j);
    auto d_sigma = make_explicit_matrix_space(d->name + "_rips" + rat_str(sigma), d->window, table);

    ExtremalityReport report;
    for (const auto& cand : candidates) {
        if (cand->window != d->window)
            throw SpaceError("CandidateNotCoarselyEquivalent", "candidate on a different window");
        // window-level coarse equivalence: matching infinity pattern
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (d->distance_by_index(i, j).is_inf() != cand->distance_by_index(i, j).is_inf())
                    throw SpaceError("CandidateNotCoarselyEquivalent",
                                     "candidate metric has a different infinity pattern");
        ExtremalityEntry entry;
        entry.candidate = cand->name;
        entry.preorder = metric_preorder_check(d_sigma, cand, cls, opts);
        report.maximal = report.maximal && entry.preorder.passed();
        report.entries.push_back(std::move(entry));
    }
    return report;
}

}  // namespace coarseforge
