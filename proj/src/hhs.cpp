#include "coarseforge/hhs.hpp"

#include "coarseforge/parallel.hpp"
#include "coarseforge/rng.hpp"

#include <algorithm>
#include <numeric>

namespace coarseforge {

int PairwiseFamily::label_index(const std::string& label) const {
    for (int i = 0; i < static_cast<int>(labels.size()); ++i)
        if (labels[i] == label) return i;
    return -1;
}

const PairConstraint& PairwiseFamily::constraint(int i, int j) const {
    static const PairConstraint full{};
    auto it = constraints.find({std::min(i, j), std::max(i, j)});
    return it == constraints.end() ? full : it->second;
}

ExtDist PairwiseFamily::constraint_distance(int i, int j, const Point& xu, const Point& xv) const {
    if (i > j) return constraint_distance(j, i, xv, xu);
    const PairConstraint& c = constraint(i, j);
    const Space& su = *factors[i];
    const Space& sv = *factors[j];
    switch (c.kind) {
        case PairConstraint::Kind::Full:
            return ExtDist(0);
        case PairConstraint::Kind::Diagonal: {
            ExtDist best = ExtDist::inf();
            for (const auto& a : su.window) {
                if (sv.window_index_of(a) < 0) continue;
                best = ext_min(best, ext_max(su.distance(xu, a), sv.distance(xv, a)));
                if (best == ExtDist(0)) break;
            }
            return best;
        }
        case PairConstraint::Kind::Band: {
            // 1-d lattice factors over interval windows: moving both
            // coordinates toward each other closes the gap at twice the cost
            Rational gap = rat_abs(Rational(xu.coords()[0]) - Rational(xv.coords()[0]));
            if (gap <= c.band) return ExtDist(0);
            return ExtDist(Rational(rat_ceil((gap - c.band) / 2)));
        }
        case PairConstraint::Kind::Points: {
            ExtDist best = ExtDist::inf();
            for (const auto& [pu, pv] : c.points) {
                best = ext_min(best, ext_max(su.distance(xu, pu), sv.distance(xv, pv)));
                if (best == ExtDist(0)) break;
            }
            return best;
        }
    }
    return ExtDist::inf();
}

std::vector<std::pair<Point, Point>> PairwiseFamily::constraint_pairs(int i, int j) const {
    std::vector<std::pair<Point, Point>> out;
    const Space& su = *factors[i];
    const Space& sv = *factors[j];
    for (const auto& a : su.window)
        for (const auto& b : sv.window)
            if (constraint_distance(i, j, a, b) == ExtDist(0)) out.emplace_back(a, b);
    return out;
}

Certificate validate_total_space_candidate(const PairwiseFamily& f, const TotalSpaceCandidate& t) {
    if (t.projections.size() != f.factors.size())
        throw SpaceError("BadInput", "candidate needs one projection per factor");
    Certificate cert = make_pass("total_space_candidate");
    for (size_t u = 0; u < f.factors.size(); ++u) {
        if (t.projections[u].src->window != t.space->window)
            throw SpaceError("MismatchedSpaces", "projection not defined on the candidate window");
        for (const auto& v : t.projections[u].values)
            if (f.factors[u]->window_index_of(v) < 0)
                throw SpaceError("MismatchedSpaces", "projection escapes the factor window");
    }
    for (size_t u = 0; u < f.factors.size(); ++u) {
        for (size_t v = u + 1; v < f.factors.size(); ++v) {
            for (int w = 0; w < t.space->window_size(); ++w) {
                ExtDist dev = f.constraint_distance(static_cast<int>(u), static_cast<int>(v),
                                                    t.projections[u].apply_index(w),
                                                    t.projections[v].apply_index(w));
                if (!(dev == ExtDist(0))) {
                    cert.verdict = Verdict::Fail;
                    cert.notes["violated"] = "projections leave constraint " + f.labels[u] + "," +
                                             f.labels[v];
                    cert.witness = Witness{{t.space->window[w]}, {{"deviation", dev}}};
                    return cert;
                }
            }
        }
    }
    return cert;
}

DiagramSpec encode_pairwise_diagram(const PairwiseFamily& f) {
    DiagramSpec d;
    for (size_t u = 0; u < f.factors.size(); ++u)
        d.objects.push_back(DiagramObject{f.labels[u], f.factors[u]});
    for (size_t u = 0; u < f.factors.size(); ++u) {
        for (size_t v = u + 1; v < f.factors.size(); ++v) {
            auto pairs = f.constraint_pairs(static_cast<int>(u), static_cast<int>(v));
            std::vector<Point> window;
            std::vector<Point> proj_u, proj_v;
            window.reserve(pairs.size());
            for (const auto& [a, b] : pairs) {
                window.push_back(Point(Point::Tuple{a, b}));
                proj_u.push_back(a);
                proj_v.push_back(b);
            }
            auto pair_space = make_product_linf_space(
                f.labels[u] + "|" + f.labels[v], {f.factors[u], f.factors[v]}, std::move(window));
            int sec = static_cast<int>(d.objects.size());
            d.objects.push_back(DiagramObject{f.labels[u] + "|" + f.labels[v], pair_space});
            d.arrows.push_back(DiagramArrow{
                "proj_" + f.labels[u] + "|" + f.labels[v] + "_to_" + f.labels[u], sec,
                static_cast<int>(u),
                make_map_table("beta_u", pair_space, f.factors[u], std::move(proj_u))});
            d.arrows.push_back(DiagramArrow{
                "proj_" + f.labels[u] + "|" + f.labels[v] + "_to_" + f.labels[v], sec,
                static_cast<int>(v),
                make_map_table("beta_v", pair_space, f.factors[v], std::move(proj_v))});
        }
    }
    d.uniform_control = ControlFn::affine(1, 0);
    Certificate check = validate_uc_diagram(d);
    if (!check.passed())
        throw SpaceError("BadInput", "pairwise encoding failed its 1-Lipschitz replay");
    return d;
}

namespace {

/// Enumerate primary tuples whose pairs sit within kappa of every constraint.
std::vector<std::vector<int>> enumerate_hatted(const PairwiseFamily& f, const Rational& kappa,
                                               long node_budget) {
    const int m = static_cast<int>(f.factors.size());
    std::vector<std::vector<int>> domain(m);
    for (int j = 0; j < m; ++j) {
        domain[j].resize(f.factors[j]->window_size());
        std::iota(domain[j].begin(), domain[j].end(), 0);
        const auto& w = f.factors[j]->window;
        std::sort(domain[j].begin(), domain[j].end(), [&](int a, int b) { return w[a] < w[b]; });
    }
    auto pair_ok = [&](int u, int v, int xu, int xv) {
        return f.constraint_distance(u, v, f.factors[u]->window[xu], f.factors[v]->window[xv]) <=
               ExtDist(kappa);
    };
    // arc-consistency over constrained pairs
    bool changed = true;
    while (changed) {
        changed = false;
        for (int u = 0; u < m; ++u) {
            for (int v = u + 1; v < m; ++v) {
                if (f.constraint(u, v).kind == PairConstraint::Kind::Full) continue;
                auto prune = [&](int a, int b, std::vector<int>& dom_a, std::vector<int>& dom_b) {
                    std::vector<int> keep;
                    for (int x : dom_a) {
                        bool ok = false;
                        for (int y : dom_b)
                            if ((a < b) ? pair_ok(a, b, x, y) : pair_ok(b, a, y, x)) {
                                ok = true;
                                break;
                            }
                        if (ok) keep.push_back(x);
                    }
                    if (keep.size() != dom_a.size()) {
                        dom_a = std::move(keep);
                        changed = true;
                    }
                };
                prune(u, v, domain[u], domain[v]);
                prune(v, u, domain[v], domain[u]);
            }
        }
    }
    std::vector<std::vector<int>> tuples;
    std::vector<int> assignment(m, -1);
    long nodes = 0;
    std::function<void(int)> backtrack = [&](int j) {
        if (j == m) {
            tuples.push_back(assignment);
            return;
        }
        for (int cand : domain[j]) {
            if (++nodes > node_budget)
                throw SpaceError("Overflow", "hatted tuple enumeration exceeded its budget");
            assignment[j] = cand;
            bool ok = true;
            for (int i = 0; i < j && ok; ++i) ok = pair_ok(i, j, assignment[i], cand);
            if (ok) backtrack(j + 1);
        }
        assignment[j] = -1;
    };
    backtrack(0);
    return tuples;
}

}  // namespace

TupleSpace hatted_tuple_space(const PairwiseFamily& f, const Rational& kappa, long node_budget) {
    TupleSpace out;
    out.kappa = kappa;
    out.tuples = enumerate_hatted(f, kappa, node_budget);
    std::vector<Point> window;
    window.reserve(out.tuples.size());
    for (const auto& t : out.tuples) {
        Point::Tuple parts;
        for (size_t j = 0; j < f.factors.size(); ++j) parts.push_back(f.factors[j]->window[t[j]]);
        window.push_back(Point(std::move(parts)));
    }
    out.space = make_product_linf_space("hatted_kappa_" + rat_str(kappa), f.factors,
                                        std::move(window));

    // section-embedding replay: appending the pair coordinates (x_U, x_V)
    // never changes the l-inf distance; sampled pairs
    const long n = out.size();
    if (n > 1) {
        Rng rng(11);
        long checks = std::min<long>(1000, n * (n - 1) / 2);
        for (long c = 0; c < checks; ++c) {
            long a = static_cast<long>(rng.below(n)), b = static_cast<long>(rng.below(n));
            if (a == b) continue;
            ExtDist primary = out.space->distance_by_index(static_cast<int>(a), static_cast<int>(b));
            ExtDist full = primary;
            const auto& ta = out.space->window[a].tuple();
            const auto& tb = out.space->window[b].tuple();
            for (size_t u = 0; u < f.factors.size(); ++u)
                for (size_t v = u + 1; v < f.factors.size(); ++v) {
                    ExtDist pair_dist = ext_max(f.factors[u]->distance(ta[u], tb[u]),
                                                f.factors[v]->distance(ta[v], tb[v]));
                    full = ext_max(full, pair_dist);
                }
            if (!(full == primary))
                throw SpaceError("BadInput", "section embedding failed its isometry replay");
        }
    }
    return out;
}

namespace {

void require_aligned_projections(const PairwiseFamily& f, const TotalSpaceCandidate& t) {
    if (t.projections.size() != f.factors.size())
        throw SpaceError("BadInput", "candidate needs one projection per factor");
    for (const auto& proj : t.projections)
        if (proj.src->window != t.space->window)
            throw SpaceError("MismatchedSpaces", "projection not defined on the candidate window");
}

void require_aligned_family_maps(const PairwiseFamily& f, const std::vector<MapTable>& maps,
                                 const char* what) {
    if (maps.size() != f.factors.size())
        throw SpaceError("BadInput", std::string(what) + " needs one map per factor");
    for (size_t u = 0; u < maps.size(); ++u)
        if (maps[u].src->window != f.factors[u]->window)
            throw SpaceError("MismatchedSpaces",
                             std::string(what) + " not defined on the factor window");
}

}  // namespace

RealizationResult realization_check(const PairwiseFamily& f, const TotalSpaceCandidate& t,
                                    const Rational& kappa) {
    require_aligned_projections(f, t);
    RealizationResult res;
    res.kappa = kappa;
    TupleSpace tuples = hatted_tuple_space(f, kappa);
    if (t.space->window.empty()) throw SpaceError("EmptyWindow", "candidate window is empty");
    const long n = tuples.size();
    std::vector<ExtDist> best(n, ExtDist::inf());
    if (n > 100000) throw SpaceError("Overflow", "realization search flagged beyond 1e5 tuples");
    parallel_for(n, [&](long ti) {
        const auto& tup = tuples.space->window[ti].tuple();
        ExtDist best_here = ExtDist::inf();
        for (int p = 0; p < t.space->window_size(); ++p) {
            ExtDist worst_factor(0);
            for (size_t u = 0; u < f.factors.size(); ++u) {
                worst_factor = ext_max(
                    worst_factor, f.factors[u]->distance(t.projections[u].apply_index(p), tup[u]));
                if (!(worst_factor < best_here)) break;
            }
            best_here = ext_min(best_here, worst_factor);
            if (best_here == ExtDist(0)) break;
        }
        best[ti] = best_here;
    });
    for (const auto& b : best) res.r_observed = ext_max(res.r_observed, b);
    Certificate cert = make_pass("realization");
    cert.set("kappa", ExtDist(kappa));
    cert.set("r_observed", res.r_observed);
    if (res.r_observed.is_inf()) cert.verdict = Verdict::Fail;
    res.certificate = cert;
    return res;
}

Certificate uniqueness_criterion_check(const PairwiseFamily& f, const TotalSpaceCandidate& t,
                                       int margin_percent) {
    require_aligned_projections(f, t);
    auto inner = inner_window_indices(*t.space, margin_percent);
    Certificate cert = make_pass("uniqueness_criterion");
    cert.notes["margin_percent"] = std::to_string(margin_percent);
    std::vector<std::pair<Rational, Rational>> samples;
    for (size_t a = 0; a < inner.size(); ++a) {
        for (size_t b = a + 1; b < inner.size(); ++b) {
            int p = inner[a], q = inner[b];
            ExtDist dx = t.space->distance_by_index(p, q);
            ExtDist proj(0);
            for (size_t u = 0; u < f.factors.size(); ++u)
                proj = ext_max(proj, f.factors[u]->distance(t.projections[u].apply_index(p),
                                                            t.projections[u].apply_index(q)));
            if (dx.is_inf()) continue;
            if (proj == ExtDist(0) && dx.finite() > 0) {
                cert.verdict = Verdict::Fail;
                cert.notes["violated"] = "projections collapse a separated pair";
                cert.witness = Witness{{t.space->window[p], t.space->window[q]},
                                       {{"d_X", dx}, {"projection_gap", proj}}};
                return cert;
            }
            if (proj.is_finite()) samples.emplace_back(proj.finite(), dx.finite());
        }
    }
    if (!samples.empty()) {
        AffineFit fit = fit_affine_upper_control(samples);
        cert.set("theta_a", ExtDist(fit.a));
        cert.set("theta_b", ExtDist(fit.b));
    }
    return cert;
}

HhsQiData hhs_qi_certificate(const PairwiseFamily& f, const TotalSpaceCandidate& t,
                             const Rational& sigma, const Rational& kappa, int margin_percent) {
    require_aligned_projections(f, t);
    TupleSpace tuples = hatted_tuple_space(f, kappa);
    if (tuples.size() == 0) throw SpaceError("EmptyTupleSpace", "no consistent tuples");
    HhsQiData out;
    out.tuple_count = tuples.size();

    // Rips_sigma over the tuple space, as a derived metric handle
    auto rips_space = make_weighted_rips_derived_space(
        "rips_tuples_sigma_" + rat_str(sigma), tuples.space, ControlFn::affine(0, 1), sigma);

    std::vector<Point> values;
    values.reserve(t.space->window.size());
    for (int p = 0; p < t.space->window_size(); ++p) {
        Point::Tuple parts;
        for (size_t u = 0; u < f.factors.size(); ++u) parts.push_back(t.projections[u].apply_index(p));
        Point tuple(std::move(parts));
        if (tuples.space->window_index_of(tuple) < 0)
            throw SpaceError("BadInput",
                             "product projection misses the tuple space; candidate invariant broken");
        values.push_back(std::move(tuple));
    }
    MapTable product_map =
        make_map_table("prod_lambda", t.space, rips_space, std::move(values));
    out.qi = certify_quasi_isometry(product_map, margin_percent);
    return out;
}

Certificate compatible_family_check(const PairwiseFamily& f, const PairwiseFamily& f_prime,
                                    const std::vector<MapTable>& alpha, const Rational& r) {
    require_aligned_family_maps(f, alpha, "alpha family");
    Certificate cert = make_pass("pairwise_compatible");
    ExtDist worst(0);
    std::optional<Witness> witness;
    for (size_t u = 0; u < f.factors.size(); ++u) {
        for (size_t v = u + 1; v < f.factors.size(); ++v) {
            auto pairs = f.constraint_pairs(static_cast<int>(u), static_cast<int>(v));
            for (const auto& [a, b] : pairs) {
                ExtDist dev = f_prime.constraint_distance(static_cast<int>(u), static_cast<int>(v),
                                                          alpha[u].apply(a), alpha[v].apply(b));
                if (worst < dev) {
                    worst = dev;
                    witness = Witness{{a, b}, {{"deviation", dev}}};
                }
            }
        }
    }
    cert.set("worst_deviation", worst);
    cert.set("r", ExtDist(r));
    if (!(worst <= ExtDist(r))) {
        cert.verdict = Verdict::Fail;
        cert.witness = witness;
    }
    return cert;
}

RetractionAssembly assemble_retraction(const PairwiseFamily& f, const PairwiseFamily& f_prime,
                                       const std::vector<MapTable>& alpha,
                                       const std::vector<MapTable>& omega, const ControlFn& rho,
                                       const Rational& sigma, const Rational& kappa) {
    const int m = static_cast<int>(f.factors.size());
    require_aligned_family_maps(f, alpha, "alpha family");
    require_aligned_family_maps(f_prime, omega, "omega family");

    RetractionAssembly out;

    // certified compatibility constants: exact worst deviations
    {
        Certificate ca = compatible_family_check(f, f_prime, alpha, 0);
        out.r = ca.at("worst_deviation").is_finite() ? ca.at("worst_deviation").finite()
                                                     : throw SpaceError(
                                                           "PreconditionReplayFailed",
                                                           "alpha family has infinite deviation");
        Certificate co = compatible_family_check(f_prime, f, omega, 0);
        if (co.at("worst_deviation").is_inf())
            throw SpaceError("PreconditionReplayFailed", "omega family has infinite deviation");
        out.c = co.at("worst_deviation").finite();
    }
    // retraction constant: alpha_U o omega_U against the identity on each primed factor
    out.K = 0;
    for (int u = 0; u < m; ++u) {
        for (int y = 0; y < f_prime.factors[u]->window_size(); ++y) {
            const Point& back = omega[u].apply_index(y);
            int bi = f.factors[u]->window_index_of(back);
            if (bi < 0)
                throw SpaceError("PreconditionReplayFailed", "omega escapes the factor window");
            ExtDist dev = f_prime.factors[u]->distance(alpha[u].apply_index(bi),
                                                       f_prime.factors[u]->window[y]);
            if (dev.is_inf())
                throw SpaceError("PreconditionReplayFailed", "retraction deviation infinite");
            out.K = rat_max(out.K, dev.finite());
        }
    }
    // uniform control on the alpha family
    for (int u = 0; u < m; ++u) {
        Certificate ctrl = check_upper_control(alpha[u], rho);
        if (!ctrl.passed())
            throw SpaceError("PreconditionReplayFailed",
                             "rho is not an upper control for alpha on factor " + f.labels[u]);
    }

    out.K_prime = out.K + rho.eval(out.c) + out.r;
    out.sigma_prime = rat_max(rho.eval(sigma) + 2 * out.r, out.K_prime);
    out.kappa_prime = 2 * out.K + 2 * rho.eval(out.c) + rho.eval(kappa) + 4 * out.r;

    Certificate cert = make_pass("assemble_retraction");
    cert.set("K", ExtDist(out.K));
    cert.set("c", ExtDist(out.c));
    cert.set("r", ExtDist(out.r));
    cert.set("K_prime", ExtDist(out.K_prime));
    cert.set("sigma_prime", ExtDist(out.sigma_prime));
    cert.set("kappa_prime", ExtDist(out.kappa_prime));

    // secondary components by nearest-constraint snap, replaying the
    // rho'(t) = rho(t) + 2r upper control on every constrained pair space
    for (int u = 0; u < m; ++u) {
        for (int v = u + 1; v < m; ++v) {
            auto pairs = f.constraint_pairs(u, v);
            auto target_pairs = f_prime.constraint_pairs(u, v);
            if (target_pairs.empty())
                throw SpaceError("PreconditionReplayFailed", "target constraint set is empty");
            auto snap = [&](const Point& au, const Point& av) {
                ExtDist best = ExtDist::inf();
                std::pair<Point, Point> pick = target_pairs.front();
                for (const auto& [tu, tv] : target_pairs) {
                    ExtDist d = ext_max(f_prime.factors[u]->distance(au, tu),
                                        f_prime.factors[v]->distance(av, tv));
                    // lexicographic tie-break on the pair product's point order
                    if (d < best || (d == best && std::make_pair(tu, tv) < pick)) {
                        best = d;
                        pick = {tu, tv};
                    }
                }
                return pick;
            };
            std::vector<std::pair<Point, Point>> snapped;
            snapped.reserve(pairs.size());
            for (const auto& [a, b] : pairs) snapped.push_back(snap(alpha[u].apply(a), alpha[v].apply(b)));
            // replay the upper control of the secondary component
            for (size_t s = 0; s < pairs.size(); ++s) {
                for (size_t q = s + 1; q < pairs.size(); ++q) {
                    ExtDist din = ext_max(f.factors[u]->distance(pairs[s].first, pairs[q].first),
                                          f.factors[v]->distance(pairs[s].second, pairs[q].second));
                    ExtDist dout =
                        ext_max(f_prime.factors[u]->distance(snapped[s].first, snapped[q].first),
                                f_prime.factors[v]->distance(snapped[s].second, snapped[q].second));
                    if (din.is_inf()) continue;
                    Rational bound = rho.eval(din.finite()) + 2 * out.r;
                    if (!(dout <= ExtDist(bound))) {
                        cert.verdict = Verdict::Fail;
                        cert.notes["violated"] =
                            "secondary component escapes rho(t) + 2r on pair " + f.labels[u] + "," +
                            f.labels[v];
                        out.certificate = cert;
                        return out;
                    }
                }
            }
        }
    }

    out.source_tuples = hatted_tuple_space(f, kappa);
    out.target_tuples = hatted_tuple_space(f_prime, out.kappa_prime);

    std::vector<Point> values;
    values.reserve(out.source_tuples.tuples.size());
    for (const auto& tup : out.source_tuples.tuples) {
        Point::Tuple parts;
        for (int u = 0; u < m; ++u) parts.push_back(alpha[u].apply_index(tup[u]));
        Point p(std::move(parts));
        if (out.target_tuples.space->window_index_of(p) < 0)
            throw SpaceError("PreconditionReplayFailed",
                             "image tuple misses the kappa' tuple space");
        values.push_back(std::move(p));
    }
    out.induced = make_map_table("assembled_retraction", out.source_tuples.space,
                                 out.target_tuples.space, std::move(values));

    // edge-wise 1-Lipschitz into Rips_{sigma'}
    RipsGraph source_rips(out.source_tuples.space, sigma);
    for (int i = 0; i < source_rips.n(); ++i) {
        for (int j : source_rips.adjacency()[i]) {
            if (j <= i) continue;
            ExtDist gap = out.target_tuples.space->distance(out.induced.apply_index(i),
                                                            out.induced.apply_index(j));
            if (!(gap <= ExtDist(out.sigma_prime))) {
                cert.verdict = Verdict::Fail;
                cert.notes["violated"] = "edge image exceeds sigma'";
                cert.witness = Witness{
                    {out.source_tuples.space->window[i], out.source_tuples.space->window[j]},
                    {{"image_gap", gap}}};
                out.certificate = cert;
                return out;
            }
        }
    }
    // retraction identity within K' on the target tuple space
    ExtDist worst(0);
    for (size_t y = 0; y < out.target_tuples.tuples.size(); ++y) {
        const auto& tup = out.target_tuples.tuples[y];
        Point::Tuple round_parts, orig_parts;
        for (int u = 0; u < m; ++u) {
            const Point& yu = f_prime.factors[u]->window[tup[u]];
            const Point& back = omega[u].apply(yu);
            int bi = f.factors[u]->window_index_of(back);
            round_parts.push_back(alpha[u].apply_index(bi));
            orig_parts.push_back(yu);
        }
        worst = ext_max(worst, out.target_tuples.space->distance(Point(round_parts),
                                                                 Point(orig_parts)));
    }
    cert.set("retraction_deviation", worst);
    if (!(worst <= ExtDist(out.K_prime))) {
        cert.verdict = Verdict::Fail;
        cert.notes["violated"] = "retraction identity exceeds K' on the target tuples";
    }
    out.certificate = cert;
    return out;
}

}  // namespace coarseforge
