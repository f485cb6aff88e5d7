// coarse-forge: Rips filtrations, control calculus, kappa-equalisers,
// consistent-tuple spaces and retraction assembly over finite windows, with
// machine-readable certificates. Exit codes: 0 pass, 1 fail, 2 usage/input.

#include "coarseforge/scenarios.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

using namespace coarseforge;

namespace {

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SpaceError("BadInput", "cannot open " + path);
    Json j;
    in >> j;
    return j;
}

Workspace load_input(const std::string& path) {
    if (path.empty()) return Workspace{};
    return load_workspace(read_json_file(path));
}

ControlFn parse_control(const std::string& text) {
    // inline JSON, or the shorthands affine(a,b) / exp(b) / poly(c0,c1,...)
    if (!text.empty() && (text[0] == '{')) return control_from_json(Json::parse(text));
    auto paren = text.find('(');
    if (paren == std::string::npos)
        throw SpaceError("BadInput", "cannot parse control " + text);
    std::string head = text.substr(0, paren);
    std::string args = text.substr(paren + 1, text.size() - paren - 2);
    std::vector<Rational> parts;
    size_t pos = 0;
    while (pos <= args.size() && !args.empty()) {
        size_t comma = args.find(',', pos);
        std::string tok = args.substr(pos, comma == std::string::npos ? std::string::npos
                                                                      : comma - pos);
        parts.push_back(rational_from_json(Json(tok)));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (head == "affine" && parts.size() == 2) return ControlFn::affine(parts[0], parts[1]);
    if ((head == "exp" || head == "exp_base") && parts.size() == 1)
        return ControlFn::exp_base(rat_num(parts[0]).convert_to<long>());
    if (head == "poly") return ControlFn::polynomial(parts);
    throw SpaceError("BadInput", "cannot parse control " + text);
}

std::vector<Rational> parse_grid(const std::string& text) {
    std::vector<Rational> grid;
    size_t pos = 0;
    while (pos < text.size()) {
        size_t comma = text.find(',', pos);
        std::string tok =
            text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        grid.push_back(rational_from_json(Json(tok)));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return grid;
}

std::optional<Rational> parse_sigma(const std::string& text) {
    if (text == "inf") return std::nullopt;
    return rational_from_json(Json(text));
}

std::vector<std::string> parse_grid_names(const std::string& text) {
    std::vector<std::string> names;
    size_t pos = 0;
    while (pos < text.size()) {
        size_t comma = text.find(',', pos);
        names.push_back(
            text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return names;
}

constexpr const char* kVersion = "0.1.0";
std::uint64_t g_seed = 1;

void emit(Json out, const std::string& out_path) {
    if (out.is_object()) {
        out["seed"] = g_seed;
        out["version"] = kVersion;
    }
    if (out_path.empty()) {
        std::cout << out.dump(2) << "\n";
        return;
    }
    std::ofstream f(out_path);
    f << out.dump(2) << "\n";
}

int verdict_exit(const Certificate& c) { return c.passed() ? 0 : 1; }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"coarse-forge: finite-window certificates for coarse geometry"};
    app.require_subcommand(1);

    std::string input_path, out_path, space_name = "z1";
    app.add_option("--input", input_path, "JSON document with spaces/windows/maps")
        ->envname("COARSE_FORGE_INPUT");
    app.add_option("--out", out_path, "write the result bundle to this path");
    app.add_option("--seed", g_seed, "sample seed, recorded in every emitted bundle");
    long product_budget = 1000000;
    app.add_option("--product-budget", product_budget, "tuple/product enumeration budget");

    // ---- rips ----------------------------------------------------------
    auto* rips = app.add_subcommand("rips", "Rips graphs, paths, sweeps, weighted variants");
    std::string sigma_text = "1", rho_text = "affine(1,1)", theta_text = "exp(2)";
    std::string from_text, to_text, grid_text = "1,2,4,8";
    int margin = 10;
    rips->add_option("--space", space_name, "space name (built-in or from --input)");
    rips->add_option("--sigma", sigma_text, "scale (rational or inf)");
    rips->add_option("--margin", margin, "inner-window margin percent");

    auto* rips_build = rips->add_subcommand("build", "build the Rips graph, print a summary");
    auto* rips_dist = rips->add_subcommand("dist", "graph distance between two window points");
    rips_dist->add_option("--from", from_text)->required();
    rips_dist->add_option("--to", to_text)->required();
    auto* rips_sweep = rips->add_subcommand("sweep", "filtration sweep over a scale grid");
    rips_sweep->add_option("--grid", grid_text);
    auto* rips_weighted = rips->add_subcommand("weighted", "weighted Rips graph summary");
    rips_weighted->add_option("--theta", theta_text);
    auto* rips_cgeo = rips->add_subcommand("cgeodesic", "geodesic certificate at a scale");
    rips_cgeo->add_option("--rho", rho_text);
    auto* rips_surplus = rips->add_subcommand("surplus", "surplus-weight isometry certificate");
    rips_surplus->add_option("--theta", theta_text);
    rips_surplus->add_option("--rho", rho_text);
    auto* rips_shortcut = rips->add_subcommand("shortcut", "shortcut remetrisation summary");
    rips_shortcut->add_option("--theta", theta_text);

    // ---- eq ------------------------------------------------------------
    auto* eq = app.add_subcommand("eq", "kappa-equalisers and stability tables");
    std::string f_name, g_name, h_name, kappa_text = "0";
    eq->add_option("--f", f_name, "map name from --input");
    eq->add_option("--g", g_name, "map name from --input");
    eq->add_option("--kappa", kappa_text);
    eq->add_option("--grid", grid_text);
    auto* eq_build = eq->add_subcommand("build", "membership of the kappa-equaliser");
    auto* eq_stab = eq->add_subcommand("stability", "directed-Hausdorff stability table");
    std::string csv_path;
    eq_stab->add_option("--csv", csv_path, "also write the table as CSV");
    auto* eq_factor = eq->add_subcommand("factor", "factor a map through the equaliser");
    eq_factor->add_option("--via", h_name, "map name from --input");

    // ---- diagram --------------------------------------------------------
    auto* diagram = app.add_subcommand("diagram", "uniformly controlled diagrams and tuples");
    std::string diagram_path, cone_path, alpha_text, omega_text, k_text = "0", rho2_text =
                                                                                "affine(1,0)";
    diagram->add_option("--diagram", diagram_path, "diagram JSON file")->required();
    diagram->add_option("--kappa", kappa_text);
    diagram->add_option("--sigma", sigma_text);
    auto* dia_validate = diagram->add_subcommand("validate", "uniform-control certificate");
    auto* dia_tuple = diagram->add_subcommand("tuple", "enumerate the consistent tuples");
    auto* dia_rips = diagram->add_subcommand("rips-tuple", "Rips graph over the tuple space");
    auto* dia_cone = diagram->add_subcommand("cone-factor", "factor a cone through the tuples");
    dia_cone->add_option("--cone", cone_path, "cone JSON file")->required();
    auto* dia_retract = diagram->add_subcommand("retract", "transport tuples along a retraction");
    dia_retract->add_option("--target", cone_path, "target diagram JSON file")->required();
    dia_retract->add_option("--alpha", alpha_text, "comma list of map names")->required();
    dia_retract->add_option("--omega", omega_text, "comma list of map names")->required();
    dia_retract->add_option("--K", k_text);
    dia_retract->add_option("--rho", rho2_text);

    // ---- hhs -------------------------------------------------------------
    auto* hhs = app.add_subcommand("hhs", "pairwise-constrained families");
    std::string family_text = "z2-axes", family_prime_text, total_text = "product-linf";
    hhs->add_option("--family", family_text, "built-in family name or JSON file");
    hhs->add_option("--total", total_text, "built-in candidate name");
    hhs->add_option("--sigma", sigma_text);
    hhs->add_option("--kappa", kappa_text);
    hhs->add_option("--margin", margin);
    auto* hhs_qi = hhs->add_subcommand("qi", "quasi-isometry certificate to the Rips tuples");
    auto* hhs_realize = hhs->add_subcommand("realize", "realization scan over a kappa grid");
    hhs_realize->add_option("--grid", grid_text);
    auto* hhs_retract = hhs->add_subcommand("retract", "assemble a factorwise retraction");
    hhs_retract->add_option("--family-prime", family_prime_text, "target family (JSON file)");
    hhs_retract->add_option("--alpha", alpha_text, "comma list of map names")->required();
    hhs_retract->add_option("--omega", omega_text, "comma list of map names")->required();
    hhs_retract->add_option("--rho", rho2_text);

    // ---- metric -----------------------------------------------------------
    auto* metric = app.add_subcommand("metric", "axioms, controls, preorder, quasi-isometry");
    std::string hi_name, lo_name, map_name, cls_text = "Aff";
    metric->add_option("--margin", margin);
    auto* m_validate = metric->add_subcommand("validate", "metric axioms on a window");
    m_validate->add_option("--space", space_name);
    auto* m_preorder = metric->add_subcommand("preorder", "d_lo <= rho(d_hi) certificate");
    m_preorder->add_option("--hi", hi_name)->required();
    m_preorder->add_option("--lo", lo_name)->required();
    m_preorder->add_option("--class", cls_text);
    auto* m_qi = metric->add_subcommand("qi", "quasi-isometry certificate for a map");
    m_qi->add_option("--map", map_name)->required();
    auto* m_pullback = metric->add_subcommand("pullback", "coarse pullback metric of a map");
    m_pullback->add_option("--map", map_name)->required();
    auto* m_extremal = metric->add_subcommand("extremality", "Rips metric vs candidate metrics");
    std::string candidates_text, extremal_sigma = "1";
    m_extremal->add_option("--space", space_name);
    m_extremal->add_option("--sigma", extremal_sigma);
    m_extremal->add_option("--candidates", candidates_text, "comma list of space names")->required();

    // ---- controls ----------------------------------------------------------
    auto* controls = app.add_subcommand("controls", "control-function calculus");
    std::string control_text, t_text = "0", bound_text = "64";
    auto* c_eval = controls->add_subcommand("eval", "evaluate a control function");
    c_eval->add_option("--control", control_text)->required();
    c_eval->add_option("--t", t_text);
    auto* c_dom = controls->add_subcommand("dominates", "window-certified domination scan");
    c_dom->add_option("--theta", theta_text);
    c_dom->add_option("--rho", rho_text);
    c_dom->add_option("--bound", bound_text);

    // ---- demo ---------------------------------------------------------------
    auto* demo = app.add_subcommand("demo", "run a named end-to-end scenario");
    std::string demo_name;
    demo->add_option("--name", demo_name, "one of the registered demos")->required();

    // options of a parent command may appear after its subcommand
    std::function<void(CLI::App*)> enable_fallthrough = [&](CLI::App* a) {
        a->fallthrough();
        for (auto* sub : a->get_subcommands([](const CLI::App*) { return true; }))
            enable_fallthrough(sub);
    };
    enable_fallthrough(&app);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;  // usage errors exit 2, --help exits 0
    }

    if (product_budget <= 0) {
        std::cerr << "error: budgets must be positive\n";
        return 2;
    }
    try {
        Workspace ws = load_input(input_path);

        if (rips->parsed()) {
            SpaceHandle s = ws.space(space_name);
            if (rips_dist->parsed()) {
                auto sigma = parse_sigma(sigma_text);
                if (!sigma) throw SpaceError("BadInput", "rips dist needs a finite sigma");
                RipsGraph g(s, *sigma);
                ExtDist d = g.distance(point_from_json(Json::parse(from_text)),
                                       point_from_json(Json::parse(to_text)));
                std::cout << ext_str(d) << "\n";
                return 0;
            }
            if (rips_build->parsed()) {
                auto sigma = parse_sigma(sigma_text);
                if (!sigma) throw SpaceError("BadInput", "rips build needs a finite sigma");
                RipsGraph g(s, *sigma);
                long edges = 0;
                for (const auto& nb : g.adjacency()) edges += static_cast<long>(nb.size());
                emit(Json{{"space", s->name},
                          {"sigma", rational_to_json(*sigma)},
                          {"vertices", g.n()},
                          {"edges", edges / 2}},
                     out_path);
                return 0;
            }
            if (rips_sweep->parsed()) {
                StabilityReport rep = filtration_sweep(s, parse_grid(grid_text), margin);
                emit(sweep_report_to_json(rep), out_path);
                return 0;
            }
            if (rips_weighted->parsed()) {
                WeightedRipsGraph g(s, parse_control(theta_text), parse_sigma(sigma_text), false);
                Certificate c = weight_control_check_graph(g, margin);
                Json out = certificate_to_json(c);
                out["edges"] = g.edge_count();
                out["density_warning"] = g.density_warning();
                emit(out, out_path);
                return verdict_exit(c);
            }
            if (rips_cgeo->parsed()) {
                auto sigma = parse_sigma(sigma_text);
                if (!sigma) throw SpaceError("BadInput", "cgeodesic needs a finite sigma");
                Certificate c = cgeodesic_certificate(s, *sigma, parse_control(rho_text), margin);
                emit(certificate_to_json(c), out_path);
                return verdict_exit(c);
            }
            if (rips_surplus->parsed()) {
                auto sigma = parse_sigma(sigma_text);
                if (!sigma) throw SpaceError("BadInput", "surplus needs a finite sigma");
                Certificate c = surplus_weight_check(s, parse_control(theta_text),
                                                     parse_control(rho_text), *sigma, margin);
                emit(certificate_to_json(c), out_path);
                return verdict_exit(c);
            }
            if (rips_shortcut->parsed()) {
                SpaceHandle sc = shortcut_metric(s, parse_control(theta_text));
                Certificate c = metric_preorder_check(sc, s, ControlClass::Aff);
                Json out = certificate_to_json(c);
                out["space"] = sc->name;
                emit(out, out_path);
                return verdict_exit(c);
            }
        }

        if (eq->parsed()) {
            const MapTable& f = ws.map(f_name);
            const MapTable& g = ws.map(g_name);
            if (eq_build->parsed()) {
                auto e = kappa_equalizer(f, g, rational_from_json(Json(kappa_text)));
                Json pts = Json::array();
                for (const auto& p : e.space->window) pts.push_back(point_to_json(p));
                emit(Json{{"kappa", kappa_text}, {"members", pts}}, out_path);
                return 0;
            }
            if (eq_stab->parsed()) {
                auto table = equalizer_stability(f, g, parse_grid(grid_text));
                if (!csv_path.empty()) {
                    std::ofstream csv(csv_path);
                    csv << stability_table_to_csv(table);
                }
                emit(stability_table_to_json(table), out_path);
                return 0;
            }
            if (eq_factor->parsed()) {
                auto r = factor_through_equalizer(ws.map(h_name), f, g, parse_grid(grid_text));
                emit(Json{{"kappa_min", rational_to_json(r.kappa_min)},
                          {"members", static_cast<long>(r.target.members.size())}},
                     out_path);
                return 0;
            }
        }

        if (diagram->parsed()) {
            DiagramSpec d = diagram_from_json(read_json_file(diagram_path), ws);
            Rational kappa = rational_from_json(Json(kappa_text));
            if (dia_validate->parsed()) {
                Certificate c = validate_uc_diagram(d);
                emit(certificate_to_json(c), out_path);
                return verdict_exit(c);
            }
            if (dia_tuple->parsed()) {
                TupleSpace ts = tuple_space(d, kappa, product_budget);
                Json pts = Json::array();
                for (const auto& p : ts.space->window) pts.push_back(point_to_json(p));
                emit(Json{{"kappa", kappa_text}, {"count", ts.size()}, {"tuples", pts}}, out_path);
                return 0;
            }
            if (dia_rips->parsed()) {
                auto sigma = parse_sigma(sigma_text);
                if (!sigma) throw SpaceError("BadInput", "rips-tuple needs a finite sigma");
                TupleSpace ts = tuple_space(d, kappa, product_budget);
                RipsGraph g = rips_tuple(ts, *sigma);
                long edges = 0;
                for (const auto& nb : g.adjacency()) edges += static_cast<long>(nb.size());
                emit(Json{{"tuples", ts.size()}, {"edges", edges / 2}}, out_path);
                return 0;
            }
            if (dia_cone->parsed()) {
                Json cj = read_json_file(cone_path);
                ConeSpec cone;
                cone.apex = ws.space(cj.at("apex").get<std::string>());
                for (const auto& leg : cj.at("legs")) cone.legs.push_back(ws.map(leg.get<std::string>()));
                cone.uniform_control = control_from_json(cj.at("uniform_control"));
                cone.commutativity_bound = rational_from_json(cj.at("commutativity_bound"));
                Certificate vc = validate_uc_cone(cone, d);
                if (!vc.passed()) {
                    emit(certificate_to_json(vc), out_path);
                    return verdict_exit(vc);
                }
                auto sigma = parse_sigma(sigma_text);
                TupleSpace ts = tuple_space(d, kappa);
                auto cf = cone_factorization(cone, d, ts, sigma.value_or(Rational(1)));
                emit(certificate_to_json(cf.certificate), out_path);
                return verdict_exit(cf.certificate);
            }
            if (dia_retract->parsed()) {
                DiagramSpec dp = diagram_from_json(read_json_file(cone_path), ws);
                std::vector<MapTable> alpha, omega;
                for (const auto& tok : parse_grid_names(alpha_text)) alpha.push_back(ws.map(tok));
                for (const auto& tok : parse_grid_names(omega_text)) omega.push_back(ws.map(tok));
                Rational K = rational_from_json(Json(k_text));
                auto sigma = parse_sigma(sigma_text).value_or(Rational(1));
                TupleSpace ts = tuple_space(d, kappa);
                auto rt = retraction_transport(d, dp, alpha, omega, K, K,
                                               parse_control(rho2_text), ts, sigma);
                emit(certificate_to_json(rt.certificate), out_path);
                return verdict_exit(rt.certificate);
            }
        }

        if (hhs->parsed()) {
            PairwiseFamily fam = family_text.size() > 5 &&
                                         family_text.substr(family_text.size() - 5) == ".json"
                                     ? family_from_json(read_json_file(family_text), ws)
                                     : builtin_family(family_text);
            Rational kappa = rational_from_json(Json(kappa_text));
            auto sigma = parse_sigma(sigma_text).value_or(Rational(1));
            if (hhs_qi->parsed()) {
                TotalSpaceCandidate cand = builtin_candidate(fam, total_text);
                HhsQiData data = hhs_qi_certificate(fam, cand, sigma, kappa, margin);
                Json out = certificate_to_json(data.qi.certificate);
                out["tuples"] = data.tuple_count;
                emit(out, out_path);
                return verdict_exit(data.qi.certificate);
            }
            if (hhs_realize->parsed()) {
                TotalSpaceCandidate cand = builtin_candidate(fam, total_text);
                Json grid_out = Json::array();
                bool ok = true;
                for (const auto& k : parse_grid(grid_text)) {
                    RealizationResult r = realization_check(fam, cand, k);
                    ok = ok && r.certificate.passed();
                    grid_out.push_back(Json{{"kappa", rational_to_json(k)},
                                            {"r_observed", extdist_to_json(r.r_observed)}});
                }
                emit(Json{{"grid", grid_out}}, out_path);
                return ok ? 0 : 1;
            }
            if (hhs_retract->parsed()) {
                PairwiseFamily famp = family_from_json(read_json_file(family_prime_text), ws);
                std::vector<MapTable> alpha, omega;
                for (const auto& tok : parse_grid_names(alpha_text)) alpha.push_back(ws.map(tok));
                for (const auto& tok : parse_grid_names(omega_text)) omega.push_back(ws.map(tok));
                auto ra = assemble_retraction(fam, famp, alpha, omega, parse_control(rho2_text),
                                              sigma, kappa);
                emit(certificate_to_json(ra.certificate), out_path);
                return verdict_exit(ra.certificate);
            }
        }

        if (metric->parsed()) {
            if (m_validate->parsed()) {
                auto v = validate_metric_axioms(*ws.space(space_name), g_seed);
                Json out{{"ok", v.ok},
                         {"triples_checked", v.triples_checked},
                         {"exhaustive", v.exhaustive},
                         {"seed", v.seed}};
                if (!v.ok) out["failure"] = v.failure;
                emit(out, out_path);
                return v.ok ? 0 : 1;
            }
            if (m_preorder->parsed()) {
                ControlClass cls = cls_text == "All" ? ControlClass::All
                                   : cls_text == "Poly" ? ControlClass::Poly
                                                        : ControlClass::Aff;
                Certificate c = metric_preorder_check(ws.space(hi_name), ws.space(lo_name), cls);
                emit(certificate_to_json(c), out_path);
                return verdict_exit(c);
            }
            if (m_qi->parsed()) {
                auto data = certify_quasi_isometry(ws.map(map_name), margin);
                emit(certificate_to_json(data.certificate), out_path);
                return verdict_exit(data.certificate);
            }
            if (m_pullback->parsed()) {
                SpaceHandle p = coarse_pullback_metric(ws.map(map_name));
                emit(Json{{"space", p->name}, {"points", p->window_size()}}, out_path);
                return 0;
            }
            if (m_extremal->parsed()) {
                std::vector<SpaceHandle> cands;
                for (const auto& name : parse_grid_names(candidates_text))
                    cands.push_back(ws.space(name));
                auto report = extremality_report(ws.space(space_name),
                                                 rational_from_json(Json(extremal_sigma)), cands,
                                                 ControlClass::Aff);
                Json entries = Json::array();
                for (const auto& e : report.entries) {
                    Json j = certificate_to_json(e.preorder);
                    j["candidate"] = e.candidate;
                    entries.push_back(j);
                }
                emit(Json{{"entries", entries}, {"maximal", report.maximal}}, out_path);
                return report.maximal ? 0 : 1;
            }
        }

        if (controls->parsed()) {
            if (c_eval->parsed()) {
                ControlFn f = parse_control(control_text);
                Rational v = f.eval(rational_from_json(Json(t_text)));
                std::cout << rat_str(v) << "\n";
                return 0;
            }
            if (c_dom->parsed()) {
                auto r = dominates_eventually(parse_control(theta_text), parse_control(rho_text),
                                              rational_from_json(Json(bound_text)));
                Json out{{"holds", r.holds}, {"inconclusive", r.inconclusive},
                         {"label", "window-certified"}};
                if (r.holds) out["t0"] = rational_to_json(r.threshold_t0);
                else if (!r.inconclusive) out["witness_t"] = rational_to_json(r.witness_t);
                emit(out, out_path);
                return r.holds ? 0 : 1;
            }
        }

        if (demo->parsed()) {
            ScenarioResult r = run_demo(demo_name);
            std::string dir = out_path.empty() ? "demo_out" : out_path;
            std::filesystem::create_directories(dir);
            std::ofstream f(dir + "/" + r.name + ".json");
            f << r.report.dump(2) << "\n";
            std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << ": " << r.detail << " ("
                      << r.seconds << "s)\n";
            return r.pass ? 0 : 1;
        }

        std::cerr << "no action selected\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        std::cerr << "input schema: see README.md (spaces/windows/maps documents)\n";
        return 2;
    }
}
