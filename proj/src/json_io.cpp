#include "coarseforge/json_io.hpp"

#include <sstream>

namespace coarseforge {

namespace {

Json bigint_to_json(const BigInt& n) {
    if (n >= std::numeric_limits<std::int64_t>::min() &&
        n <= std::numeric_limits<std::int64_t>::max())
        return Json(n.convert_to<std::int64_t>());
    return Json(n.str());  // arbitrary precision falls back to a decimal string
}

BigInt bigint_from_json(const Json& j) {
    if (j.is_number_integer()) return BigInt(j.get<std::int64_t>());
    if (j.is_string()) return BigInt(j.get<std::string>());
    throw SpaceError("BadInput", "expected an integer or decimal string");
}

}  // namespace

Json rational_to_json(const Rational& q) {
    return Json{{"num", bigint_to_json(rat_num(q))}, {"den", bigint_to_json(rat_den(q))}};
}

Rational rational_from_json(const Json& j) {
    if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
    if (j.is_string()) {
        // "p/q" or decimal integer string
        std::string s = j.get<std::string>();
        auto slash = s.find('/');
        if (slash == std::string::npos) return Rational(BigInt(s));
        return Rational(BigInt(s.substr(0, slash))) / Rational(BigInt(s.substr(slash + 1)));
    }
    if (j.is_object()) {
        BigInt num = bigint_from_json(j.at("num"));
        BigInt den = j.contains("den") ? bigint_from_json(j.at("den")) : BigInt(1);
        if (den <= 0) throw SpaceError("BadInput", "rational denominator must be positive");
        return Rational(num) / Rational(den);
    }
    throw SpaceError("BadInput", "cannot parse rational");
}

Json extdist_to_json(const ExtDist& d) {
    if (d.is_inf()) return Json("inf");
    return rational_to_json(d.finite());
}

Json control_to_json(const ControlFn& f) {
    const auto& n = f.node();
    switch (f.kind()) {
        case ControlFn::Kind::Affine:
            return Json{{"form", "affine"}, {"a", rational_to_json(n.a)}, {"b", rational_to_json(n.b)}};
        case ControlFn::Kind::Polynomial: {
            Json coeffs = Json::array();
            for (const auto& c : n.coeffs) coeffs.push_back(rational_to_json(c));
            return Json{{"form", "polynomial"}, {"coeffs", coeffs}};
        }
        case ControlFn::Kind::ExpBase:
            return Json{{"form", "exp_base"}, {"base", n.base}};
        case ControlFn::Kind::StepTable: {
            Json bps = Json::array();
            for (const auto& [t, v] : n.breakpoints)
                bps.push_back(Json::array({rational_to_json(t), rational_to_json(v)}));
            Json out{{"form", "step_table"}, {"breakpoints", bps}, {"proper", n.proper_tail}};
            if (n.domain_bound) out["domain_bound"] = rational_to_json(*n.domain_bound);
            return out;
        }
        case ControlFn::Kind::Composed:
            return Json{{"form", "composed"},
                        {"outer", control_to_json(ControlFn::wrap(n.outer))},
                        {"inner", control_to_json(ControlFn::wrap(n.inner))}};
        case ControlFn::Kind::InverseT:
            return Json{{"form", "inverse_T"}, {"of", control_to_json(ControlFn::wrap(n.of))}};
        case ControlFn::Kind::Perp:
            return Json{{"form", "perp"}, {"of", control_to_json(ControlFn::wrap(n.of))}};
    }
    throw SpaceError("BadInput", "unsupported control form for serialization");
}

ControlFn control_from_json(const Json& j) {
    const std::string form = j.at("form").get<std::string>();
    if (form == "affine")
        return ControlFn::affine(rational_from_json(j.at("a")), rational_from_json(j.at("b")));
    if (form == "polynomial") {
        std::vector<Rational> coeffs;
        for (const auto& c : j.at("coeffs")) coeffs.push_back(rational_from_json(c));
        return ControlFn::polynomial(std::move(coeffs));
    }
    if (form == "exp_base") return ControlFn::exp_base(j.at("base").get<long>());
    if (form == "step_table") {
        std::vector<std::pair<Rational, Rational>> bps;
        for (const auto& bp : j.at("breakpoints"))
            bps.emplace_back(rational_from_json(bp.at(0)), rational_from_json(bp.at(1)));
        std::optional<Rational> bound;
        if (j.contains("domain_bound")) bound = rational_from_json(j.at("domain_bound"));
        return ControlFn::step_table(std::move(bps), j.value("proper", false), bound);
    }
    if (form == "composed")
        return ControlFn::composed(control_from_json(j.at("outer")), control_from_json(j.at("inner")));
    if (form == "inverse_T") return ControlFn::inverse_T(control_from_json(j.at("of")));
    if (form == "perp") return ControlFn::perp(control_from_json(j.at("of")));
    throw SpaceError("BadInput", "unknown control form " + form);
}

Json point_to_json(const Point& p) {
    if (p.is_name()) return Json(p.name());
    if (p.is_coords()) {
        Json arr = Json::array();
        for (auto c : p.coords()) arr.push_back(c);
        return arr;
    }
    Json arr = Json::array();
    for (const auto& part : p.tuple()) arr.push_back(point_to_json(part));
    return arr;
}

Point point_from_json(const Json& j) {
    if (j.is_string()) return Point(j.get<std::string>());
    if (j.is_number_integer()) return Point(Point::Coords{j.get<std::int64_t>()});
    if (j.is_array()) {
        bool all_ints = !j.empty();
        for (const auto& e : j) all_ints = all_ints && e.is_number_integer();
        if (all_ints) {
            Point::Coords c;
            for (const auto& e : j) c.push_back(e.get<std::int64_t>());
            return Point(std::move(c));
        }
        Point::Tuple t;
        for (const auto& e : j) t.push_back(point_from_json(e));
        return Point(std::move(t));
    }
    throw SpaceError("BadInput", "cannot parse point");
}

Json certificate_to_json(const Certificate& c) {
    Json out;
    out["check"] = c.check;
    out["verdict"] = verdict_str(c.verdict);
    Json consts = Json::object();
    for (const auto& [k, v] : c.constants) consts[k] = extdist_to_json(v);
    out["constants"] = consts;
    if (c.witness) {
        Json w;
        Json pts = Json::array();
        for (const auto& p : c.witness->points) pts.push_back(point_to_json(p));
        w["points"] = pts;
        Json data = Json::object();
        for (const auto& [k, v] : c.witness->data) data[k] = extdist_to_json(v);
        w["data"] = data;
        out["witness"] = w;
    }
    if (!c.notes.empty()) {
        Json notes = Json::object();
        for (const auto& [k, v] : c.notes) notes[k] = v;
        out["notes"] = notes;
    }
    return out;
}

Json stability_table_to_json(const EqStabilityTable& t) {
    Json rows = Json::array();
    for (const auto& r : t.rows)
        rows.push_back(Json{{"kappa", rational_to_json(r.kappa)},
                            {"kappa_prime", rational_to_json(r.kappa_prime)},
                            {"r", extdist_to_json(r.radius)}});
    Json out{{"rows", rows}, {"label", t.label}};
    if (t.threshold) out["threshold"] = rational_to_json(*t.threshold);
    return out;
}

std::string stability_table_to_csv(const EqStabilityTable& t) {
    std::ostringstream os;
    os << "kappa,kappa_prime,r\n";
    for (const auto& r : t.rows)
        os << rat_str(r.kappa) << "," << rat_str(r.kappa_prime) << "," << ext_str(r.radius) << "\n";
    return os.str();
}

Json sweep_report_to_json(const StabilityReport& r) {
    Json fits = Json::array();
    for (const auto& f : r.consecutive_fits)
        fits.push_back(Json{{"sigma", rational_to_json(f.sigma_lo)},
                            {"tau", rational_to_json(f.sigma_hi)},
                            {"a", rational_to_json(f.a)},
                            {"b", rational_to_json(f.b)}});
    Json out{{"consecutive_fits", fits}, {"evidence", r.evidence}, {"label", r.label}};
    if (r.evidence) out["evidence_scale"] = rational_to_json(r.evidence_scale);
    return out;
}

SpaceHandle Workspace::space(const std::string& name) const {
    auto it = spaces.find(name);
    if (it != spaces.end()) return it->second;
    return builtin_space(name);
}

const MapTable& Workspace::map(const std::string& name) const {
    auto it = maps.find(name);
    if (it == maps.end()) throw SpaceError("BadInput", "unknown map " + name);
    return it->second;
}

namespace {

std::vector<Point> window_from_json(const Json& j, const Workspace& ws) {
    if (j.is_string()) {
        auto it = ws.windows.find(j.get<std::string>());
        if (it == ws.windows.end())
            throw SpaceError("BadInput", "unknown window " + j.get<std::string>());
        return it->second;
    }
    std::vector<Point> w;
    for (const auto& p : j) w.push_back(point_from_json(p));
    return w;
}

SpaceHandle space_from_json(const std::string& name, const Json& j, Workspace& ws) {
    if (j.is_string()) return ws.space(j.get<std::string>());
    const std::string kind = j.at("oracle").get<std::string>();
    std::vector<Point> window;
    if (j.contains("window")) window = window_from_json(j.at("window"), ws);
    if (kind == "lattice") {
        std::string norm = j.value("norm", "linf");
        LatticeNorm n = norm == "l1" ? LatticeNorm::L1
                                     : norm == "l2_rounded" ? LatticeNorm::L2Rounded
                                                            : LatticeNorm::Linf;
        return make_lattice_space(name, j.at("dim").get<int>(), n, std::move(window));
    }
    if (kind == "explicit_matrix") {
        std::vector<Point> pts;
        for (const auto& p : j.at("points")) pts.push_back(point_from_json(p));
        std::vector<std::vector<ExtDist>> dist;
        for (const auto& row : j.at("matrix")) {
            std::vector<ExtDist> r;
            for (const auto& e : row)
                r.push_back(e.is_string() && e.get<std::string>() == "inf"
                                ? ExtDist::inf()
                                : ExtDist(rational_from_json(e)));
            dist.push_back(std::move(r));
        }
        return make_explicit_matrix_space(name, std::move(pts), std::move(dist), std::move(window));
    }
    if (kind == "graph_metric" || kind == "tree_metric") {
        std::vector<std::string> vertices;
        for (const auto& v : j.at("vertices")) vertices.push_back(v.get<std::string>());
        std::vector<std::pair<int, int>> edges;
        std::map<std::string, int> index;
        for (int i = 0; i < static_cast<int>(vertices.size()); ++i) index[vertices[i]] = i;
        for (const auto& e : j.at("edges")) {
            int u = e.at(0).is_string() ? index.at(e.at(0).get<std::string>()) : e.at(0).get<int>();
            int v = e.at(1).is_string() ? index.at(e.at(1).get<std::string>()) : e.at(1).get<int>();
            edges.emplace_back(u, v);
        }
        return make_graph_space(name, std::move(vertices), std::move(edges),
                                kind == "tree_metric", std::move(window));
    }
    if (kind == "product_linf") {
        std::vector<SpaceHandle> parts;
        for (const auto& p : j.at("parts")) parts.push_back(ws.space(p.get<std::string>()));
        return make_product_linf_space(name, std::move(parts), std::move(window));
    }
    if (kind == "subspace") {
        SpaceHandle parent = ws.space(j.at("parent").get<std::string>());
        return make_subspace(name, parent, std::move(window));
    }
    if (kind == "weighted_rips_derived") {
        SpaceHandle parent = ws.space(j.at("parent").get<std::string>());
        std::optional<Rational> sigma;
        if (j.contains("sigma") && !(j.at("sigma").is_string() && j.at("sigma") == "inf"))
            sigma = rational_from_json(j.at("sigma"));
        return make_weighted_rips_derived_space(name, parent, control_from_json(j.at("theta")),
                                                sigma);
    }
    throw SpaceError("BadInput", "unknown oracle kind " + kind);
}

}  // namespace

Workspace load_workspace(const Json& doc) {
    Workspace ws;
    if (doc.contains("windows"))
        for (const auto& [name, w] : doc.at("windows").items())
            ws.windows[name] = window_from_json(w, ws);
    if (doc.contains("spaces"))
        for (const auto& [name, spec] : doc.at("spaces").items())
            ws.spaces[name] = space_from_json(name, spec, ws);
    if (doc.contains("maps")) {
        for (const auto& [name, spec] : doc.at("maps").items()) {
            SpaceHandle src = ws.space(spec.at("src").get<std::string>());
            SpaceHandle dst = ws.space(spec.at("dst").get<std::string>());
            std::vector<Point> values;
            const auto& vals = spec.at("values");
            if (vals.is_array()) {
                // array of [src_point, dst_point] pairs, must cover the window
                std::map<Point, Point> assign;
                for (const auto& pr : vals)
                    assign[point_from_json(pr.at(0))] = point_from_json(pr.at(1));
                for (const auto& p : src->window) {
                    auto it = assign.find(p);
                    if (it == assign.end())
                        throw SpaceError("BadInput", "map " + name + " misses a window point");
                    values.push_back(it->second);
                }
            } else {
                for (const auto& p : src->window) {
                    std::string key = point_str(p);
                    if (!vals.contains(key))
                        throw SpaceError("BadInput",
                                         "map " + name + " misses window point " + key);
                    values.push_back(point_from_json(vals.at(key)));
                }
            }
            ws.maps.emplace(name, make_map_table(name, src, dst, std::move(values)));
        }
    }
    return ws;
}

DiagramSpec diagram_from_json(const Json& doc, const Workspace& ws) {
    DiagramSpec d;
    for (const auto& [name, spec] : doc.at("objects").items()) {
        SpaceHandle sp = spec.is_string() ? ws.space(spec.get<std::string>())
                                          : throw SpaceError("BadInput", "objects must name spaces");
        d.objects.push_back(DiagramObject{name, sp});
    }
    for (const auto& arr : doc.at("arrows")) {
        DiagramArrow a;
        a.id = arr.value("id", "arrow" + std::to_string(d.arrows.size()));
        a.src = d.object_index(arr.at("src").get<std::string>());
        a.dst = d.object_index(arr.at("dst").get<std::string>());
        if (a.src < 0 || a.dst < 0) throw SpaceError("BadInput", "arrow references unknown object");
        a.bonding = ws.map(arr.at("map").get<std::string>());
        d.arrows.push_back(std::move(a));
    }
    if (doc.contains("uniform_control"))
        d.uniform_control = control_from_json(doc.at("uniform_control"));
    return d;
}

PairwiseFamily family_from_json(const Json& doc, const Workspace& ws) {
    PairwiseFamily f;
    for (const auto& [name, spec] : doc.at("factors").items()) {
        f.labels.push_back(name);
        f.factors.push_back(spec.is_string() ? ws.space(spec.get<std::string>())
                                             : builtin_space(name));
    }
    if (doc.contains("constraints")) {
        for (const auto& [key, spec] : doc.at("constraints").items()) {
            auto comma = key.find(',');
            if (comma == std::string::npos)
                throw SpaceError("BadInput", "constraint keys look like \"U,V\"");
            int u = f.label_index(key.substr(0, comma));
            int v = f.label_index(key.substr(comma + 1));
            if (u < 0 || v < 0) throw SpaceError("BadInput", "constraint references unknown label");
            PairConstraint c;
            if (spec.is_string() && spec == "full") c.kind = PairConstraint::Kind::Full;
            else if (spec.is_object() && spec.contains("diagonal"))
                c.kind = PairConstraint::Kind::Diagonal;
            else if (spec.is_object() && spec.contains("band")) {
                c.kind = PairConstraint::Kind::Band;
                c.band = rational_from_json(spec.at("band"));
            } else if (spec.is_object() && spec.contains("points")) {
                c.kind = PairConstraint::Kind::Points;
                for (const auto& pr : spec.at("points"))
                    c.points.emplace_back(point_from_json(pr.at(0)), point_from_json(pr.at(1)));
            } else {
                throw SpaceError("BadInput", "unknown constraint form for " + key);
            }
            f.constraints[{std::min(u, v), std::max(u, v)}] = c;
        }
    }
    return f;
}

}  // namespace coarseforge
