#include "coarseforge/space.hpp"

#include "coarseforge/parallel.hpp"
#include "coarseforge/rips.hpp"
#include "coarseforge/rng.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>

namespace coarseforge {

std::string point_str(const Point& p) {
    if (p.is_name()) return p.name();
    std::ostringstream os;
    if (p.is_coords()) {
        os << "(";
        const auto& c = p.coords();
        for (size_t i = 0; i < c.size(); ++i) os << (i ? "," : "") << c[i];
        os << ")";
    } else {
        os << "[";
        const auto& t = p.tuple();
        for (size_t i = 0; i < t.size(); ++i) os << (i ? ";" : "") << point_str(t[i]);
        os << "]";
    }
    return os.str();
}

namespace {

/// isqrt for nonnegative BigInt (floor).
BigInt int_sqrt(const BigInt& n) {
    if (n <= 0) return 0;
    BigInt x = n, y = (x + 1) / 2;
    while (y < x) {
        x = y;
        y = (x + n / x) / 2;
    }
    return x;
}

ExtDist lattice_distance(const LatticeOracle& o, const Point& x, const Point& y) {
    const auto& a = x.coords();
    const auto& b = y.coords();
    if (static_cast<int>(a.size()) != o.dim || static_cast<int>(b.size()) != o.dim)
        throw SpaceError("UnknownPoint", "lattice point dimension mismatch");
    switch (o.norm) {
        case LatticeNorm::L1: {
            BigInt s = 0;
            for (int i = 0; i < o.dim; ++i) s += (a[i] > b[i] ? a[i] - b[i] : b[i] - a[i]);
            return ExtDist(Rational(s));
        }
        case LatticeNorm::Linf: {
            std::int64_t m = 0;
            for (int i = 0; i < o.dim; ++i) {
                std::int64_t d = a[i] > b[i] ? a[i] - b[i] : b[i] - a[i];
                if (d > m) m = d;
            }
            return ExtDist(Rational(m));
        }
        case LatticeNorm::L2Rounded: {
            // ceil of the Euclidean norm; ceil keeps the triangle inequality
            BigInt s = 0;
            for (int i = 0; i < o.dim; ++i) {
                BigInt d = a[i] - b[i];
                s += d * d;
            }
            BigInt r = int_sqrt(s);
            if (r * r < s) ++r;
            return ExtDist(Rational(r));
        }
    }
    throw SpaceError("UnknownPoint", "bad lattice norm");
}

const std::vector<int>& graph_bfs_row(const GraphOracle& g, int src) {
    std::lock_guard<std::mutex> lock(g.cache_mutex);
    auto it = g.bfs_rows.find(src);
    if (it != g.bfs_rows.end()) return it->second;
    std::vector<int> dist(g.vertices.size(), -1);
    std::queue<int> q;
    dist[src] = 0;
    q.push(src);
    while (!q.empty()) {
        int u = q.front();
        q.pop();
        for (int v : g.adjacency[u]) {
            if (dist[v] < 0) {
                dist[v] = dist[u] + 1;
                q.push(v);
            }
        }
    }
    return g.bfs_rows.emplace(src, std::move(dist)).first->second;
}

}  // namespace

ExtDist Space::distance(const Point& x, const Point& y) const {
    if (x == y) {
        if (!resolvable(x)) throw SpaceError("UnknownPoint", "point not resolvable: " + point_str(x));
        return ExtDist(0);
    }
    if (std::holds_alternative<ExplicitMatrixOracle>(oracle)) {
        const auto& o = std::get<ExplicitMatrixOracle>(oracle);
        auto ix = o.index.find(x), iy = o.index.find(y);
        if (ix == o.index.end() || iy == o.index.end())
            throw SpaceError("UnknownPoint", "matrix oracle cannot resolve point");
        return o.dist[ix->second][iy->second];
    }
    if (std::holds_alternative<LatticeOracle>(oracle)) {
        return lattice_distance(std::get<LatticeOracle>(oracle), x, y);
    }
    if (std::holds_alternative<std::shared_ptr<GraphOracle>>(oracle)) {
        const auto& g = *std::get<std::shared_ptr<GraphOracle>>(oracle);
        auto ix = g.index.find(x.name()), iy = g.index.find(y.name());
        if (ix == g.index.end() || iy == g.index.end())
            throw SpaceError("UnknownPoint", "graph oracle cannot resolve vertex");
        int d = graph_bfs_row(g, ix->second)[iy->second];
        return d < 0 ? ExtDist::inf() : ExtDist(Rational(d));
    }
    if (std::holds_alternative<ProductLinfOracle>(oracle)) {
        const auto& o = std::get<ProductLinfOracle>(oracle);
        const auto& a = x.tuple();
        const auto& b = y.tuple();
        if (a.size() != o.parts.size() || b.size() != o.parts.size())
            throw SpaceError("UnknownPoint", "product point arity mismatch");
        ExtDist m(0);
        for (size_t i = 0; i < o.parts.size(); ++i)
            m = ext_max(m, o.parts[i]->distance(a[i], b[i]));
        return m;
    }
    if (std::holds_alternative<SubspaceOracle>(oracle)) {
        return std::get<SubspaceOracle>(oracle).parent->distance(x, y);
    }
    const auto& w = *std::get<std::shared_ptr<WeightedRipsDerivedOracle>>(oracle);
    {
        std::lock_guard<std::mutex> lock(w.build_mutex);
        if (!w.graph) {
            auto* self = const_cast<WeightedRipsDerivedOracle*>(&w);
            self->graph = std::make_shared<WeightedRipsGraph>(w.parent, w.weight_fn, w.sigma,
                                                              /*clamp=*/true);
        }
    }
    return w.graph->distance(x, y);
}

bool Space::resolvable(const Point& p) const {
    try {
        if (std::holds_alternative<ExplicitMatrixOracle>(oracle))
            return std::get<ExplicitMatrixOracle>(oracle).index.count(p) > 0;
        if (std::holds_alternative<LatticeOracle>(oracle))
            return p.is_coords() &&
                   static_cast<int>(p.coords().size()) == std::get<LatticeOracle>(oracle).dim;
        if (std::holds_alternative<std::shared_ptr<GraphOracle>>(oracle))
            return p.is_name() &&
                   std::get<std::shared_ptr<GraphOracle>>(oracle)->index.count(p.name()) > 0;
        if (std::holds_alternative<ProductLinfOracle>(oracle)) {
            const auto& o = std::get<ProductLinfOracle>(oracle);
            if (!p.is_tuple() || p.tuple().size() != o.parts.size()) return false;
            for (size_t i = 0; i < o.parts.size(); ++i)
                if (!o.parts[i]->resolvable(p.tuple()[i])) return false;
            return true;
        }
        if (std::holds_alternative<SubspaceOracle>(oracle))
            return std::get<SubspaceOracle>(oracle).parent->resolvable(p);
        const auto& w = *std::get<std::shared_ptr<WeightedRipsDerivedOracle>>(oracle);
        return w.parent->window_index_of(p) >= 0;
    } catch (const std::bad_variant_access&) {
        return false;
    }
}

int Space::window_index_of(const Point& p) const {
    const auto& idx = window_index();
    auto it = idx.find(p);
    return it == idx.end() ? -1 : it->second;
}

const std::map<Point, int>& Space::window_index() const {
    std::call_once(window_index_once_, [this] {
        for (int i = 0; i < static_cast<int>(window.size()); ++i) window_index_.emplace(window[i], i);
    });
    return window_index_;
}

SpaceHandle make_explicit_matrix_space(std::string name, std::vector<Point> points,
                                       std::vector<std::vector<ExtDist>> dist,
                                       std::vector<Point> window) {
    const size_t n = points.size();
    if (dist.size() != n) throw SpaceError("BadInput", "matrix size mismatch");
    for (size_t i = 0; i < n; ++i) {
        if (dist[i].size() != n) throw SpaceError("BadInput", "matrix row size mismatch");
        if (!(dist[i][i] == ExtDist(0))) throw SpaceError("BadInput", "nonzero diagonal");
        for (size_t j = 0; j < n; ++j) {
            if (!(dist[i][j] == dist[j][i])) throw SpaceError("BadInput", "asymmetric matrix");
            if (dist[i][j].is_finite() && dist[i][j].finite() < 0)
                throw SpaceError("BadInput", "negative distance");
        }
    }
    // exhaustive triangle validation for explicit matrices
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
            for (size_t k = 0; k < n; ++k)
                if (!(dist[i][k] <= dist[i][j] + dist[j][k]))
                    throw SpaceError("BadInput", "triangle inequality violated in matrix");
    auto sp = std::make_shared<Space>();
    sp->name = std::move(name);
    ExplicitMatrixOracle o;
    o.points = points;
    o.dist = std::move(dist);
    for (int i = 0; i < static_cast<int>(points.size()); ++i) o.index.emplace(points[i], i);
    sp->oracle = std::move(o);
    sp->window = window.empty() ? std::move(points) : std::move(window);
    return sp;
}

SpaceHandle make_lattice_space(std::string name, int dim, LatticeNorm norm,
                               std::vector<Point> window) {
    auto sp = std::make_shared<Space>();
    sp->name = std::move(name);
    sp->oracle = LatticeOracle{dim, norm};
    sp->window = std::move(window);
    return sp;
}

SpaceHandle make_graph_space(std::string name, std::vector<std::string> vertices,
                             std::vector<std::pair<int, int>> edges, bool tree,
                             std::vector<Point> window) {
    auto g = std::make_shared<GraphOracle>();
    g->vertices = std::move(vertices);
    g->edges = std::move(edges);
    g->tree = tree;
    g->adjacency.assign(g->vertices.size(), {});
    for (int i = 0; i < static_cast<int>(g->vertices.size()); ++i) g->index.emplace(g->vertices[i], i);
    for (auto [u, v] : g->edges) {
        if (u < 0 || v < 0 || u >= static_cast<int>(g->vertices.size()) ||
            v >= static_cast<int>(g->vertices.size()) || u == v)
            throw SpaceError("BadInput", "bad graph edge");
        g->adjacency[u].push_back(v);
        g->adjacency[v].push_back(u);
    }
    for (auto& nb : g->adjacency) std::sort(nb.begin(), nb.end());
    if (tree) {
        if (g->edges.size() + 1 != g->vertices.size())
            throw SpaceError("BadInput", "tree must have |V|-1 edges");
        const auto& row = graph_bfs_row(*g, 0);
        for (int d : row)
            if (d < 0) throw SpaceError("BadInput", "tree must be connected");
    }
    auto sp = std::make_shared<Space>();
    sp->name = std::move(name);
    if (window.empty())
        for (const auto& v : g->vertices) window.emplace_back(v);
    sp->oracle = std::move(g);
    sp->window = std::move(window);
    return sp;
}

SpaceHandle make_product_linf_space(std::string name, std::vector<SpaceHandle> parts,
                                    std::vector<Point> window) {
    auto sp = std::make_shared<Space>();
    sp->name = std::move(name);
    sp->oracle = ProductLinfOracle{std::move(parts)};
    sp->window = std::move(window);
    return sp;
}

SpaceHandle make_subspace(std::string name, SpaceHandle parent, std::vector<Point> window) {
    for (const auto& p : window)
        if (!parent->resolvable(p))
            throw SpaceError("UnknownPoint", "subspace point not resolvable in parent");
    auto sp = std::make_shared<Space>();
    sp->name = std::move(name);
    sp->oracle = SubspaceOracle{std::move(parent)};
    sp->window = std::move(window);
    return sp;
}

SpaceHandle make_weighted_rips_derived_space(std::string name, SpaceHandle parent,
                                             ControlFn weight_fn, std::optional<Rational> sigma) {
    auto o = std::make_shared<WeightedRipsDerivedOracle>();
    o->parent = parent;
    o->weight_fn = std::move(weight_fn);
    o->sigma = std::move(sigma);
    auto sp = std::make_shared<Space>();
    sp->name = std::move(name);
    sp->window = parent->window;
    sp->oracle = std::move(o);
    return sp;
}

std::vector<Point> z_window(std::int64_t lo, std::int64_t hi) {
    std::vector<Point> w;
    for (std::int64_t x = lo; x <= hi; ++x) w.push_back(Point(Point::Coords{x}));
    return w;
}

std::vector<Point> z2_window(std::int64_t lo, std::int64_t hi) {
    std::vector<Point> w;
    for (std::int64_t x = lo; x <= hi; ++x)
        for (std::int64_t y = lo; y <= hi; ++y) w.push_back(Point(Point::Coords{x, y}));
    return w;
}

std::vector<std::vector<ExtDist>> window_distance_table(const Space& s) {
    const int n = s.window_size();
    std::vector<std::vector<ExtDist>> rows(n);
    parallel_for(n, [&](long i) {
        rows[i].resize(n);
        for (int j = 0; j < n; ++j) rows[i][j] = s.distance(s.window[i], s.window[j]);
    });
    return rows;
}

std::vector<int> inner_window_indices(const Space& s, int margin_percent) {
    const int n = s.window_size();
    std::vector<int> all(n);
    for (int i = 0; i < n; ++i) all[i] = i;
    if (margin_percent <= 0 || n == 0) return all;
    auto table = window_distance_table(s);
    std::vector<Rational> ecc(n, 0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (table[i][j].is_finite() && table[i][j].finite() > ecc[i]) ecc[i] = table[i][j].finite();
    Rational rmin = ecc[0], rmax = ecc[0];
    for (const auto& e : ecc) {
        rmin = rat_min(rmin, e);
        rmax = rat_max(rmax, e);
    }
    Rational cut = rmin + (rmax - rmin) * Rational(100 - margin_percent, 100);
    std::vector<int> inner;
    for (int i = 0; i < n; ++i)
        if (ecc[i] <= cut) inner.push_back(i);
    if (inner.empty()) inner = all;
    return inner;
}

MetricValidation validate_metric_axioms(const Space& s, std::uint64_t seed, long triple_budget) {
    MetricValidation res;
    res.seed = seed;
    const long n = s.window_size();
    if (n == 0) return res;
    auto fail = [&](const std::string& msg) {
        res.ok = false;
        res.failure = msg;
    };
    // symmetry and zero diagonal: exhaustive over pairs up to a mild budget
    long pair_budget = std::min<long>(n * n, 200000);
    Rng rng(seed);
    for (long c = 0; c < pair_budget && res.ok; ++c) {
        long i = (n * n <= pair_budget) ? c / n : static_cast<long>(rng.below(n));
        long j = (n * n <= pair_budget) ? c % n : static_cast<long>(rng.below(n));
        ExtDist dij = s.distance(s.window[i], s.window[j]);
        ExtDist dji = s.distance(s.window[j], s.window[i]);
        if (!(dij == dji)) fail("symmetry violated at " + point_str(s.window[i]) + "," + point_str(s.window[j]));
        if (i == j && !(dij == ExtDist(0))) fail("nonzero diagonal at " + point_str(s.window[i]));
    }
    const bool exhaustive = n * n * n <= triple_budget;
    res.exhaustive = exhaustive;
    long triples = exhaustive ? n * n * n : triple_budget;
    for (long c = 0; c < triples && res.ok; ++c) {
        long i, j, k;
        if (exhaustive) {
            i = c / (n * n);
            j = (c / n) % n;
            k = c % n;
        } else {
            i = static_cast<long>(rng.below(n));
            j = static_cast<long>(rng.below(n));
            k = static_cast<long>(rng.below(n));
        }
        ExtDist dik = s.distance(s.window[i], s.window[k]);
        ExtDist dij = s.distance(s.window[i], s.window[j]);
        ExtDist djk = s.distance(s.window[j], s.window[k]);
        if (!(dik <= dij + djk))
            fail("triangle inequality violated at " + point_str(s.window[i]) + "," +
                 point_str(s.window[j]) + "," + point_str(s.window[k]));
        ++res.triples_checked;
    }
    return res;
}

}  // namespace coarseforge
