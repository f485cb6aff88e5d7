#include "coarseforge/builtins.hpp"

namespace coarseforge {

SpaceHandle z_line(std::int64_t lo, std::int64_t hi, const std::string& name) {
    return make_lattice_space(name, 1, LatticeNorm::Linf, z_window(lo, hi));
}

SpaceHandle z2_box(std::int64_t lo, std::int64_t hi, const std::string& name) {
    return make_lattice_space(name, 2, LatticeNorm::Linf, z2_window(lo, hi));
}

SpaceHandle even_line(std::int64_t lo, std::int64_t hi, const std::string& name) {
    std::vector<Point> w;
    for (std::int64_t x = lo; x <= hi; ++x)
        if (x % 2 == 0) w.push_back(Point(Point::Coords{x}));
    return make_lattice_space(name, 1, LatticeNorm::Linf, std::move(w));
}

namespace {

SpaceHandle two_clusters_space() {
    // two 5-point unit-diameter clusters at infinite mutual distance
    std::vector<Point> pts;
    for (int i = 0; i < 10; ++i) pts.push_back(Point("p" + std::to_string(i)));
    std::vector<std::vector<ExtDist>> d(10, std::vector<ExtDist>(10, ExtDist(0)));
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 10; ++j) {
            if (i == j) continue;
            bool same = (i < 5) == (j < 5);
            d[i][j] = same ? ExtDist(1) : ExtDist::inf();
        }
    return make_explicit_matrix_space("two_clusters", pts, d);
}

SpaceHandle path_graph_space(int n) {
    std::vector<std::string> v;
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i < n; ++i) v.push_back("v" + std::to_string(i));
    for (int i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
    return make_graph_space("path" + std::to_string(n), v, e, /*tree=*/true);
}

SpaceHandle star_tree_space(int arms, int arm_len) {
    std::vector<std::string> v{"c"};
    std::vector<std::pair<int, int>> e;
    for (int a = 0; a < arms; ++a) {
        int prev = 0;
        for (int s = 1; s <= arm_len; ++s) {
            v.push_back("a" + std::to_string(a) + "_" + std::to_string(s));
            e.emplace_back(prev, static_cast<int>(v.size()) - 1);
            prev = static_cast<int>(v.size()) - 1;
        }
    }
    return make_graph_space("star" + std::to_string(arms) + "x" + std::to_string(arm_len), v, e,
                            /*tree=*/true);
}

}  // namespace

std::vector<SpaceHandle> builtin_spaces() {
    return {
        z_line(-64, 64), z2_box(-8, 8), z_line(0, 256, "ray"), two_clusters_space(),
        path_graph_space(64), star_tree_space(3, 12),
    };
}

SpaceHandle builtin_space(const std::string& name) {
    if (name == "z1") return z_line(-64, 64);
    if (name == "z2") return z2_box(-8, 8);
    if (name == "z2_16") return z2_box(-16, 16);
    if (name == "ray") return z_line(0, 256, "ray");
    if (name == "ray4096") return z_line(0, 4096, "ray4096");
    if (name == "two_clusters") return two_clusters_space();
    if (name == "path64") return path_graph_space(64);
    if (name == "star") return star_tree_space(3, 12);
    throw SpaceError("UnknownSpace", "no built-in space named " + name);
}

PairwiseFamily builtin_family(const std::string& name) {
    PairwiseFamily f;
    if (name == "z2-axes") {
        f.labels = {"U", "V"};
        f.factors = {z_line(-16, 16, "U"), z_line(-16, 16, "V")};
        return f;  // full constraints
    }
    if (name == "diagonal") {
        f.labels = {"U", "V"};
        f.factors = {z_line(-8, 8, "U"), z_line(-8, 8, "V")};
        PairConstraint c;
        c.kind = PairConstraint::Kind::Diagonal;
        f.constraints[{0, 1}] = c;
        return f;
    }
    if (name.rfind("band-", 0) == 0) {
        f.labels = {"U", "V"};
        f.factors = {z_line(-8, 8, "U"), z_line(-8, 8, "V")};
        PairConstraint c;
        c.kind = PairConstraint::Kind::Band;
        c.band = Rational(std::stol(name.substr(5)));
        f.constraints[{0, 1}] = c;
        return f;
    }
    if (name == "tree-product") {
        f.labels = {"S", "T"};
        f.factors = {star_tree_space(3, 4), path_graph_space(9)};
        return f;
    }
    throw SpaceError("UnknownFamily", "no built-in family named " + name);
}

TotalSpaceCandidate builtin_candidate(const PairwiseFamily& f, const std::string& name) {
    TotalSpaceCandidate t;
    if (name == "product-linf") {
        // total space: the full product window under l-inf with coordinate projections
        std::vector<Point> window;
        std::vector<std::vector<Point>> grids;
        for (const auto& fac : f.factors) grids.push_back(fac->window);
        std::vector<size_t> idx(grids.size(), 0);
        bool done = grids.empty();
        while (!done) {
            Point::Tuple parts;
            for (size_t j = 0; j < grids.size(); ++j) parts.push_back(grids[j][idx[j]]);
            window.push_back(Point(std::move(parts)));
            int j = static_cast<int>(grids.size()) - 1;
            for (; j >= 0; --j) {
                if (++idx[j] < grids[j].size()) break;
                idx[j] = 0;
            }
            done = j < 0;
        }
        t.space = make_product_linf_space("total_product", f.factors, std::move(window));
        for (size_t u = 0; u < f.factors.size(); ++u) {
            std::vector<Point> vals;
            for (const auto& p : t.space->window) vals.push_back(p.tuple()[u]);
            t.projections.push_back(
                make_map_table("lambda_" + f.labels[u], t.space, f.factors[u], std::move(vals)));
        }
        return t;
    }
    if (name == "diagonal-line") {
        // total space Z with both projections the identity; fits the diagonal family
        t.space = f.factors[0];
        for (size_t u = 0; u < f.factors.size(); ++u)
            t.projections.push_back(identity_map(f.factors[0], f.factors[u]));
        return t;
    }
    throw SpaceError("UnknownCandidate", "no built-in candidate named " + name);
}

}  // namespace coarseforge
