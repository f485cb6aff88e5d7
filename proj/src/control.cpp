#include "coarseforge/control.hpp"

#include <algorithm>
#include <cmath>

namespace coarseforge {

namespace {

const Rational kInverseResolution = Rational(1, 1 << 20);

void require(bool cond, const char* code, const std::string& what) {
    if (!cond) throw ControlError(code, what);
}

}  // namespace

ControlFn ControlFn::affine(const Rational& a, const Rational& b) {
    require(a >= 0 && b >= 0, "BadForm", "affine coefficients must be nonnegative");
    auto n = std::make_shared<Node>();
    n->kind = Kind::Affine;
    n->a = a;
    n->b = b;
    return ControlFn(n);
}

ControlFn ControlFn::polynomial(std::vector<Rational> coeffs) {
    require(!coeffs.empty(), "BadForm", "polynomial needs at least one coefficient");
    for (const auto& c : coeffs) require(c >= 0, "BadForm", "polynomial coefficients must be nonnegative");
    while (coeffs.size() > 1 && coeffs.back() == 0) coeffs.pop_back();
    auto n = std::make_shared<Node>();
    n->kind = Kind::Polynomial;
    n->coeffs = std::move(coeffs);
    return ControlFn(n);
}

ControlFn ControlFn::exp_base(long base) {
    require(base >= 2, "BadForm", "exp_base requires an integer base >= 2");
    auto n = std::make_shared<Node>();
    n->kind = Kind::ExpBase;
    n->base = base;
    return ControlFn(n);
}

ControlFn ControlFn::step_table(std::vector<std::pair<Rational, Rational>> breakpoints,
                                bool proper_tail, std::optional<Rational> domain_bound) {
    require(!breakpoints.empty(), "BadForm", "step table needs at least one breakpoint");
    require(breakpoints.front().first == 0, "BadForm", "step table must start at t = 0");
    for (size_t i = 0; i < breakpoints.size(); ++i) {
        require(breakpoints[i].second >= 0, "BadForm", "step values must be nonnegative");
        if (i) {
            require(breakpoints[i - 1].first < breakpoints[i].first, "BadForm",
                    "step breakpoints must be strictly increasing");
            require(breakpoints[i - 1].second <= breakpoints[i].second, "BadForm",
                    "step values must be nondecreasing");
        }
    }
    auto n = std::make_shared<Node>();
    n->kind = Kind::StepTable;
    n->breakpoints = std::move(breakpoints);
    n->proper_tail = proper_tail;
    n->domain_bound = std::move(domain_bound);
    return ControlFn(n);
}

ControlFn ControlFn::composed(const ControlFn& outer, const ControlFn& inner) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Composed;
    n->outer = outer.node_;
    n->inner = inner.node_;
    return ControlFn(n);
}

ControlFn ControlFn::inverse_T(const ControlFn& of) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::InverseT;
    n->of = of.node_;
    return ControlFn(n);
}

ControlFn ControlFn::perp(const ControlFn& of) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Perp;
    n->of = of.node_;
    return ControlFn(n);
}

namespace {

Rational eval_node(const ControlFn::Node& n, const Rational& t);

/// b^t extended to rational t by linear interpolation between integer powers:
/// t = k + f gives b^k * (1 + (b-1) f). Exact, strictly increasing, agrees
/// with b^t at integers.
Rational eval_exp(long base, const Rational& t) {
    BigInt k = rat_floor(t);
    Rational frac = t - Rational(k);
    require(k >= 0, "BadForm", "exp_base evaluated at negative argument");
    BigInt pk = int_pow(BigInt(base), static_cast<unsigned long>(k));
    return Rational(pk) * (Rational(1) + Rational(base - 1) * frac);
}

Rational eval_step(const ControlFn::Node& n, const Rational& t) {
    require(t >= 0, "BadForm", "step table evaluated at negative argument");
    const auto& bp = n.breakpoints;
    if (t >= bp.back().first) {
        if (n.proper_tail) return bp.back().second + (t - bp.back().first);
        if (n.domain_bound && t > *n.domain_bound)
            throw ControlError("DomainExceeded",
                               "step table evaluated beyond declared domain bound");
        if (!n.domain_bound && t > bp.back().first)
            throw ControlError("DomainExceeded",
                               "step table without proper tail evaluated beyond last breakpoint");
        return bp.back().second;
    }
    // value of the last breakpoint <= t
    size_t lo = 0;
    for (size_t i = 0; i < bp.size(); ++i) {
        if (bp[i].first <= t) lo = i;
        else break;
    }
    return bp[lo].second;
}

bool node_proper(const ControlFn::Node& n) {
    switch (n.kind) {
        case ControlFn::Kind::Affine: return n.a > 0;
        case ControlFn::Kind::Polynomial: {
            for (size_t i = 1; i < n.coeffs.size(); ++i)
                if (n.coeffs[i] > 0) return true;
            return false;
        }
        case ControlFn::Kind::ExpBase: return true;
        case ControlFn::Kind::StepTable: return n.proper_tail;
        case ControlFn::Kind::Composed: return node_proper(*n.outer) && node_proper(*n.inner);
        case ControlFn::Kind::InverseT: return node_proper(*n.of);
        case ControlFn::Kind::Perp: return node_proper(*n.of);
    }
    return false;
}

bool node_exact(const ControlFn::Node& n) {
    switch (n.kind) {
        case ControlFn::Kind::Affine:
        case ControlFn::Kind::ExpBase:
        case ControlFn::Kind::StepTable:
            return true;
        case ControlFn::Kind::Polynomial:
            return true;  // forward evaluation is exact; inversion may not be
        case ControlFn::Kind::Composed:
            return node_exact(*n.outer) && node_exact(*n.inner);
        case ControlFn::Kind::InverseT:
        case ControlFn::Kind::Perp: {
            const auto& of = *n.of;
            if (of.kind == ControlFn::Kind::Polynomial) return of.coeffs.size() <= 2;
            if (of.kind == ControlFn::Kind::InverseT || of.kind == ControlFn::Kind::Perp)
                return false;
            if (of.kind == ControlFn::Kind::Composed)
                return node_exact(*n.of);  // inverse distributes over composition
            return true;
        }
    }
    return false;
}

/// inf{ s >= 0 : target <= f(s) } for nondecreasing right-continuous f; the
/// feasible set is closed and up-closed, so the inf is attained.
Rational inverse_T_value(const ControlFn::Node& f, const Rational& target);

/// sup{ s >= 0 : f(s) <= target }; 0 when the set is empty.
Rational perp_value(const ControlFn::Node& f, const Rational& target);

Rational binary_search_inf(const ControlFn::Node& f, const Rational& target) {
    // smallest s with f(s) >= target, to resolution kInverseResolution
    require(node_proper(f), "NotProper", "generalized inverse of a bounded function");
    if (eval_node(f, 0) >= target) return 0;
    Rational hi = 1;
    while (eval_node(f, hi) < target) hi *= 2;
    Rational lo = 0;
    while (hi - lo > kInverseResolution) {
        Rational mid = (lo + hi) / 2;
        if (eval_node(f, mid) >= target) hi = mid;
        else lo = mid;
    }
    return hi;
}

Rational binary_search_sup(const ControlFn::Node& f, const Rational& target) {
    // largest s with f(s) <= target, to resolution kInverseResolution
    if (eval_node(f, 0) > target) return 0;  // empty set convention
    require(node_proper(f), "NotProper", "perp of a bounded function is infinite above its range");
    Rational hi = 1;
    while (eval_node(f, hi) <= target) hi *= 2;
    Rational lo = 0;
    while (hi - lo > kInverseResolution) {
        Rational mid = (lo + hi) / 2;
        if (eval_node(f, mid) <= target) lo = mid;
        else hi = mid;
    }
    return lo;
}

Rational inverse_T_value(const ControlFn::Node& f, const Rational& target) {
    if (target <= 0) return 0;
    switch (f.kind) {
        case ControlFn::Kind::Affine: {
            require(f.a > 0, "NotProper", "inverse_T of a constant affine function");
            Rational s = (target - f.b) / f.a;
            return s < 0 ? Rational(0) : s;
        }
        case ControlFn::Kind::ExpBase: {
            if (target <= 1) return 0;
            BigInt k = 0;
            BigInt pk = 1;
            while (Rational(pk * f.base) < target) {
                pk *= f.base;
                ++k;
            }
            if (Rational(pk) >= target) return Rational(k);
            // target in (b^k, b^(k+1)]
            return Rational(k) + (target - Rational(pk)) / (Rational(pk) * (f.base - 1));
        }
        case ControlFn::Kind::StepTable: {
            const auto& bp = f.breakpoints;
            for (const auto& [s, v] : bp)
                if (v >= target) return s;
            require(f.proper_tail, "NotProper", "inverse_T beyond the range of a bounded step table");
            return bp.back().first + (target - bp.back().second);
        }
        case ControlFn::Kind::Composed:
            // (outer o inner)^T = inner^T o outer^T by the Galois property
            return inverse_T_value(*f.inner, inverse_T_value(*f.outer, target));
        case ControlFn::Kind::Polynomial: {
            if (f.coeffs.size() <= 2) {
                Rational a = f.coeffs.size() == 2 ? f.coeffs[1] : Rational(0);
                Rational b = f.coeffs[0];
                require(a > 0, "NotProper", "inverse_T of a constant polynomial");
                Rational s = (target - b) / a;
                return s < 0 ? Rational(0) : s;
            }
            return binary_search_inf(f, target);
        }
        case ControlFn::Kind::InverseT:
        case ControlFn::Kind::Perp:
            return binary_search_inf(f, target);
    }
    return 0;
}

Rational perp_value(const ControlFn::Node& f, const Rational& target) {
    switch (f.kind) {
        case ControlFn::Kind::Affine: {
            if (f.b > target) return 0;
            if (f.a == 0) {
                throw ControlError("NotProper", "perp of a constant function is unbounded");
            }
            return (target - f.b) / f.a;
        }
        case ControlFn::Kind::ExpBase: {
            if (target < 1) return 0;
            BigInt k = 0;
            BigInt pk = 1;
            while (Rational(pk * f.base) <= target) {
                pk *= f.base;
                ++k;
            }
            // target in [b^k, b^(k+1))
            return Rational(k) + (target - Rational(pk)) / (Rational(pk) * (f.base - 1));
        }
        case ControlFn::Kind::StepTable: {
            const auto& bp = f.breakpoints;
            if (bp.front().second > target) return 0;
            if (f.proper_tail && target >= bp.back().second)
                return bp.back().first + (target - bp.back().second);
            if (!f.proper_tail && target >= bp.back().second)
                throw ControlError("NotProper", "perp beyond the range of a bounded step table");
            // first breakpoint whose value exceeds target; sup is its abscissa
            for (size_t i = 0; i < bp.size(); ++i)
                if (bp[i].second > target) return bp[i].first;
            return bp.back().first;
        }
        case ControlFn::Kind::Composed:
            return perp_value(*f.inner, perp_value(*f.outer, target));
        case ControlFn::Kind::Polynomial: {
            if (f.coeffs.size() <= 2) {
                Rational a = f.coeffs.size() == 2 ? f.coeffs[1] : Rational(0);
                Rational b = f.coeffs[0];
                if (b > target) return 0;
                require(a > 0, "NotProper", "perp of a constant polynomial");
                return (target - b) / a;
            }
            return binary_search_sup(f, target);
        }
        case ControlFn::Kind::InverseT:
        case ControlFn::Kind::Perp:
            return binary_search_sup(f, target);
    }
    return 0;
}

Rational eval_node(const ControlFn::Node& n, const Rational& t) {
    require(t >= 0, "BadForm", "control functions are defined on [0,inf)");
    switch (n.kind) {
        case ControlFn::Kind::Affine:
            return n.a * t + n.b;
        case ControlFn::Kind::Polynomial: {
            Rational acc = 0;
            for (auto it = n.coeffs.rbegin(); it != n.coeffs.rend(); ++it) acc = acc * t + *it;
            return acc;
        }
        case ControlFn::Kind::ExpBase:
            return eval_exp(n.base, t);
        case ControlFn::Kind::StepTable:
            return eval_step(n, t);
        case ControlFn::Kind::Composed:
            return eval_node(*n.outer, eval_node(*n.inner, t));
        case ControlFn::Kind::InverseT:
            return inverse_T_value(*n.of, t);
        case ControlFn::Kind::Perp:
            return perp_value(*n.of, t);
    }
    throw ControlError("BadForm", "unknown control form");
}

}  // namespace

Rational ControlFn::eval(const Rational& t) const { return eval_node(*node_, t); }

bool ControlFn::proper() const { return node_proper(*node_); }

bool ControlFn::exact_invertible() const { return node_exact(*node_); }

std::string ControlFn::describe() const {
    const Node& n = *node_;
    switch (n.kind) {
        case Kind::Affine: return "affine(" + rat_str(n.a) + "," + rat_str(n.b) + ")";
        case Kind::Polynomial: {
            std::string s = "poly(";
            for (size_t i = 0; i < n.coeffs.size(); ++i)
                s += (i ? "," : "") + rat_str(n.coeffs[i]);
            return s + ")";
        }
        case Kind::ExpBase: return "exp_base(" + std::to_string(n.base) + ")";
        case Kind::StepTable: return "step_table[" + std::to_string(n.breakpoints.size()) + "]";
        case Kind::Composed:
            return ControlFn(n.outer).describe() + " o " + ControlFn(n.inner).describe();
        case Kind::InverseT: return "inverse_T(" + ControlFn(n.of).describe() + ")";
        case Kind::Perp: return "perp(" + ControlFn(n.of).describe() + ")";
    }
    return "?";
}

namespace {

bool aff_bounded(const ControlFn::Node& n) {
    switch (n.kind) {
        case ControlFn::Kind::Affine: return true;
        case ControlFn::Kind::Polynomial: return n.coeffs.size() <= 2;
        case ControlFn::Kind::ExpBase: return false;
        case ControlFn::Kind::StepTable: return true;  // bounded or unit-slope tail
        case ControlFn::Kind::Composed: return aff_bounded(*n.outer) && aff_bounded(*n.inner);
        case ControlFn::Kind::InverseT:
        case ControlFn::Kind::Perp:
            // inverse of a proper function grows at most linearly once the
            // function dominates t (exp, poly of degree >= 1, slope-1 tails);
            // conservative: require the inverted form to be proper.
            return node_proper(*n.of);
    }
    return false;
}

bool poly_bounded(const ControlFn::Node& n) {
    if (aff_bounded(n)) return true;
    switch (n.kind) {
        case ControlFn::Kind::Polynomial: return true;
        case ControlFn::Kind::Composed: return poly_bounded(*n.outer) && poly_bounded(*n.inner);
        default: return false;
    }
}

}  // namespace

bool class_contains(ControlClass cls, const ControlFn& f) {
    switch (cls) {
        case ControlClass::Aff: return aff_bounded(f.node());
        case ControlClass::Poly: return poly_bounded(f.node());
        case ControlClass::All: return true;
    }
    return false;
}

std::string class_name(ControlClass cls) {
    switch (cls) {
        case ControlClass::Aff: return "Aff";
        case ControlClass::Poly: return "Poly";
        case ControlClass::All: return "All";
    }
    return "?";
}

bool inverse_T_le(const ControlFn& rho, const Rational& t, const Rational& s) {
    return t <= rho.eval(s);
}

bool perp_ge(const ControlFn& theta, const Rational& t, const Rational& s) {
    return theta.eval(s) <= t;
}

DominationResult dominates_eventually(const ControlFn& theta, const ControlFn& rho,
                                      const Rational& scan_bound, const Rational& step) {
    DominationResult res;
    if (step <= 0 || scan_bound < 0) {
        res.inconclusive = true;
        return res;
    }
    std::vector<Rational> grid;
    for (Rational t = 0; t <= scan_bound; t += step) grid.push_back(t);
    if (grid.size() < 2) {
        res.inconclusive = true;
        return res;
    }
    // last grid point where rho(t) >= theta(t); domination holds from the next one
    std::optional<size_t> last_violation;
    for (size_t i = 0; i < grid.size(); ++i) {
        if (rho.eval(grid[i]) >= theta.eval(grid[i])) last_violation = i;
    }
    if (!last_violation) {
        res.holds = true;
        res.threshold_t0 = grid.front();
        return res;
    }
    if (*last_violation + 1 < grid.size()) {
        res.holds = true;
        res.threshold_t0 = grid[*last_violation + 1];
        return res;
    }
    res.holds = false;
    res.witness_t = grid[*last_violation];
    return res;
}

AffineFit fit_affine_upper_control(const std::vector<std::pair<Rational, Rational>>& samples) {
    if (samples.empty()) throw ControlError("BadInput", "fit requires at least one sample");
    // dedupe to the max output per input, sorted by input
    std::vector<std::pair<Rational, Rational>> pts(samples);
    std::sort(pts.begin(), pts.end());
    std::vector<std::pair<Rational, Rational>> uniq;
    for (const auto& p : pts) {
        if (!uniq.empty() && uniq.back().first == p.first) uniq.back().second = p.second;
        else uniq.push_back(p);
    }
    // upper convex hull, left to right (slopes strictly decreasing)
    std::vector<std::pair<Rational, Rational>> hull;
    for (const auto& p : uniq) {
        while (hull.size() >= 2) {
            const auto& q = hull[hull.size() - 1];
            const auto& r = hull[hull.size() - 2];
            // drop q when it lies on or below the chord r -> p
            Rational lhs = (q.second - r.second) * (p.first - q.first);
            Rational rhs = (p.second - q.second) * (q.first - r.first);
            if (lhs <= rhs) hull.pop_back();
            else break;
        }
        hull.push_back(p);
    }
    // slope of the rightmost hull segment, clamped at 0
    Rational a = 0;
    if (hull.size() >= 2) {
        const auto& q = hull[hull.size() - 2];
        const auto& r = hull[hull.size() - 1];
        Rational slope = (r.second - q.second) / (r.first - q.first);
        if (slope > 0) a = slope;
    }
    Rational b = 0;
    bool clamped = true;
    for (const auto& [t, d] : uniq) {
        Rational need = d - a * t;
        if (need > b) {
            b = need;
            clamped = false;
        }
    }
    if (clamped || b == 0) {
        // zero offset suffices: shrink the slope to the tightest through-origin bound
        Rational ratio = 0;
        for (const auto& [t, d] : uniq)
            if (t > 0 && d / t > ratio) ratio = d / t;
        a = ratio;
        b = 0;
    }
    return AffineFit{a, b};
}

std::vector<Rational> fit_poly_upper_control(
    const std::vector<std::pair<Rational, Rational>>& samples, int degree) {
    if (samples.empty()) throw ControlError("BadInput", "fit requires at least one sample");
    if (degree < 1) degree = 1;
    Rational c0 = 0;
    for (const auto& [t, d] : samples)
        if (t == 0 && d > c0) c0 = d;
    Rational ck = 0;
    for (const auto& [t, d] : samples) {
        if (t == 0) continue;
        Rational tk = 1;
        for (int i = 0; i < degree; ++i) tk *= t;
        Rational need = (d - c0) / tk;
        if (need > ck) ck = need;
    }
    std::vector<Rational> coeffs(static_cast<size_t>(degree) + 1, Rational(0));
    coeffs[0] = c0;
    coeffs[static_cast<size_t>(degree)] = ck;
    return coeffs;
}

}  // namespace coarseforge
