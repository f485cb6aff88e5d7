#pragma once

#include "coarseforge/rational.hpp"

namespace coarseforge {

/// Extended distance: a nonnegative rational or infinity. Infinity is a tagged
/// value, never a numeric sentinel, so the extended-metric laws a + inf = inf
/// and min(a, inf) = a hold by construction.
struct ExtDist {
    bool infinite = false;
    Rational value = 0;

    ExtDist() = default;
    ExtDist(const Rational& v) : infinite(false), value(v) {}
    ExtDist(long v) : infinite(false), value(v) {}

    static ExtDist inf() {
        ExtDist d;
        d.infinite = true;
        return d;
    }

    bool is_inf() const { return infinite; }
    bool is_finite() const { return !infinite; }

    /// Finite payload; calling this on infinity is a programming error.
    const Rational& finite() const { return value; }

    friend ExtDist operator+(const ExtDist& a, const ExtDist& b) {
        if (a.infinite || b.infinite) return inf();
        return ExtDist(a.value + b.value);
    }

    friend bool operator==(const ExtDist& a, const ExtDist& b) {
        if (a.infinite != b.infinite) return false;
        return a.infinite || a.value == b.value;
    }
    friend bool operator!=(const ExtDist& a, const ExtDist& b) { return !(a == b); }

    friend bool operator<(const ExtDist& a, const ExtDist& b) {
        if (a.infinite) return false;
        if (b.infinite) return true;
        return a.value < b.value;
    }
    friend bool operator<=(const ExtDist& a, const ExtDist& b) { return a < b || a == b; }
    friend bool operator>(const ExtDist& a, const ExtDist& b) { return b < a; }
    friend bool operator>=(const ExtDist& a, const ExtDist& b) { return b <= a; }
};

inline ExtDist ext_min(const ExtDist& a, const ExtDist& b) { return a < b ? a : b; }
inline ExtDist ext_max(const ExtDist& a, const ExtDist& b) { return a < b ? b : a; }

inline std::string ext_str(const ExtDist& d) { return d.is_inf() ? "inf" : rat_str(d.finite()); }

}  // namespace coarseforge
