#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

namespace coarseforge {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline BigInt rat_num(const Rational& q) { return boost::multiprecision::numerator(q); }
inline BigInt rat_den(const Rational& q) { return boost::multiprecision::denominator(q); }

/// Largest integer <= q.
inline BigInt rat_floor(const Rational& q) {
    BigInt n = rat_num(q), d = rat_den(q);
    BigInt t = n / d;
    if (n < 0 && t * d != n) --t;
    return t;
}

/// Smallest integer >= q.
inline BigInt rat_ceil(const Rational& q) {
    BigInt n = rat_num(q), d = rat_den(q);
    BigInt t = n / d;
    if (n > 0 && t * d != n) ++t;
    return t;
}

inline Rational rat_abs(const Rational& q) { return q < 0 ? Rational(-q) : q; }

inline Rational rat_max(const Rational& a, const Rational& b) { return a < b ? b : a; }
inline Rational rat_min(const Rational& a, const Rational& b) { return a < b ? a : b; }

inline std::string rat_str(const Rational& q) {
    if (rat_den(q) == 1) return rat_num(q).str();
    return rat_num(q).str() + "/" + rat_den(q).str();
}

/// b^e for integer e >= 0.
inline BigInt int_pow(const BigInt& b, unsigned long e) {
    BigInt r = 1, base = b;
    while (e) {
        if (e & 1) r *= base;
        base *= base;
        e >>= 1;
    }
    return r;
}

}  // namespace coarseforge
