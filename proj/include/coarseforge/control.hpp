#pragma once

#include "coarseforge/rational.hpp"

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace coarseforge {

/// Error raised by control-function operations (NotProper, DomainExceeded, ...).
struct ControlError : std::runtime_error {
    std::string code;
    ControlError(std::string c, const std::string& what)
        : std::runtime_error(c + ": " + what), code(std::move(c)) {}
};

/**
 * A nondecreasing function [0,inf) -> [0,inf) in closed or tabular form.
 *
 * Supported forms: affine a*t+b, polynomial with nonnegative coefficients,
 * integer-base exponential (piecewise linear between integer exponents, so
 * evaluation stays exact on rationals), step tables, composition, and the two
 * lazy generalized inverses
 *
 *   inverse_T(f)(t) = inf{ s >= 0 : t <= f(s) }
 *   perp(f)(t)      = sup{ s >= 0 : f(s) <= t }   (sup of the empty set is 0).
 *
 * Values are immutable after construction and safe to share across threads.
 * All arithmetic is exact rational; inverses of affine, exponential, step and
 * compositions thereof evaluate in closed form. Inverting a polynomial of
 * degree >= 2 falls back to binary search at resolution 2^-20.
 */
class ControlFn {
public:
    enum class Kind { Affine, Polynomial, ExpBase, StepTable, Composed, InverseT, Perp };

    struct Node;
    using NodePtr = std::shared_ptr<const Node>;

    struct Node {
        Kind kind;
        // affine
        Rational a, b;
        // polynomial: coeffs[i] * t^i
        std::vector<Rational> coeffs;
        // exp_base
        long base = 0;
        // step_table
        std::vector<std::pair<Rational, Rational>> breakpoints;
        bool proper_tail = false;           // true: unit-slope tail beyond last breakpoint
        std::optional<Rational> domain_bound;  // for non-proper tables
        // composed / wrappers
        NodePtr outer, inner, of;
    };

    ControlFn() = default;

    static ControlFn affine(const Rational& a, const Rational& b);
    static ControlFn polynomial(std::vector<Rational> coeffs);
    static ControlFn exp_base(long base);
    static ControlFn step_table(std::vector<std::pair<Rational, Rational>> breakpoints,
                                bool proper_tail,
                                std::optional<Rational> domain_bound = std::nullopt);
    static ControlFn composed(const ControlFn& outer, const ControlFn& inner);
    static ControlFn inverse_T(const ControlFn& of);
    static ControlFn perp(const ControlFn& of);
    static ControlFn identity() { return affine(1, 0); }

    bool valid() const { return node_ != nullptr; }
    const Node& node() const { return *node_; }
    Kind kind() const { return node_->kind; }

    /// Rewrap a child node (used by serialization to walk composed forms).
    static ControlFn wrap(NodePtr n) { return ControlFn(std::move(n)); }

    /// f(t) for t >= 0. Exact for all forms except binary-searched inverses of
    /// polynomials of degree >= 2.
    Rational eval(const Rational& t) const;

    /// Whether the function is proper (eval -> inf) judging by its form.
    bool proper() const;

    /// Whether eval is exact in closed form (no binary-search fallback anywhere).
    bool exact_invertible() const;

    std::string describe() const;

private:
    explicit ControlFn(NodePtr n) : node_(std::move(n)) {}
    NodePtr node_;
};

/// Control classes of the calculus: Aff (bounded by an affine function),
/// Poly (bounded by a polynomial), All (everything). Membership is decided
/// syntactically on the form and is conservative; Aff implies Poly implies All.
enum class ControlClass { Aff, Poly, All };

bool class_contains(ControlClass cls, const ControlFn& f);
std::string class_name(ControlClass cls);

/// g(t) <= s  <=>  t <= rho(s): decide "inverse_T(rho)(t) <= s" exactly via the
/// Galois correspondence, without evaluating the inverse numerically.
bool inverse_T_le(const ControlFn& rho, const Rational& t, const Rational& s);

/// s <= perp(theta)(t)  <=>  theta(s) <= t, decided exactly.
bool perp_ge(const ControlFn& theta, const Rational& t, const Rational& s);

struct DominationResult {
    bool holds = false;
    bool inconclusive = false;
    Rational threshold_t0 = 0;  // when holds
    Rational witness_t = 0;     // last grid point with rho(t) >= theta(t), when it fails
};

/// Window-certified domination scan: least grid t0 with rho(t) < theta(t) for
/// every grid t in [t0, scan_bound], grid step `step`.
DominationResult dominates_eventually(const ControlFn& theta, const ControlFn& rho,
                                      const Rational& scan_bound, const Rational& step = 1);

struct AffineFit {
    Rational a = 0, b = 0;
};

/**
 * Least affine upper bound for sampled pairs (t_in, t_out): the slope is the
 * slope of the rightmost segment of the upper convex hull of the samples
 * (clamped to >= 0), i.e. the smallest slope that stays an upper bound when
 * extrapolated past the sampled range; the offset is then the least feasible.
 */
AffineFit fit_affine_upper_control(const std::vector<std::pair<Rational, Rational>>& samples);

/// Least envelope c_k*t^k + c_0 of fixed degree k over the samples.
std::vector<Rational> fit_poly_upper_control(
    const std::vector<std::pair<Rational, Rational>>& samples, int degree);

}  // namespace coarseforge
