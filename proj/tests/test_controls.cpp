#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "coarseforge/control.hpp"
#include "coarseforge/rng.hpp"

using namespace coarseforge;

namespace {

// independent oracle: scan a rational grid for inf{ s : target <= f(s) }
Rational scan_inverse_T(const ControlFn& f, const Rational& target, const Rational& hi,
                        const Rational& step) {
    for (Rational s = 0; s <= hi; s += step)
        if (target <= f.eval(s)) return s;
    return hi;
}

// independent oracle: scan for sup{ s : f(s) <= target }
Rational scan_perp(const ControlFn& f, const Rational& target, const Rational& hi,
                   const Rational& step) {
    Rational best = 0;
    for (Rational s = 0; s <= hi; s += step)
        if (f.eval(s) <= target) best = s;
    return best;
}

}  // namespace

TEST_CASE("eval of the closed forms") {
    CHECK(ControlFn::affine(1, 1).eval(3) == Rational(4));
    CHECK(ControlFn::exp_base(2).eval(3) == Rational(8));
    CHECK(ControlFn::step_table({{0, 1}, {2, 5}}, false, Rational(100)).eval(1) == Rational(1));
    CHECK(ControlFn::step_table({{0, 1}, {2, 5}}, false, Rational(100)).eval(2) == Rational(5));
    CHECK(ControlFn::polynomial({Rational(1), Rational(0), Rational(2)}).eval(3) == Rational(19));
    // interpolated exponential stays strictly monotone between integers
    CHECK(ControlFn::exp_base(2).eval(Rational(3, 2)) == Rational(3));
}

TEST_CASE("step table domain handling") {
    auto bounded = ControlFn::step_table({{0, 1}, {2, 5}}, false, Rational(10));
    CHECK(bounded.eval(10) == Rational(5));
    CHECK_THROWS_WITH_AS(bounded.eval(11), doctest::Contains("DomainExceeded"), ControlError);
    auto tailed = ControlFn::step_table({{0, 1}, {2, 5}}, true);
    CHECK(tailed.eval(7) == Rational(10));  // unit-slope tail
}

TEST_CASE("generalized inverse against the grid-scan oracle") {
    auto rho = ControlFn::affine(2, 0);
    auto g = ControlFn::inverse_T(rho);
    CHECK(g.eval(6) == scan_inverse_T(rho, 6, 10, Rational(1, 8)));
    CHECK(g.eval(6) == Rational(3));

    auto id = ControlFn::affine(1, 0);
    for (long t : {0L, 1L, 5L, 9L}) CHECK(ControlFn::inverse_T(id).eval(t) == Rational(t));

    auto shifted = ControlFn::affine(1, 1);
    CHECK(ControlFn::inverse_T(shifted).eval(Rational(1, 2)) ==
          scan_inverse_T(shifted, Rational(1, 2), 4, Rational(1, 16)));
    CHECK(ControlFn::inverse_T(shifted).eval(Rational(1, 2)) == Rational(0));
    CHECK(ControlFn::inverse_T(shifted).eval(5) == Rational(4));
}

TEST_CASE("inverse of a bounded function is rejected") {
    CHECK_THROWS_WITH_AS(ControlFn::inverse_T(ControlFn::affine(0, 3)).eval(7),
                         doctest::Contains("NotProper"), ControlError);
}

TEST_CASE("perp against the grid-scan oracle") {
    auto theta = ControlFn::exp_base(2);
    CHECK(ControlFn::perp(theta).eval(8) == scan_perp(theta, 8, 10, Rational(1, 8)));
    CHECK(ControlFn::perp(theta).eval(8) == Rational(3));
    // identity above 1
    CHECK(ControlFn::perp(ControlFn::affine(1, 0)).eval(1) == Rational(1));
    CHECK(ControlFn::perp(ControlFn::affine(1, 0)).eval(7) == Rational(7));
    CHECK(ControlFn::perp(ControlFn::affine(1, 1)).eval(4) == Rational(3));
    // below the bottom of the range the feasible set is empty
    CHECK(ControlFn::perp(ControlFn::affine(2, 1)).eval(Rational(1, 2)) == Rational(0));
}

TEST_CASE("composition evaluates outer after inner") {
    auto c = ControlFn::composed(ControlFn::affine(2, 0), ControlFn::affine(3, 1));
    CHECK(c.eval(1) == Rational(8));
    auto e = ControlFn::composed(ControlFn::exp_base(2), ControlFn::affine(1, 1));
    CHECK(e.eval(2) == Rational(8));
    auto idc = ControlFn::composed(ControlFn::affine(2, 5), ControlFn::identity());
    for (long t : {0L, 3L, 11L}) CHECK(idc.eval(t) == ControlFn::affine(2, 5).eval(t));
}

TEST_CASE("inverse of a composition is the reversed composition of inverses") {
    auto comp = ControlFn::composed(ControlFn::exp_base(2), ControlFn::affine(2, 1));
    auto inv = ControlFn::inverse_T(comp);
    for (long t : {1L, 2L, 9L, 100L}) {
        Rational s = inv.eval(t);
        CHECK(comp.eval(s) >= Rational(t));  // inf is attained for continuous forms
        CHECK(inv.eval(comp.eval(t)) <= Rational(t));
    }
}

TEST_CASE("Galois property decided without numeric inversion") {
    auto rho = ControlFn::step_table({{0, 0}, {1, 2}, {4, 9}}, true);
    Rng rng(5);
    for (int i = 0; i < 200; ++i) {
        Rational t(static_cast<long>(rng.below(64)), 1 + static_cast<long>(rng.below(4)));
        Rational s(static_cast<long>(rng.below(64)), 1 + static_cast<long>(rng.below(4)));
        bool direct = ControlFn::inverse_T(rho).eval(t) <= s;
        CHECK(direct == inverse_T_le(rho, t, s));
    }
}

TEST_CASE("class membership: Aff subset Poly subset All, affine in every class") {
    std::vector<ControlFn> fns = {
        ControlFn::affine(3, 2), ControlFn::polynomial({Rational(1), Rational(1), Rational(1)}),
        ControlFn::exp_base(2), ControlFn::step_table({{0, 1}, {3, 4}}, true),
        ControlFn::inverse_T(ControlFn::exp_base(2))};
    for (const auto& f : fns) {
        if (class_contains(ControlClass::Aff, f)) CHECK(class_contains(ControlClass::Poly, f));
        if (class_contains(ControlClass::Poly, f)) CHECK(class_contains(ControlClass::All, f));
        CHECK(class_contains(ControlClass::All, f));
    }
    CHECK(class_contains(ControlClass::Aff, ControlFn::affine(0, 7)));
    CHECK(class_contains(ControlClass::Poly, ControlFn::polynomial({Rational(0), Rational(0), Rational(2)})));
    CHECK_FALSE(class_contains(ControlClass::Aff, ControlFn::exp_base(2)));
    CHECK_FALSE(class_contains(ControlClass::Poly, ControlFn::exp_base(3)));
}

TEST_CASE("domination scan") {
    auto r1 = dominates_eventually(ControlFn::exp_base(2), ControlFn::affine(2, 1), 64);
    CHECK(r1.holds);
    CHECK(r1.threshold_t0 == Rational(3));

    auto r2 = dominates_eventually(ControlFn::affine(1, 0), ControlFn::affine(1, 0), 64);
    CHECK_FALSE(r2.holds);
    CHECK_FALSE(r2.inconclusive);

    auto r3 = dominates_eventually(ControlFn::exp_base(2), ControlFn::affine(1, 1), 64);
    CHECK(r3.holds);
    CHECK(r3.threshold_t0 == Rational(2));
}

TEST_CASE("affine fit: envelope over the samples") {
    auto f1 = fit_affine_upper_control({{1, 2}, {2, 4}});
    CHECK(f1.a == Rational(2));
    CHECK(f1.b == Rational(0));
    auto f2 = fit_affine_upper_control({{0, 0}});
    CHECK(f2.a == Rational(0));
    CHECK(f2.b == Rational(0));
    auto f3 = fit_affine_upper_control({{1, 3}, {4, 3}});
    CHECK(f3.a == Rational(0));
    CHECK(f3.b == Rational(3));
}

TEST_CASE("affine fit dominates every sample, pinned at the hull") {
    Rng rng(99);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<std::pair<Rational, Rational>> samples;
        int n = 1 + static_cast<int>(rng.below(12));
        for (int i = 0; i < n; ++i)
            samples.emplace_back(Rational(static_cast<long>(rng.below(20))),
                                 Rational(static_cast<long>(rng.below(40))));
        AffineFit fit = fit_affine_upper_control(samples);
        bool tight = false;
        for (const auto& [t, d] : samples) {
            CHECK(d <= fit.a * t + fit.b);
            tight = tight || d == fit.a * t + fit.b;
        }
        CHECK(tight);  // the envelope touches at least one sample
    }
}

TEST_CASE("monotonicity of every form on a grid") {
    std::vector<ControlFn> fns = {
        ControlFn::affine(2, 1), ControlFn::polynomial({Rational(1), Rational(2)}),
        ControlFn::exp_base(3), ControlFn::step_table({{0, 0}, {2, 3}, {5, 5}}, true),
        ControlFn::inverse_T(ControlFn::affine(3, 2)), ControlFn::perp(ControlFn::exp_base(2))};
    for (const auto& f : fns) {
        Rational prev = f.eval(0);
        for (Rational t = Rational(1, 4); t <= 20; t += Rational(1, 4)) {
            Rational cur = f.eval(t);
            CHECK(prev <= cur);
            prev = cur;
        }
    }
}
