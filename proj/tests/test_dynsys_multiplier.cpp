#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <string>
#include <vector>

#include "doctest.h"
#include "jlm/equivalence.hpp"
#include "jlm/multiplier.hpp"
#include "jlm/parser.hpp"
#include "jlm/render.hpp"
#include "jlm/simplify.hpp"
#include "jlm/system.hpp"

using namespace jlm;

namespace {

bool same(const Expr& a, const Expr& b) { return structural_equal(simplify(a), simplify(b)); }

bool same(const Expr& a, const std::string& b) { return same(a, parse(b)); }

Domain positive(std::initializer_list<std::string> names, double lo = 0.2, double hi = 2.0) {
    Domain d;
    for (const auto& n : names) {
        d.set_interval(n, lo, hi);
        d.exclude(sym(n));
    }
    return d;
}

// Predator-prey system x' = x*(A + C*y), y' = y*(K + M*x) with symbolic rates.
FirstOrderSystem classical_lv() {
    return FirstOrderSystem("t", {"x", "y"},
                            {parse("x*(A + C*y)"), parse("y*(K + M*x)")},
                            {{"A", Rational(1)}, {"C", Rational(-1)}, {"K", Rational(-1)},
                             {"M", Rational(1)}},
                            positive({"x", "y"}));
}

// Two-species quadratic growth model with pinned rational rates.
FirstOrderSystem generalized_lv() {
    return FirstOrderSystem("t", {"x", "y"},
                            {parse("x*(1 + 2*x + y)"), parse("y*(1 + x + 2*y)")}, {},
                            positive({"x", "y"}));
}

FirstOrderSystem rotation() {
    return FirstOrderSystem("t", {"x", "y"}, {sym("y"), num(0) - sym("x")}, {}, Domain{});
}

FirstOrderSystem damped_oscillator() {
    MechanicalSystem m{parse("-(omega^2)*x - 2*b*v"),
                       {{"omega", Rational(1)}, {"b", Rational(1, 4)}},
                       Domain{}};
    return lift(m);
}

}  // namespace

TEST_CASE("lifting a second-order equation produces (position, velocity) states") {
    FirstOrderSystem damped = damped_oscillator();
    REQUIRE(damped.states() == std::vector<std::string>{"x", "v"});
    CHECK(same(damped.velocity(0), "v"));
    CHECK(same(damped.velocity(1), "-(omega^2)*x - 2*b*v"));
    CHECK(damped.is_lifted_mechanical());

    FirstOrderSystem free_particle = lift(MechanicalSystem{num(0), {}, Domain{}});
    CHECK(same(free_particle.velocity(0), "v"));
    CHECK(free_particle.velocity(1).is_zero());

    MechanicalSystem lane{parse("-(2/t)*v - x^n"), {{"n", Rational(5)}}, positive({"t", "x"})};
    FirstOrderSystem lifted = lift(lane);
    CHECK(same(lifted.velocity(1), "-(2/t)*v - x^n"));
    // A first state equation other than "the second state" is not a lift.
    CHECK(!FirstOrderSystem("t", {"x", "y"}, {parse("x*y"), sym("x")}, {}, Domain{})
               .is_lifted_mechanical());
}

TEST_CASE("divergence sums the diagonal derivatives of the velocity field") {
    CHECK(same(divergence(damped_oscillator()), "-2*b"));
    CHECK(same(divergence(classical_lv()), "A + C*y + K + M*x"));
    CHECK(divergence(rotation()).is_zero());
}

TEST_CASE("the dynamics vector field acts as d/dt along trajectories") {
    FirstOrderSystem lv = classical_lv();
    CHECK(gamma_apply(lv, sym("t")).is_one());
    CHECK(same(gamma_apply(damped_oscillator(), sym("x")), "v"));
    // Conserved quantity of the predator-prey flow.
    Expr f = parse("K*log(x) + M*x - A*log(y) - C*y");
    CHECK(gamma_apply(lv, f).is_zero());
}

TEST_CASE("verify accepts the classic stationary-density factors symbolically") {
    FirstOrderSystem lv = classical_lv();
    Multiplier m = verify_multiplier(lv, parse("1/(x*y)"));
    CHECK(m.verified == CheckMode::Symbolic);
    CHECK(m.residual.is_zero());

    FirstOrderSystem hp("t", {"x", "y"}, {parse("x*(A - B*y)"), parse("y*(C - D*y/x)")},
                        {{"A", Rational(1)}, {"B", Rational(1)}, {"C", Rational(1)},
                         {"D", Rational(1)}},
                        positive({"x", "y"}));
    Multiplier hm = verify_multiplier(hp, parse("exp(C*t)/(x*y^2)"));
    CHECK(hm.verified == CheckMode::Symbolic);

    Multiplier unit = verify_multiplier(rotation(), num(1));
    CHECK(unit.verified == CheckMode::Symbolic);
}

TEST_CASE("verify rejects a non-multiplier and attaches the residual") {
    try {
        verify_multiplier(damped_oscillator(), num(1));
        FAIL("expected rejection");
    } catch (const NotAMultiplierError& err) {
        CHECK(same(err.residual(), "-2*b"));
    }
    CHECK_THROWS_AS(verify_multiplier(classical_lv(), num(0)), VanishingMultiplierError);
    // x^2 + y^2 is conserved by the rotation, hence a genuine multiplier, but
    // near the origin it dips below the nonvanishing floor and is rejected.
    Domain tiny;
    tiny.set_interval("x", -1e-5, 1e-5);
    tiny.set_interval("y", -1e-5, 1e-5);
    FirstOrderSystem rot("t", {"x", "y"}, {sym("y"), num(0) - sym("x")}, {}, tiny);
    CHECK_THROWS_AS(verify_multiplier(rot, parse("x^2 + y^2")), VanishingMultiplierError);
}

TEST_CASE("find matches the quasi-polynomial ansatz on the quadratic growth model") {
    Multiplier m = find_multiplier(generalized_lv());
    CHECK(m.family == MultiplierFamily::MonomialExponential);
    CHECK(same(m.mu, "exp(4*t/3)*x^(-5/3)*y^(-5/3)"));
    CHECK(m.verified == CheckMode::Symbolic);
}

TEST_CASE("find uses the time-only family when the divergence depends on t alone") {
    MechanicalSystem m{parse("cos(t)*v - x"), {}, Domain{}};
    Multiplier found = find_multiplier(lift(m));
    CHECK(found.family == MultiplierFamily::TimeOnly);
    Domain d;
    CHECK(equivalent(found.mu, parse("exp(-sin(t))"), d).equal);

    Multiplier damped = find_multiplier(damped_oscillator());
    CHECK(damped.family == MultiplierFamily::TimeOnly);
    CHECK(same(damped.mu, "exp(2*b*t)"));
}

TEST_CASE("find handles velocity-quadratic forces by exact line integration") {
    MechanicalSystem m{parse("3*v^2/x + v/t"), {}, positive({"t", "x"})};
    Multiplier found = find_multiplier(lift(m));
    CHECK(found.family == MultiplierFamily::MechanicalQuadratic);
    Domain d = positive({"t", "x"});
    CHECK(equivalent(found.mu, parse("1/(t*x^6)"), d).equal);
}

TEST_CASE("find reports every family attempt when nothing matches") {
    // A force with an essential v^3 term defeats all closed-form families.
    MechanicalSystem m{parse("v^3 + x*v^2"), {}, Domain{}};
    try {
        find_multiplier(lift(m));
        FAIL("expected exhaustion");
    } catch (const NoMultiplierError& err) {
        CHECK(err.attempts().size() >= 4);
    }
}

TEST_CASE("find is deterministic") {
    Multiplier a = find_multiplier(generalized_lv());
    Multiplier b = find_multiplier(generalized_lv());
    CHECK(structural_equal(a.mu, b.mu));
    CHECK(a.family == b.family);
}

TEST_CASE("classify derives force templates from a prescribed profile shape") {
    ForceFamily t_only = classify_force(ForceShape::MuOfT, parse("exp(2*b*t)"));
    CHECK(same(t_only.derived.at("k"), "-2*b"));
    CHECK(same(substitute(t_only.template_expr, {{"phi", num(0)}}), "-2*b*v"));

    ForceFamily x_only = classify_force(ForceShape::MuOfX, parse("x^(-6)"));
    CHECK(same(x_only.derived.at("k"), "3/x"));
    CHECK(same(substitute(x_only.template_expr, {{"phi", num(0)}}), "(3/x)*v^2"));

    ForceFamily trivial = classify_force(ForceShape::MuOfV, num(1));
    CHECK(same(trivial.template_expr, "phi"));

    CHECK_THROWS_AS(classify_force(ForceShape::MuOfT, parse("x + t")), std::invalid_argument);
}

TEST_CASE("classify recovers separated profiles from their expanded form") {
    ForceFamily fam = classify_force(ForceShape::ProductTV, parse("exp(t)*(1 + v^2)"));
    CHECK(same(fam.derived.at("a"), "exp(t)"));
    CHECK(same(fam.derived.at("b"), "1 + v^2"));
    CHECK(same(fam.derived.at("rate"), "-1"));
    CHECK(force_family_roundtrip(fam, {{"phi", parse("x^2 + t")}}, Domain{}));

    ForceFamily merged = classify_force(ForceShape::ProductTV, parse("exp(t)*exp(v)"));
    CHECK(same(merged.derived.at("a"), "exp(t)"));
    CHECK(same(merged.derived.at("b"), "exp(v)"));

    CHECK_THROWS_AS(classify_force(ForceShape::ProductTV, parse("exp(t) + v")),
                    std::invalid_argument);
    CHECK_THROWS_AS(classify_force(ForceShape::ProductTV, parse("exp(t*v)")),
                    std::invalid_argument);
}

TEST_CASE("instantiated force templates satisfy the defining identity") {
    ForceFamily t_only = classify_force(ForceShape::MuOfT, parse("exp(2*b*t)"));
    CHECK(force_family_roundtrip(t_only, {{"phi", parse("-(omega^2)*x")}}, Domain{}));

    ForceFamily product = classify_force(ForceShape::ProductTV, parse("exp(t)"));
    CHECK(force_family_roundtrip(product, {{"phi", num(0)}}, Domain{}));

    ForceFamily mixed = classify_force(ForceShape::MuOfTX, parse("exp(2*t + 4*log(x))"));
    CHECK(force_family_roundtrip(mixed, {{"phi", sym("x")}}, positive({"x"})));

    // Negative control: adding v^3 to the template breaks the identity.
    ForceFamily broken = t_only;
    broken.template_expr = broken.template_expr + pow(sym("v"), num(3));
    CHECK(!force_family_roundtrip(broken, {{"phi", parse("-(omega^2)*x")}}, Domain{}));
}

// ---------------------------------------------------------------------------
// Property suites (fixed seed)
// ---------------------------------------------------------------------------

TEST_CASE("property: nonzero rational multiples of a multiplier stay multipliers") {
    FirstOrderSystem lv = classical_lv();
    FirstOrderSystem damped = damped_oscillator();
    Rng rng(kDefaultSeed);
    int checked = 0;
    for (int i = 0; i < 100; ++i) {
        long long n = 1 + static_cast<long long>(rng.next_u64() % 9);
        long long d = 1 + static_cast<long long>(rng.next_u64() % 4);
        long long sign = (rng.next_u64() & 1) ? 1 : -1;
        Expr c = num(Rational(sign * n, d));
        Multiplier a = verify_multiplier(lv, c * parse("1/(x*y)"));
        CHECK(a.verified == CheckMode::Symbolic);
        Multiplier b = verify_multiplier(damped, c * parse("exp(2*b*t)"));
        CHECK(b.verified == CheckMode::Symbolic);
        checked += 2;
    }
    CHECK(checked >= 200);
}

TEST_CASE("property: a multiplier times a positive first integral is a multiplier") {
    FirstOrderSystem lv = classical_lv();
    Expr f = parse("K*log(x) + M*x - A*log(y) - C*y");
    REQUIRE(gamma_apply(lv, f).is_zero());
    // exp of a conserved quantity is conserved and never vanishes.
    Expr g = exp(f);
    REQUIRE(gamma_apply(lv, g).is_zero());
    Multiplier m = verify_multiplier(lv, g * parse("1/(x*y)"));
    bool tight = m.verified != CheckMode::Numeric || m.residual_bound < 1e-9;
    CHECK(tight);

    // Scaled variants g^c for small integer powers c.
    for (long long c = 2; c <= 4; ++c) {
        Multiplier mc = verify_multiplier(lv, pow(g, num(c)) * parse("1/(x*y)"));
        CHECK((mc.verified == CheckMode::Symbolic || mc.verified == CheckMode::Numeric));
    }
}

TEST_CASE("property: on divergence-free systems verified multipliers are conserved") {
    FirstOrderSystem rot = rotation();
    REQUIRE(divergence(rot).is_zero());
    for (const auto& src : {"1 + x^2 + y^2", "exp(x^2 + y^2)", "2 + sin(x^2 + y^2)"}) {
        Expr mu = parse(src);
        Multiplier m = verify_multiplier(rot, mu);
        CHECK(m.verified == CheckMode::Symbolic);
        CHECK(gamma_apply(rot, mu).is_zero());
    }
}

TEST_CASE("property: divergence equals minus the logarithmic rate of any multiplier") {
    FirstOrderSystem lv = classical_lv();
    CHECK(same(divergence(lv), num(0) - gamma_apply(lv, log(parse("1/(x*y)")))));
    FirstOrderSystem damped = damped_oscillator();
    CHECK(same(divergence(damped), num(0) - gamma_apply(damped, log(parse("exp(2*b*t)")))));
}
