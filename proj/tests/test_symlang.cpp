#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "jlm/calculus.hpp"
#include "jlm/domain.hpp"
#include "jlm/equivalence.hpp"
#include "jlm/eval.hpp"
#include "jlm/expr.hpp"
#include "jlm/parser.hpp"
#include "jlm/render.hpp"
#include "jlm/simplify.hpp"

using namespace jlm;

namespace {

int count_kind(const Expr& e, Kind k) {
    int n = e.kind() == k ? 1 : 0;
    for (const auto& c : e.kids()) n += count_kind(c, k);
    return n;
}

bool same(const Expr& a, const Expr& b) { return structural_equal(simplify(a), simplify(b)); }

bool same(const std::string& a, const std::string& b) { return same(parse(a), parse(b)); }

}  // namespace

TEST_CASE("parse builds normalized trees for textbook inputs") {
    Expr e = parse("x*(A - B*y)");
    CHECK(e.kind() == Kind::Add);  // products distribute over sums when normalizing
    CHECK(e.kids().size() == 2);
    CHECK(same(e, parse("A*x - B*x*y")));
    CHECK(evaluate(e, {{"x", 2.0}, {"A", 3.0}, {"B", 5.0}, {"y", 7.0}}) ==
          doctest::Approx(2.0 * (3.0 - 5.0 * 7.0)));

    Expr w = parse("v^2/2 - x^(n+1)/(n+1)");
    CHECK(count_kind(w, Kind::Pow) >= 2);
    CHECK(evaluate(w, {{"v", 3.0}, {"x", 2.0}, {"n", 1.0}}) == doctest::Approx(4.5 - 2.0));
}

TEST_CASE("parse reports syntax errors with byte offsets") {
    try {
        parse("3*");
        FAIL("expected a syntax error");
    } catch (const ParseError& err) {
        CHECK(err.offset() == 2);
        CHECK(!err.expected().empty());
    }
    CHECK_THROWS_AS(parse("(x"), ParseError);
    CHECK_THROWS_AS(parse("x +* y"), ParseError);
    CHECK_THROWS_AS(parse("foo(x)"), ParseError);  // unknown function name
}

TEST_CASE("unary minus binds tighter than the power operator") {
    // factor := unary ('^' factor)?  puts '-' inside the base: -x^2 == (-x)^2.
    CHECK(same("-x^2", "x^2"));
    CHECK(same("-(x^2)", "0 - x^2"));
    CHECK(evaluate(parse("-x^2"), {{"x", 3.0}}) == doctest::Approx(9.0));
    CHECK(evaluate(parse("-(x^2)"), {{"x", 3.0}}) == doctest::Approx(-9.0));
    // '^' itself is right-associative.
    CHECK(evaluate(parse("2^3^2"), {}) == doctest::Approx(512.0));
}

TEST_CASE("decimal literals become exact rationals") {
    Expr e = parse("2.5");
    REQUIRE(e.is_number());
    CHECK(e.value() == Rational(5, 2));
    CHECK(parse("0.125").value() == Rational(1, 8));
}

TEST_CASE("evaluate handles arithmetic, functions, and quadrature") {
    CHECK(evaluate(parse("exp(2*b*t)"), {{"b", 1.0}, {"t", 0.0}}) == doctest::Approx(1.0));
    CHECK(evaluate(parse("1/(x*y)"), {{"x", 2.0}, {"y", 4.0}}) == doctest::Approx(0.125));
    CHECK(evaluate(parse("integral(z^2, z, 0, x)"), {{"x", 3.0}}) ==
          doctest::Approx(9.0).epsilon(1e-9));
    CHECK(evaluate(parse("sqrt(x)"), {{"x", 9.0}}) == doctest::Approx(3.0));
}

TEST_CASE("evaluate raises typed errors") {
    try {
        evaluate(parse("x + q"), {{"x", 1.0}});
        FAIL("expected an unbound-symbol error");
    } catch (const EvalError& err) {
        CHECK(err.kind() == EvalError::Kind::UnboundSymbol);
    }
    try {
        evaluate(parse("log(x)"), {{"x", -1.0}});
        FAIL("expected a domain violation");
    } catch (const EvalError& err) {
        CHECK(err.kind() == EvalError::Kind::DomainViolation);
    }
    try {
        evaluate(integral(parse("exp(0 - z^2)"), "z", sym("x")), {{"x", 1.0}});
        FAIL("expected an indefinite-integral error");
    } catch (const EvalError& err) {
        CHECK(err.kind() == EvalError::Kind::Indefinite);
    }
}

TEST_CASE("differentiate matches hand-computed derivatives") {
    CHECK(same(differentiate(parse("-(log(y))/x"), "y"), parse("-(1/(x*y))")));
    CHECK(same(differentiate(parse("exp(2*b*t)"), "t"), parse("2*b*exp(2*b*t)")));
    CHECK(same(differentiate(parse("sin(x^2)"), "x"), parse("2*x*cos(x^2)")));
    CHECK(same(differentiate(parse("x*log(x) - x"), "x"), parse("log(x)")));
}

TEST_CASE("differentiating an integral applies the fundamental theorem") {
    // d/dx of an integral up to x recovers the integrand at x.
    Expr up = integral(parse("t*z^2"), "z", sym("x"));
    CHECK(same(differentiate(up, "x"), parse("t*x^2")));
    // d/dt passes under the integral sign.
    Expr under = differentiate(integral(parse("t*z^2"), "z", num(0), sym("x")), "t");
    Domain d;
    d.set_interval("x", 0.5, 2.0);
    CHECK(equivalent(under, parse("x^3/3"), d).equal);
}

TEST_CASE("antiderivative returns closed forms with side conditions") {
    Antiderivative p = antiderivative(parse("x^n"), "x");
    CHECK(p.exact);
    CHECK(!p.remainder.has_value());
    CHECK(same(p.expr, parse("x^(n+1)/(n+1)")));
    bool guards_n = false;
    for (const auto& c : p.nonzero_conditions) guards_n = guards_n || same(c, parse("n+1"));
    CHECK(guards_n);

    Antiderivative lg = antiderivative(parse("1/y"), "y");
    CHECK(lg.exact);
    CHECK(same(lg.expr, parse("log(y)")));

    Antiderivative gauss = antiderivative(parse("exp(-(z^2))"), "z");
    CHECK(!gauss.exact);
    CHECK(gauss.remainder.has_value());
    CHECK(count_kind(gauss.expr, Kind::Integral) == 1);
}

TEST_CASE("simplify collapses the standard identities") {
    CHECK(structural_equal(simplify(parse("x + x")), parse("2*x")));
    CHECK(simplify(parse("exp(t)*exp(-t)")).is_one());
    CHECK(structural_equal(simplify(parse("(x^2 - x^2) + y")), sym("y")));
    CHECK(simplify(parse("x/x")).is_one());
    CHECK(structural_equal(simplify(parse("x^(1+n)/(1+n)*(1+n)")), parse("x^(1+n)")));
}

TEST_CASE("equivalent distinguishes symbolic, numeric, and false") {
    Domain d;
    EquivResult algebraic = equivalent(parse("(x+1)^2"), parse("x^2 + 2*x + 1"), d);
    CHECK(algebraic.equal);
    CHECK(algebraic.mode == CheckMode::Symbolic);

    Domain pos;
    pos.set_interval("x", 0.0, 5.0);
    pos.set_interval("y", 0.0, 5.0);
    CHECK(equivalent(parse("log(x*y)"), parse("log(x) + log(y)"), pos).equal);

    CHECK(!equivalent(parse("x"), parse("x + 0.001"), d).equal);
}

TEST_CASE("sampling rejects excluded surfaces and honors pins") {
    Domain d;
    d.set_interval("x", -1.0, 1.0);
    d.pin("a", 0.75);
    d.exclude(parse("x"));
    Rng rng(kDefaultSeed);
    for (int i = 0; i < 50; ++i) {
        auto pt = d.sample({"x", "a"}, rng);
        CHECK(std::fabs(pt.at("x")) > Domain::kExcludeTol);
        CHECK(pt.at("a") == doctest::Approx(0.75));
    }
    Domain bad;
    bad.set_interval("x", 0.0, 1e-12);
    bad.exclude(parse("x"));
    Rng r2(kDefaultSeed);
    CHECK_THROWS_AS(bad.sample({"x"}, r2), SamplingError);
}

// ---------------------------------------------------------------------------
// Property suites (fixed seed, generated cases)
// ---------------------------------------------------------------------------

namespace {

// Random member of the closed antiderivative class: sums of coefficient *
// {power of v, 1/v, exp/sin/cos of linear-in-v}.
Expr random_integrable(Rng& rng) {
    auto coeff = [&]() -> Expr {
        switch (rng.next_u64() % 4) {
            case 0: return num(1 + static_cast<long long>(rng.next_u64() % 5));
            case 1: return num(static_cast<long long>(rng.next_u64() % 7) - 3, 2);
            case 2: return sym("a");
            default: return sym("t");
        }
    };
    auto term = [&]() -> Expr {
        Expr c = coeff();
        long long s = 1 + static_cast<long long>(rng.next_u64() % 3);
        switch (rng.next_u64() % 6) {
            case 0: return c * pow(sym("v"), num(static_cast<long long>(rng.next_u64() % 5)));
            case 1: return c * pow(sym("v"), num(-2));
            case 2: return c / sym("v");
            case 3: return c * exp(num(s) * sym("v"));
            case 4: return c * sin(num(s) * sym("v"));
            default: return c * cos(num(s) * sym("v") + num(1));
        }
    };
    Expr e = term();
    std::uint64_t extra = rng.next_u64() % 3;
    for (std::uint64_t i = 0; i < extra; ++i) e = e + term();
    return simplify(e);
}

// Random smooth expression in t and x for derivative and idempotence checks.
Expr random_smooth(Rng& rng, int depth) {
    if (depth <= 0) {
        switch (rng.next_u64() % 4) {
            case 0: return sym("t");
            case 1: return sym("x");
            case 2: return num(static_cast<long long>(rng.next_u64() % 5) - 2);
            default: return num(static_cast<long long>(1 + rng.next_u64() % 4), 2);
        }
    }
    Expr a = random_smooth(rng, depth - 1);
    Expr b = random_smooth(rng, depth - 1);
    switch (rng.next_u64() % 6) {
        case 0: return a + b;
        case 1: return a - b;
        case 2: return a * b;
        case 3: return pow(a, num(static_cast<long long>(1 + rng.next_u64() % 3)));
        case 4: return sin(a);
        default: return cos(a) + log(num(2) + sym("x") * sym("x"));
    }
}

}  // namespace

TEST_CASE("property: differentiating an antiderivative recovers the integrand") {
    Rng rng(kDefaultSeed);
    int checked = 0;
    for (int i = 0; i < 220; ++i) {
        Expr e = random_integrable(rng);
        Antiderivative ad = antiderivative(e, "v");
        REQUIRE(ad.exact);
        Expr back = differentiate(ad.expr, "v");
        Domain d;
        d.set_interval("v", 0.4, 1.9);
        d.set_interval("a", 0.5, 2.0);
        d.set_interval("t", 0.5, 2.0);
        EquivResult eq = equivalent(back, e, d.with_excluded(ad.nonzero_conditions));
        CHECK_MESSAGE(eq.equal, "case ", i, ": d/dv of antiderivative of ", render(e),
                      " gave ", render(back));
        ++checked;
    }
    CHECK(checked >= 200);
}

TEST_CASE("property: symbolic derivatives agree with central finite differences") {
    Rng rng(kDefaultSeed + 1);
    const double h = 1e-6;
    int checked = 0;
    for (int i = 0; i < 200; ++i) {
        Expr e = random_smooth(rng, 2);
        Expr de = differentiate(e, "x");
        for (int k = 0; k < 3; ++k) {
            Bindings at{{"t", rng.uniform(-1.5, 1.5)}, {"x", rng.uniform(-1.5, 1.5)}};
            double sym_val;
            double up, dn;
            try {
                sym_val = evaluate(de, at);
                Bindings hi = at, lo = at;
                hi["x"] += h;
                lo["x"] -= h;
                up = evaluate(e, hi);
                dn = evaluate(e, lo);
            } catch (const EvalError&) {
                continue;  // landed outside a function domain; draw again
            }
            double fd = (up - dn) / (2.0 * h);
            double scale = 1.0 + std::fabs(sym_val);
            CHECK_MESSAGE(std::fabs(fd - sym_val) <= 1e-5 * scale, "case ", i, ": ", render(e),
                          " at t=", at["t"], " x=", at["x"]);
            ++checked;
        }
    }
    CHECK(checked >= 200);
}

TEST_CASE("property: simplify is idempotent") {
    Rng rng(kDefaultSeed + 2);
    for (int i = 0; i < 120; ++i) {
        Expr once = simplify(random_smooth(rng, 3));
        CHECK_MESSAGE(structural_equal(simplify(once), once), "case ", i, ": ", render(once));
    }
    for (int i = 0; i < 120; ++i) {
        Expr once = simplify(random_integrable(rng));
        CHECK_MESSAGE(structural_equal(simplify(once), once), "case ", i, ": ", render(once));
    }
}

TEST_CASE("property: rendering then parsing reproduces the normalized tree") {
    Rng rng(kDefaultSeed + 3);
    for (int i = 0; i < 200; ++i) {
        Expr e = simplify(i % 2 ? random_smooth(rng, 3) : random_integrable(rng));
        Expr back = parse(render(e));
        CHECK_MESSAGE(structural_equal(back, e), "case ", i, ": ", render(e));
    }
    // Integral nodes render in callable form too.
    Expr node = integral(parse("exp(-(z^2))"), "z", num(0), sym("x"));
    CHECK(structural_equal(parse(render(node)), simplify(node)));
}
