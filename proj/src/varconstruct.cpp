#include "jlm/varconstruct.hpp"

#include <cmath>

#include "jlm/calculus.hpp"
#include "jlm/render.hpp"
#include "jlm/simplify.hpp"

namespace jlm {
namespace {

std::string fresh_name(std::string base, const std::set<std::string>& taken) {
    while (taken.count(base)) base += "_";
    return base;
}

EquivResult merge(const EquivResult& a, const EquivResult& b) {
    EquivResult r;
    r.equal = a.equal && b.equal;
    r.mode = (a.mode == CheckMode::Numeric || b.mode == CheckMode::Numeric) ? CheckMode::Numeric
                                                                            : CheckMode::Symbolic;
    r.max_deviation = std::max(a.max_deviation, b.max_deviation);
    return r;
}

// Is `e`, as a function of name, of the form  c + a*name^k  /  c + a*log(name)?
struct YPattern {
    Expr a, c;        // y-free
    bool log = false;
    Rational k{1};
};

std::optional<YPattern> match_invertible(const Expr& e, const std::string& y) {
    YPattern pat;
    std::vector<Expr> cs, as;
    std::optional<Rational> k;
    bool saw_log = false;
    for (const auto& term : additive_terms(e)) {
        if (!term.depends_on(y)) {
            cs.push_back(term);
            continue;
        }
        std::vector<Expr> coeff;
        std::optional<Rational> deg;
        bool lg = false;
        for (const auto& f : multiplicative_factors(term)) {
            if (!f.depends_on(y)) {
                coeff.push_back(f);
            } else if (f.is_symbol(y)) {
                if (deg || lg) return std::nullopt;
                deg = Rational(1);
            } else if (f.kind() == Kind::Pow && f.kids()[0].is_symbol(y) &&
                       f.kids()[1].is_number()) {
                if (deg || lg) return std::nullopt;
                deg = f.kids()[1].value();
            } else if (f.is_fun("log") && f.kids()[0].is_symbol(y)) {
                if (deg || lg) return std::nullopt;
                lg = true;
            } else {
                return std::nullopt;
            }
        }
        if (lg) {
            if (k) return std::nullopt;
            saw_log = true;
        } else if (deg) {
            if (saw_log) return std::nullopt;
            if (k && *k != *deg) return std::nullopt;
            k = *deg;
        }
        as.push_back(coeff.empty() ? num(1) : (coeff.size() == 1 ? coeff[0] : mul(coeff)));
    }
    if (as.empty()) return std::nullopt;
    pat.a = simplify(add(as));
    pat.c = cs.empty() ? num(0) : simplify(add(cs));
    pat.log = saw_log;
    if (k) pat.k = *k;
    if (pat.a.is_zero()) return std::nullopt;
    return pat;
}

}  // namespace

Expr LambdaForm::mu() const {
    return simplify(differentiate(m_y, x) - differentiate(m_x, y));
}
Expr LambdaForm::w_x() const { return simplify(differentiate(m_x, t) - differentiate(h, x)); }
Expr LambdaForm::w_y() const { return simplify(differentiate(m_y, t) - differentiate(h, y)); }

AffineLagrangian lagrangian_of(const LambdaForm& lf) {
    std::set<std::string> taken;
    for (const auto& e : {lf.m_x, lf.m_y, lf.h})
        for (const auto& s : free_symbols(e)) taken.insert(s);
    taken.insert(lf.t);
    taken.insert(lf.x);
    taken.insert(lf.y);
    AffineLagrangian out;
    out.vx = fresh_name("d" + lf.x, taken);
    taken.insert(out.vx);
    out.vy = fresh_name("d" + lf.y, taken);
    out.lagrangian = simplify(lf.m_x * sym(out.vx) + lf.m_y * sym(out.vy) + lf.h);
    out.energy = simplify(num(0) - lf.h);
    return out;
}

LambdaForm solve_lambda_form(const FirstOrderSystem& sys, const Multiplier& mult,
                             bool swap_gauge, const EquivOptions& opts) {
    if (sys.dim() != 2)
        throw ConstructionError("lambda-form construction needs a planar system");
    LambdaForm lf;
    lf.t = sys.time();
    lf.x = sys.states()[0];
    lf.y = sys.states()[1];
    lf.nonzero_conditions = mult.nonzero_conditions;

    // In the swapped gauge exchange the roles of the two coordinates; the
    // multiplier of the swapped system is -mu.
    const std::string& xa = swap_gauge ? lf.y : lf.x;
    const std::string& ya = swap_gauge ? lf.x : lf.y;
    Expr vel_x = swap_gauge ? sys.velocity(1) : sys.velocity(0);
    Expr vel_y = swap_gauge ? sys.velocity(0) : sys.velocity(1);
    Expr mu = swap_gauge ? simplify(num(0) - mult.mu) : mult.mu;

    auto absorb = [&lf](const Antiderivative& a) {
        lf.exact = lf.exact && a.exact;
        for (const auto& s : a.nonzero_conditions) lf.nonzero_conditions.push_back(s);
    };

    // m_a = -int mu dy_a;  dh/dy_a = mu * X_a  =>  h = int mu X_a dy_a + g(t, x_a)
    Antiderivative int_mu = antiderivative(mu, ya);
    absorb(int_mu);
    Expr m_a = simplify(num(0) - int_mu.expr);
    Antiderivative int_mux = antiderivative(simplify(mu * vel_x), ya);
    absorb(int_mux);
    Expr h_partial = int_mux.expr;

    // remaining equation: d(m_a)/dt - dh/dx_a = mu * Y_a fixes g up to g(t)
    Expr rem = simplify(differentiate(m_a, lf.t) - differentiate(h_partial, xa) - mu * vel_y);
    if (rem.depends_on(ya)) {
        Expr ry = differentiate(rem, ya);
        bool flat = ry.is_zero();
        if (!flat) {
            Domain d = sys.domain().with_excluded(lf.nonzero_conditions);
            try {
                flat = equivalent(ry, num(0), d, opts).equal;
            } catch (const SamplingError&) {
                flat = false;
            }
        }
        if (!flat)
            throw ConstructionError(
                "construction is inconsistent: the source term for dh/dx depends on the "
                "other coordinate (residual " +
                render(rem) + "); the multiplier is not valid");
        auto base = sys.domain().base_point({ya});
        rem = simplify(substitute(rem, ya, num(base.at(ya))));
    }
    Antiderivative g = antiderivative(rem, xa);
    absorb(g);
    Expr h = simplify(h_partial + g.expr);

    if (swap_gauge) {
        lf.m_x = num(0);
        lf.m_y = m_a;
    } else {
        lf.m_x = m_a;
        lf.m_y = num(0);
    }
    lf.h = h;
    return lf;
}

EquivResult euler_lagrange_check(const FirstOrderSystem& sys, const LambdaForm& lf,
                                 const EquivOptions& opts) {
    Expr mu = lf.mu();
    Domain d = sys.domain().with_excluded(lf.nonzero_conditions);
    Expr r1 = simplify(mu * sys.velocity(0) + lf.w_y());
    Expr r2 = simplify(mu * sys.velocity(1) - lf.w_x());
    EquivResult a = equivalent(r1, num(0), d, opts);
    if (!a.equal) return a;
    return merge(a, equivalent(r2, num(0), d, opts));
}

LambdaForm gauge_transform(const LambdaForm& lf, const Expr& f) {
    LambdaForm out = lf;
    out.m_x = simplify(lf.m_x + differentiate(f, lf.x));
    out.m_y = simplify(lf.m_y + differentiate(f, lf.y));
    out.h = simplify(lf.h + differentiate(f, lf.t));
    return out;
}

std::optional<Expr> gauge_equivalent(const LambdaForm& a, const LambdaForm& b, const Domain& d,
                                     const EquivOptions& opts) {
    Expr dmx = simplify(a.m_x - b.m_x);
    Expr dmy = simplify(a.m_y - b.m_y);
    Expr dh = simplify(a.h - b.h);
    Domain dd = d.with_excluded(a.nonzero_conditions).with_excluded(b.nonzero_conditions);

    auto vanishes = [&](const Expr& e) {
        if (e.is_zero()) return true;
        try {
            return equivalent(e, num(0), dd, opts).equal;
        } catch (const SamplingError&) {
            return false;
        }
    };
    // the difference must be closed: d(lambda_a - lambda_b) = 0
    if (!vanishes(simplify(differentiate(dmy, a.x) - differentiate(dmx, a.y)))) return std::nullopt;
    if (!vanishes(simplify(differentiate(dmx, a.t) - differentiate(dh, a.x)))) return std::nullopt;
    if (!vanishes(simplify(differentiate(dmy, a.t) - differentiate(dh, a.y)))) return std::nullopt;

    auto base = dd.base_point({a.t, a.x, a.y});
    Expr t0 = num(base.at(a.t)), x0 = num(base.at(a.x)), y0 = num(base.at(a.y));
    std::map<std::string, Expr> at_x0y0{{a.x, x0}, {a.y, y0}};
    Antiderivative leg_t = definite_integral(substitute(dh, at_x0y0), a.t, t0, sym(a.t));
    Antiderivative leg_x = definite_integral(substitute(dmx, a.y, y0), a.x, x0, sym(a.x));
    Antiderivative leg_y = definite_integral(dmy, a.y, y0, sym(a.y));
    Expr f = simplify(leg_t.expr + leg_x.expr + leg_y.expr);

    if (!vanishes(simplify(differentiate(f, a.x) - dmx))) return std::nullopt;
    if (!vanishes(simplify(differentiate(f, a.y) - dmy))) return std::nullopt;
    if (!vanishes(simplify(differentiate(f, a.t) - dh))) return std::nullopt;
    return f;
}

HamiltonianDescription hamiltonianize(const FirstOrderSystem& sys, const LambdaForm& lf0) {
    LambdaForm lf = lf0;
    if (!lf.m_y.is_zero()) {
        Antiderivative red = antiderivative(lf.m_y, lf.y);
        if (!red.exact)
            throw ConstructionError("cannot reduce to the gauge m_y = 0 in closed form");
        lf = gauge_transform(lf, simplify(num(0) - red.expr));
        if (!lf.m_y.is_zero())
            throw ConstructionError("gauge reduction left a remainder in m_y");
        for (const auto& s : red.nonzero_conditions) lf.nonzero_conditions.push_back(s);
    }

    HamiltonianDescription hd;
    hd.t_name = lf.t;
    hd.x_name = lf.x;
    hd.y_name = lf.y;
    std::set<std::string> taken;
    for (const auto& s : sys.all_symbols()) taken.insert(s);
    hd.q_name = fresh_name("q", taken);
    taken.insert(hd.q_name);
    hd.p_name = fresh_name("p", taken);
    hd.p_of = simplify(num(0) - lf.m_x);
    hd.h_source = lf.h;
    hd.nonzero_conditions = lf.nonzero_conditions;

    auto pat = match_invertible(hd.p_of, lf.y);
    if (pat) {
        std::map<std::string, Expr> to_q{{lf.x, sym(hd.q_name)}};
        Expr a_q = simplify(substitute(pat->a, to_q));
        Expr c_q = simplify(substitute(pat->c, to_q));
        Expr u = simplify((sym(hd.p_name) - c_q) / a_q);
        Expr y_of;
        if (pat->log) {
            y_of = exp(u);
        } else if (pat->k == Rational(1)) {
            y_of = u;
        } else {
            y_of = pow(u, num(Rational(1) / pat->k));
        }
        hd.y_of = simplify(y_of);
        hd.symbolic_inverse = true;
        if (!a_q.is_number()) hd.nonzero_conditions.push_back(a_q);
        std::map<std::string, Expr> back{{lf.x, sym(hd.q_name)}, {lf.y, *hd.y_of}};
        hd.hamiltonian = simplify(substitute(lf.h, back));
    }
    return hd;
}

double invert_p(const HamiltonianDescription& hd, double t, double q, double p, double y_guess,
                const Bindings& params) {
    Expr dpdy = differentiate(hd.p_of, hd.y_name);
    Bindings env = params;
    env[hd.t_name] = t;
    env[hd.x_name] = q;
    double y = y_guess;
    for (int it = 0; it < 60; ++it) {
        env[hd.y_name] = y;
        double f = evaluate(hd.p_of, env) - p;
        if (std::abs(f) < 1e-13 * (1.0 + std::abs(p))) return y;
        double df = evaluate(dpdy, env);
        if (df == 0 || !std::isfinite(df))
            throw ConstructionError("p-inversion stalled: dp/dy vanished");
        y -= f / df;
        if (!std::isfinite(y)) throw ConstructionError("p-inversion diverged");
    }
    throw ConstructionError("p-inversion did not converge");
}

}  // namespace jlm
