#include "jlm/multiplier.hpp"

#include <sstream>

#include "jlm/calculus.hpp"
#include "jlm/linalg.hpp"
#include "jlm/render.hpp"
#include "jlm/simplify.hpp"

namespace jlm {
namespace {

// Nonvanishing "where defined": exponentials, nonzero constants, negative
// powers, and products thereof. Used when sampling cannot decide (e.g. the
// multiplier still carries an unevaluated integral).
bool never_zero(const Expr& e) {
    switch (e.kind()) {
        case Kind::Number:
            return !e.is_zero();
        case Kind::Fun:
            return e.name() == "exp";
        case Kind::Pow: {
            const Expr& ex = e.kids()[1];
            if (ex.is_number() && ex.value().is_negative()) return true;
            return never_zero(e.kids()[0]);
        }
        case Kind::Mul: {
            for (const auto& k : e.kids())
                if (!never_zero(k)) return false;
            return true;
        }
        default:
            return false;
    }
}

std::string describe(double x) {
    std::ostringstream os;
    os << x;
    return os.str();
}

std::optional<Multiplier> try_verify(const FirstOrderSystem& sys, const Expr& mu,
                                     std::vector<Expr> sides, MultiplierFamily fam,
                                     const EquivOptions& opts, std::string& note) {
    try {
        return verify_multiplier(sys, mu, std::move(sides), fam, opts);
    } catch (const NotAMultiplierError& e) {
        note = e.what();
    } catch (const VanishingMultiplierError& e) {
        note = e.what();
    } catch (const SamplingError& e) {
        note = e.what();
    }
    return std::nullopt;
}

std::optional<Multiplier> family_constant(const FirstOrderSystem& sys, const EquivOptions& opts,
                                          std::string& note) {
    Expr d = divergence(sys);
    if (!d.is_zero()) {
        EquivResult eq;
        try {
            eq = equivalent(d, num(0), sys.domain(), opts);
        } catch (const SamplingError& e) {
            note = e.what();
            return std::nullopt;
        }
        if (!eq.equal) {
            note = "velocity field has nonzero divergence";
            return std::nullopt;
        }
    }
    return try_verify(sys, num(1), {}, MultiplierFamily::ConstantOne, opts, note);
}

std::optional<Multiplier> family_time_only(const FirstOrderSystem& sys, const EquivOptions& opts,
                                           std::string& note) {
    Expr d = divergence(sys);
    std::set<std::string> allowed{sys.time()};
    for (const auto& p : sys.params()) allowed.insert(p.name);
    for (const auto& s : free_symbols(d)) {
        if (!allowed.count(s)) {
            note = "divergence depends on the state";
            return std::nullopt;
        }
    }
    Antiderivative integral_d = antiderivative(d, sys.time());
    Expr mu = simplify(exp(num(0) - integral_d.expr));
    return try_verify(sys, mu, integral_d.nonzero_conditions, MultiplierFamily::TimeOnly, opts,
                      note);
}

std::optional<Multiplier> family_mech_quadratic(const FirstOrderSystem& sys,
                                                const EquivOptions& opts, std::string& note) {
    if (!sys.is_lifted_mechanical()) {
        note = "not a lifted second-order equation";
        return std::nullopt;
    }
    const std::string& t = sys.time();
    const std::string& x = sys.states()[0];
    const std::string& v = sys.states()[1];
    auto cp = collect_powers(sys.velocity(1), v);
    if (!cp) {
        note = "force is not polynomial in the velocity";
        return std::nullopt;
    }
    Expr lin = num(0), quad = num(0);
    for (const auto& [deg, c] : *cp) {
        if (deg == Rational(1))
            lin = c;
        else if (deg == Rational(2))
            quad = c;
        else if (deg != Rational(0)) {
            note = "force has velocity powers outside {0, 1, 2}";
            return std::nullopt;
        }
    }
    if (lin.is_zero() && quad.is_zero()) {
        note = "force is velocity-independent";
        return std::nullopt;
    }
    EquivResult closed;
    try {
        closed = equivalent(differentiate(lin, x), num(2) * differentiate(quad, t),
                            sys.domain(), opts);
    } catch (const SamplingError& e) {
        note = e.what();
        return std::nullopt;
    }
    if (!closed.equal) {
        note = "velocity coefficients fail the closedness condition "
               "d(lin)/dx = 2 d(quad)/dt";
        return std::nullopt;
    }
    auto base = sys.domain().base_point({t, x});
    Expr t0 = num(base.at(t)), x0 = num(base.at(x));
    Antiderivative leg_t = definite_integral(substitute(lin, x, x0), t, t0, sym(t));
    Antiderivative leg_x = definite_integral(num(2) * quad, x, x0, sym(x));
    std::vector<Expr> sides = leg_t.nonzero_conditions;
    sides.insert(sides.end(), leg_x.nonzero_conditions.begin(),
                 leg_x.nonzero_conditions.end());
    Expr mu = simplify(exp(num(0) - leg_t.expr - leg_x.expr));
    return try_verify(sys, mu, std::move(sides), MultiplierFamily::MechanicalQuadratic, opts,
                      note);
}

std::optional<Multiplier> family_monomial(const FirstOrderSystem& sys, const EquivOptions& opts,
                                          std::string& note) {
    const auto& st = sys.states();
    const std::size_t n = st.size();
    std::set<std::string> taken;
    for (const auto& s : sys.all_symbols()) taken.insert(s);
    std::vector<std::string> pname(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::string c = "_p" + std::to_string(i);
        while (taken.count(c)) c = "_" + c;
        pname[i] = c;
        taken.insert(c);
    }

    Expr balance = divergence(sys);
    for (std::size_t i = 0; i < n; ++i)
        balance = balance + sym(pname[i]) * sys.velocity(i) / sym(st[i]);
    balance = simplify(balance);

    std::set<std::string> statetime(st.begin(), st.end());
    statetime.insert(sys.time());
    auto depends_state = [&](const Expr& e) { return e.depends_on_any(statetime); };
    auto unknown_index = [&](const Expr& e) -> int {
        if (e.kind() != Kind::Symbol) return -1;
        for (std::size_t i = 0; i < n; ++i)
            if (e.name() == pname[i]) return static_cast<int>(i);
        return -1;
    };

    std::map<Expr, std::vector<Expr>, ExprLess> groups;
    for (const auto& term : additive_terms(balance)) {
        std::vector<Expr> key, coeff;
        for (const auto& f : multiplicative_factors(term))
            (depends_state(f) ? key : coeff).push_back(f);
        Expr k = key.empty() ? num(1) : (key.size() == 1 ? key[0] : mul(key));
        groups[k].push_back(coeff.empty() ? num(1) : (coeff.size() == 1 ? coeff[0] : mul(coeff)));
    }

    QMat rows_a;
    QVec rows_b;
    Expr const_group = num(0);
    for (const auto& [key, parts] : groups) {
        if (key.is_one()) {
            const_group = simplify(add(parts));
            continue;
        }
        std::map<Expr, std::pair<QVec, Rational>, ExprLess> rows;
        for (const auto& part : parts) {
            Rational c(1);
            int pj = -1;
            std::vector<Expr> pkey;
            for (const auto& f : multiplicative_factors(part)) {
                int idx = unknown_index(f);
                if (idx >= 0) {
                    if (pj >= 0) {
                        note = "balance equations are not linear in the exponents";
                        return std::nullopt;
                    }
                    pj = idx;
                } else if (f.is_number()) {
                    c = c * f.value();
                } else {
                    pkey.push_back(f);
                }
            }
            Expr pk = pkey.empty() ? num(1) : (pkey.size() == 1 ? pkey[0] : mul(pkey));
            auto& row = rows[pk];
            if (row.first.empty()) row.first.assign(n, Rational(0));
            if (pj >= 0)
                row.first[pj] = row.first[pj] + c;
            else
                row.second = row.second + c;
        }
        for (const auto& [pk, row] : rows) {
            rows_a.push_back(row.first);
            rows_b.push_back(Rational(0) - row.second);
        }
    }

    QVec exponents(n, Rational(0));
    if (!rows_a.empty()) {
        LinearSolution sol = solve_linear(rows_a, rows_b);
        if (!sol.consistent) {
            note = "no constant exponents balance the divergence "
                   "(coefficients may need numeric values)";
            return std::nullopt;
        }
        exponents = sol.particular;
    }

    std::map<std::string, Expr> subs;
    for (std::size_t i = 0; i < n; ++i) subs[pname[i]] = num(exponents[i]);
    Expr rate = simplify(num(0) - substitute(const_group, subs));
    if (rate.depends_on_any(statetime)) {
        note = "exponential rate would depend on time or the state";
        return std::nullopt;
    }

    Expr mu = rate.is_zero() ? num(1) : exp(rate * sym(sys.time()));
    for (std::size_t i = 0; i < n; ++i) mu = mu * pow(sym(st[i]), num(exponents[i]));
    mu = simplify(mu);
    return try_verify(sys, mu, {}, MultiplierFamily::MonomialExponential, opts, note);
}

std::optional<Multiplier> family_single_state(const FirstOrderSystem& sys,
                                              const EquivOptions& opts, std::string& note) {
    Expr div = divergence(sys);
    if (div.is_zero()) {
        note = "divergence-free field already handled by the constant family";
        return std::nullopt;
    }
    std::set<std::string> params;
    for (const auto& p : sys.params()) params.insert(p.name);
    std::string why = "divergence/velocity ratio depends on more than one state";
    for (std::size_t k = 0; k < sys.dim(); ++k) {
        const Expr& xk_vel = sys.velocity(k);
        if (xk_vel.is_zero()) continue;
        Expr g = simplify(div / xk_vel);
        bool single = true;
        for (const auto& s : free_symbols(g)) {
            if (s != sys.states()[k] && !params.count(s)) {
                single = false;
                break;
            }
        }
        if (!single) continue;
        Antiderivative big_g = antiderivative(g, sys.states()[k]);
        Expr mu = simplify(exp(num(0) - big_g.expr));
        auto m = try_verify(sys, mu, big_g.nonzero_conditions, MultiplierFamily::SingleState,
                            opts, why);
        if (m) return m;
    }
    note = why;
    return std::nullopt;
}

}  // namespace

std::string family_name(MultiplierFamily f) {
    switch (f) {
        case MultiplierFamily::UserProvided: return "user-supplied";
        case MultiplierFamily::ConstantOne: return "constant";
        case MultiplierFamily::TimeOnly: return "time-only";
        case MultiplierFamily::MechanicalQuadratic: return "exp-phi-quadratic-force";
        case MultiplierFamily::MonomialExponential: return "monomial-exponential";
        case MultiplierFamily::SingleState: return "state-only";
    }
    return "?";
}

Expr multiplier_residual(const FirstOrderSystem& sys, const Expr& mu) {
    Expr r = differentiate(mu, sys.time());
    for (std::size_t i = 0; i < sys.dim(); ++i)
        r = r + differentiate(mu * sys.velocity(i), sys.states()[i]);
    return simplify(r);
}

Multiplier verify_multiplier(const FirstOrderSystem& sys, const Expr& mu0,
                             std::vector<Expr> nonzero_conditions, MultiplierFamily family,
                             const EquivOptions& opts) {
    Expr mu = simplify(mu0);
    if (mu.is_zero()) throw VanishingMultiplierError("multiplier is identically zero");

    Multiplier m;
    m.mu = mu;
    m.family = family;
    m.nonzero_conditions = std::move(nonzero_conditions);
    m.residual = multiplier_residual(sys, mu);

    Domain d = sys.domain().with_excluded(m.nonzero_conditions);
    if (!m.residual.is_zero()) {
        EquivResult eq;
        try {
            eq = equivalent(m.residual, num(0), d, opts);
        } catch (const SamplingError& e) {
            throw NotAMultiplierError(std::string("could not verify the residual: ") + e.what(),
                                      m.residual, 0.0);
        }
        if (!eq.equal)
            throw NotAMultiplierError("divergence residual does not vanish: " + render(m.residual),
                                      m.residual, eq.max_deviation);
        m.verified = CheckMode::Numeric;
        m.residual_bound = eq.max_deviation;
    }

    try {
        double floor = min_abs_on_samples(mu, d, opts);
        if (floor < 1e-8)
            throw VanishingMultiplierError("multiplier vanishes on the domain (min |mu| = " +
                                           describe(floor) + ")");
    } catch (const SamplingError&) {
        if (!never_zero(mu)) throw;
    }
    return m;
}

MultiplierSearch find_multipliers(const FirstOrderSystem& sys, bool all_families,
                                  const EquivOptions& opts) {
    using Attempt = std::optional<Multiplier> (*)(const FirstOrderSystem&, const EquivOptions&,
                                                  std::string&);
    static constexpr std::pair<MultiplierFamily, Attempt> kFamilies[] = {
        {MultiplierFamily::ConstantOne, family_constant},
        {MultiplierFamily::TimeOnly, family_time_only},
        {MultiplierFamily::MechanicalQuadratic, family_mech_quadratic},
        {MultiplierFamily::MonomialExponential, family_monomial},
        {MultiplierFamily::SingleState, family_single_state},
    };

    MultiplierSearch out;
    for (const auto& [fam, attempt] : kFamilies) {
        std::string note;
        auto m = attempt(sys, opts, note);
        if (m) {
            bool dup = false;
            for (const auto& prev : out.found)
                if (structural_equal(prev.mu, m->mu)) dup = true;
            if (dup) {
                out.notes.emplace_back(fam, "duplicate of an earlier family's result");
            } else {
                out.found.push_back(std::move(*m));
                out.notes.emplace_back(fam, "ok");
                if (!all_families) break;
            }
        } else {
            out.notes.emplace_back(fam, note);
        }
    }
    return out;
}

Multiplier find_multiplier(const FirstOrderSystem& sys, const EquivOptions& opts) {
    MultiplierSearch s = find_multipliers(sys, false, opts);
    if (!s.found.empty()) return s.found.front();
    throw NoMultiplierError("no multiplier found in any closed-form family", s.notes);
}

// ---------------------------------------------------------------------------

std::optional<ForceShape> force_shape_from_name(const std::string& name) {
    if (name == "mu-constant") return ForceShape::MuConstant;
    if (name == "mu-of-t") return ForceShape::MuOfT;
    if (name == "mu-of-x") return ForceShape::MuOfX;
    if (name == "mu-of-v") return ForceShape::MuOfV;
    if (name == "mu-of-tx" || name == "mu-of-t-x") return ForceShape::MuOfTX;
    if (name == "product-a(t)b(v)" || name == "product-ab" || name == "product-t-v")
        return ForceShape::ProductTV;
    return std::nullopt;
}

std::string force_shape_name(ForceShape s) {
    switch (s) {
        case ForceShape::MuConstant: return "mu-constant";
        case ForceShape::MuOfT: return "mu-of-t";
        case ForceShape::MuOfX: return "mu-of-x";
        case ForceShape::MuOfV: return "mu-of-v";
        case ForceShape::MuOfTX: return "mu-of-tx";
        case ForceShape::ProductTV: return "product-a(t)b(v)";
    }
    return "?";
}

Expr ForceFamily::build(const std::map<std::string, Expr>& slots) const {
    return simplify(substitute(template_expr, slots));
}

ForceFamily classify_force(ForceShape shape, const Expr& mu0, const std::string& t,
                           const std::string& x, const std::string& v) {
    Expr mu = simplify(mu0);
    if (mu.is_zero()) throw std::invalid_argument("multiplier profile is identically zero");
    auto depends_only = [&](const Expr& e, std::initializer_list<std::string> vars) {
        std::set<std::string> banned{t, x, v};
        for (const auto& s : vars) banned.erase(s);
        return !e.depends_on_any(banned);
    };

    ForceFamily fam;
    fam.shape = shape;
    fam.mu = mu;
    switch (shape) {
        case ForceShape::MuConstant: {
            if (!depends_only(mu, {}))
                throw std::invalid_argument("profile must be constant in t, x, v");
            fam.template_text = "F = phi(t, x)  (any velocity-independent force)";
            fam.placeholders = {"phi"};
            fam.template_expr = sym("phi");
            break;
        }
        case ForceShape::MuOfT: {
            if (!depends_only(mu, {t}))
                throw std::invalid_argument("profile must depend on t only");
            Expr k = simplify(num(0) - differentiate(mu, t) / mu);
            fam.derived["k"] = k;
            fam.template_text = "F = k(t)*v + phi(t, x),  k = -mu'/mu";
            fam.placeholders = {"phi"};
            fam.template_expr = k * sym(v) + sym("phi");
            break;
        }
        case ForceShape::MuOfX: {
            if (!depends_only(mu, {x}))
                throw std::invalid_argument("profile must depend on x only");
            Expr k = simplify(num(0) - differentiate(mu, x) / (num(2) * mu));
            fam.derived["k"] = k;
            fam.template_text = "F = k(x)*v^2 + phi(t, x),  2k = -mu'/mu";
            fam.placeholders = {"phi"};
            fam.template_expr = k * pow(sym(v), num(2)) + sym("phi");
            break;
        }
        case ForceShape::MuOfV: {
            if (!depends_only(mu, {v}))
                throw std::invalid_argument("profile must depend on v only");
            Expr prof = simplify(num(1) / mu);
            fam.derived["profile"] = prof;
            fam.template_text = "F = phi(t, x) / mu(v)";
            fam.placeholders = {"phi"};
            fam.template_expr = sym("phi") * prof;
            break;
        }
        case ForceShape::MuOfTX: {
            if (!depends_only(mu, {t, x}))
                throw std::invalid_argument("profile must depend on t and x only");
            Expr b = simplify(num(0) - differentiate(mu, t) / mu);
            Expr c = simplify(num(0) - differentiate(mu, x) / (num(2) * mu));
            fam.derived["lin"] = b;
            fam.derived["quad"] = c;
            fam.template_text = "F = A(t, x) + lin(t, x)*v + quad(t, x)*v^2";
            fam.placeholders = {"A"};
            fam.template_expr = sym("A") + b * sym(v) + c * pow(sym(v), num(2));
            break;
        }
        case ForceShape::ProductTV: {
            if (mu.depends_on(x))
                throw std::invalid_argument("profile must not depend on x");
            // The canonical form expands products over sums and merges
            // exponentials, so exp(t)*(1 + v^2) arrives as exp(t) + v^2*exp(t)
            // and exp(t)*exp(v) as exp(t + v).  Peel the t-dependent factors
            // off one additive term; the quotient then decides whether the
            // separation is genuine.
            Expr a = num(1);
            for (const auto& f : multiplicative_factors(additive_terms(mu).front())) {
                if (!f.depends_on(t)) continue;
                if (!f.depends_on(v)) {
                    a = a * f;
                } else if (f.is_fun("exp")) {
                    Expr arg_t = num(0);
                    for (const auto& term : additive_terms(f.kids().front()))
                        if (term.depends_on(t) && !term.depends_on(v)) arg_t = arg_t + term;
                    a = a * exp(arg_t);
                } else {
                    throw std::invalid_argument("profile does not factor as a(t)*b(v)");
                }
            }
            a = simplify(a);
            Expr b = simplify(mu / a);
            if (b.depends_on(t))
                throw std::invalid_argument("profile does not factor as a(t)*b(v)");
            Expr rate = simplify(num(0) - differentiate(a, t) / a);
            Antiderivative ib = antiderivative(b, v);
            fam.derived["a"] = a;
            fam.derived["b"] = b;
            fam.derived["rate"] = rate;
            fam.derived["int_b"] = ib.expr;
            fam.template_text =
                "F = (phi(t, x) + rate(t) * int_b(v)) / b(v),  rate = -a'/a";
            fam.placeholders = {"phi"};
            fam.template_expr = simplify((sym("phi") + rate * ib.expr) / b);
            break;
        }
    }
    return fam;
}

bool force_family_roundtrip(const ForceFamily& fam, const std::map<std::string, Expr>& slots,
                            const Domain& domain, const std::string& t, const std::string& x,
                            const std::string& v) {
    Expr force = fam.build(slots);
    std::set<std::string> core{t, x, v};
    std::vector<ParamDecl> params;
    std::set<std::string> seen;
    for (const auto& e : {force, fam.mu})
        for (const auto& s : free_symbols(e))
            if (!core.count(s) && seen.insert(s).second) params.push_back({s, std::nullopt});

    MechanicalSystem mech{force, params, domain, t, x, v};
    FirstOrderSystem sys = lift(mech);
    Expr residual = multiplier_residual(sys, fam.mu);
    if (residual.is_zero()) return true;
    // The family templates divide by the profile, so sample the residual away
    // from its zero set.
    Domain d = sys.domain().with_excluded({fam.mu});
    try {
        return static_cast<bool>(equivalent(residual, num(0), d, EquivOptions{}));
    } catch (const SamplingError&) {
        return false;
    }
}

}  // namespace jlm
