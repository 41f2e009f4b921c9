#include "jlm/calculus.hpp"

#include <stdexcept>

#include "jlm/simplify.hpp"

namespace jlm {
namespace {

Expr diff_raw(const Expr& e, const std::string& v) {
    switch (e.kind()) {
        case Kind::Number:
            return num(0);
        case Kind::Symbol:
            return num(e.name() == v ? 1 : 0);
        case Kind::Add: {
            Expr s = num(0);
            for (const auto& k : e.kids()) s = s + diff_raw(k, v);
            return s;
        }
        case Kind::Mul: {
            Expr s = num(0);
            const auto& ks = e.kids();
            for (std::size_t i = 0; i < ks.size(); ++i) {
                if (!ks[i].depends_on(v)) continue;
                Expr p = diff_raw(ks[i], v);
                for (std::size_t j = 0; j < ks.size(); ++j)
                    if (j != i) p = p * ks[j];
                s = s + p;
            }
            return s;
        }
        case Kind::Pow: {
            const Expr& b = e.kids()[0];
            const Expr& a = e.kids()[1];
            bool db = b.depends_on(v), da = a.depends_on(v);
            if (!db && !da) return num(0);
            if (!da) return a * pow(b, a - 1) * diff_raw(b, v);
            if (!db) return e * log(b) * diff_raw(a, v);
            return e * (diff_raw(a, v) * log(b) + a * diff_raw(b, v) / b);
        }
        case Kind::Fun: {
            const Expr& u = e.kids()[0];
            Expr du = diff_raw(u, v);
            if (e.name() == "exp") return exp(u) * du;
            if (e.name() == "log") return du / u;
            if (e.name() == "sin") return cos(u) * du;
            if (e.name() == "cos") return num(-1) * sin(u) * du;
            throw std::logic_error("differentiate: unknown function " + e.name());
        }
        case Kind::Integral: {
            // e = integral(f, z, [lo,] hi)
            const Expr& f = e.kids()[0];
            const std::string& z = e.name();
            bool bounded = e.has_lower();
            const Expr& hi = e.kids().back();
            Expr s = num(0);
            if (hi.depends_on(v)) s = s + substitute(f, z, hi) * diff_raw(hi, v);
            if (bounded) {
                const Expr& lo = e.kids()[1];
                if (lo.depends_on(v)) s = s - substitute(f, z, lo) * diff_raw(lo, v);
            }
            if (v != z) {
                Expr inner = simplify(diff_raw(f, v));
                if (!inner.is_zero()) {
                    if (bounded)
                        s = s + integral(inner, z, e.kids()[1], hi);
                    else
                        s = s + integral(inner, z, hi);
                }
            }
            return s;
        }
        default:
            throw std::logic_error("differentiate: unnormalized node");
    }
}

// Splits a canonical term into (v-free prefactor, v-dependent factors).
void split_term(const Expr& term, const std::string& v, Expr& cpart, std::vector<Expr>& vpart) {
    std::vector<Expr> cs;
    for (const auto& f : multiplicative_factors(term)) {
        if (f.depends_on(v))
            vpart.push_back(f);
        else
            cs.push_back(f);
    }
    cpart = cs.empty() ? num(1) : (cs.size() == 1 ? cs[0] : mul(cs));
}

// Matches f == v^a with a free of v; a Symbol v counts as exponent 1.
std::optional<Expr> power_of(const Expr& f, const std::string& v) {
    if (f.is_symbol(v)) return num(1);
    if (f.kind() == Kind::Pow && f.kids()[0].is_symbol(v) && !f.kids()[1].depends_on(v))
        return f.kids()[1];
    return std::nullopt;
}

struct TermResult {
    std::optional<Expr> closed;
    std::vector<Expr> sides;
};

TermResult integrate_term(const Expr& term, const std::string& v) {
    TermResult out;
    Expr x = sym(v);
    if (!term.depends_on(v)) {
        out.closed = term * x;
        return out;
    }
    Expr c;
    std::vector<Expr> vf;
    split_term(term, v, c, vf);

    if (vf.size() == 1) {
        const Expr& f = vf[0];
        if (auto a = power_of(f, v)) {
            if (a->is_number() && a->value() == Rational(-1)) {
                out.closed = c * log(x);
                return out;
            }
            Expr ap1 = simplify(*a + 1);
            if (ap1.is_zero()) {
                out.closed = c * log(x);
                return out;
            }
            if (!ap1.is_number()) out.sides.push_back(ap1);
            out.closed = c * pow(x, ap1) / ap1;
            return out;
        }
        if (f.kind() == Kind::Fun) {
            auto lin = collect_linear(f.kids()[0], v);
            if (lin && !lin->a.is_zero()) {
                if (!lin->a.is_number()) out.sides.push_back(lin->a);
                if (f.name() == "exp") {
                    out.closed = c * f / lin->a;
                    return out;
                }
                if (f.name() == "sin") {
                    out.closed = num(-1) * c * cos(f.kids()[0]) / lin->a;
                    return out;
                }
                if (f.name() == "cos") {
                    out.closed = c * sin(f.kids()[0]) / lin->a;
                    return out;
                }
                if (f.name() == "log") {
                    // ∫ log(a v + b) dv = ((a v + b) log(a v + b) - (a v + b)) / a
                    Expr u = f.kids()[0];
                    out.closed = c * (u * f - u) / lin->a;
                    return out;
                }
            }
        }
    }
    if (vf.size() == 2) {
        // log(a*v)/v -> log(a*v)^2/2
        Expr inv, lg;
        for (const auto& f : vf) {
            if (auto a = power_of(f, v)) {
                if (a->is_number() && a->value() == Rational(-1)) inv = f;
            } else if (f.is_fun("log")) {
                lg = f;
            }
        }
        if (inv.valid() && lg.valid()) {
            auto lin = collect_linear(lg.kids()[0], v);
            if (lin && lin->b.is_zero() && !lin->a.is_zero())
                out.closed = c * pow(lg, num(2)) / 2;
        }
    }
    return out;
}

}  // namespace

Expr differentiate(const Expr& e, const std::string& v) { return simplify(diff_raw(simplify(e), v)); }

Antiderivative antiderivative(const Expr& e, const std::string& v) {
    Antiderivative out;
    Expr closed = num(0);
    std::vector<Expr> failed;
    for (const auto& term : additive_terms(simplify(e))) {
        TermResult tr = integrate_term(term, v);
        if (tr.closed) {
            closed = closed + *tr.closed;
            for (auto& s : tr.sides) out.nonzero_conditions.push_back(s);
        } else {
            failed.push_back(term);
        }
    }
    out.closed = simplify(closed);
    out.exact = failed.empty();
    if (out.exact) {
        out.expr = out.closed;
    } else {
        Expr rest = simplify(add(failed));
        out.remainder = rest;
        Expr inner = substitute(rest, v, sym("z"));
        if (inner.depends_on("z") && rest.depends_on("z")) {
            // the integrand already used z; pick a fresh dummy
            std::string d = "z_";
            while (rest.depends_on(d)) d += "_";
            inner = substitute(rest, v, sym(d));
            out.expr = simplify(out.closed + integral(inner, d, sym(v)));
        } else {
            out.expr = simplify(out.closed + integral(inner, "z", sym(v)));
        }
    }
    return out;
}

Antiderivative definite_integral(const Expr& e, const std::string& v, const Expr& lo,
                                 const Expr& hi) {
    Antiderivative a = antiderivative(e, v);
    Antiderivative out;
    out.nonzero_conditions = a.nonzero_conditions;
    out.exact = a.exact;
    out.closed = simplify(substitute(a.closed, v, hi) - substitute(a.closed, v, lo));
    if (a.exact) {
        out.expr = out.closed;
        return out;
    }
    Expr rest = *a.remainder;
    std::string d = "z";
    while (rest.depends_on(d) || lo.depends_on(d) || hi.depends_on(d)) d += "_";
    out.remainder = rest;
    out.expr = simplify(out.closed + integral(substitute(rest, v, sym(d)), d, lo, hi));
    return out;
}

std::optional<std::map<Rational, Expr>> collect_powers(const Expr& e, const std::string& v) {
    std::map<Rational, std::vector<Expr>> acc;
    for (const auto& term : additive_terms(simplify(e))) {
        Rational deg(0);
        std::vector<Expr> coeff;
        for (const auto& f : multiplicative_factors(term)) {
            if (!f.depends_on(v)) {
                coeff.push_back(f);
                continue;
            }
            auto a = power_of(f, v);
            if (!a || !a->is_number()) return std::nullopt;
            deg = deg + a->value();
        }
        acc[deg].push_back(coeff.empty() ? num(1)
                                         : (coeff.size() == 1 ? coeff[0] : mul(coeff)));
    }
    std::map<Rational, Expr> out;
    for (auto& [deg, terms] : acc) {
        Expr c = simplify(add(terms));
        if (!c.is_zero()) out.emplace(deg, c);
    }
    return out;
}

std::optional<Linear> collect_linear(const Expr& e, const std::string& v) {
    auto p = collect_powers(e, v);
    if (!p) return std::nullopt;
    Linear out{num(0), num(0)};
    for (auto& [deg, c] : *p) {
        if (deg == Rational(0))
            out.b = c;
        else if (deg == Rational(1))
            out.a = c;
        else
            return std::nullopt;
    }
    return out;
}

}  // namespace jlm
