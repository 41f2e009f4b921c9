#include "jlm/eval.hpp"

#include <cmath>

namespace jlm {
namespace {

bool is_integral_value(double x) { return std::nearbyint(x) == x && std::isfinite(x); }

double quad_simpson(const Expr& f, const std::string& var, Bindings& env, double a, double b);

double eval_rec(const Expr& e, Bindings& env) {
    switch (e.kind()) {
        case Kind::Number:
            return e.value().to_double();
        case Kind::Symbol: {
            auto it = env.find(e.name());
            if (it == env.end())
                throw EvalError(EvalError::Kind::UnboundSymbol,
                                "unbound symbol '" + e.name() + "'");
            return it->second;
        }
        case Kind::Add: {
            double s = 0;
            for (const auto& k : e.kids()) s += eval_rec(k, env);
            return s;
        }
        case Kind::Mul: {
            double p = 1;
            for (const auto& k : e.kids()) p *= eval_rec(k, env);
            return p;
        }
        case Kind::Pow: {
            double b = eval_rec(e.kids()[0], env);
            double x = eval_rec(e.kids()[1], env);
            if (b == 0 && x < 0)
                throw EvalError(EvalError::Kind::DomainViolation, "division by zero");
            if (b < 0 && !is_integral_value(x))
                throw EvalError(EvalError::Kind::DomainViolation,
                                "negative base with non-integer exponent");
            double r = std::pow(b, x);
            if (!std::isfinite(r))
                throw EvalError(EvalError::Kind::DomainViolation, "non-finite power");
            return r;
        }
        case Kind::Fun: {
            double u = eval_rec(e.kids()[0], env);
            if (e.name() == "exp") {
                double r = std::exp(u);
                if (!std::isfinite(r))
                    throw EvalError(EvalError::Kind::DomainViolation, "exp overflow");
                return r;
            }
            if (e.name() == "log") {
                if (u <= 0)
                    throw EvalError(EvalError::Kind::DomainViolation,
                                    "log of non-positive value");
                return std::log(u);
            }
            if (e.name() == "sin") return std::sin(u);
            if (e.name() == "cos") return std::cos(u);
            throw EvalError(EvalError::Kind::DomainViolation,
                            "unknown function '" + e.name() + "'");
        }
        case Kind::Integral: {
            if (!e.has_lower())
                throw EvalError(EvalError::Kind::Indefinite,
                                "indefinite integral has no numeric value");
            double lo = eval_rec(e.kids()[1], env);
            double hi = eval_rec(e.kids()[2], env);
            if (lo == hi) return 0.0;
            return quad_simpson(e.kids()[0], e.name(), env, lo, hi);
        }
        default:
            throw EvalError(EvalError::Kind::DomainViolation, "unevaluable node");
    }
}

struct Quad {
    const Expr& f;
    const std::string& var;
    Bindings& env;

    double at(double x) {
        env[var] = x;
        double v = eval_rec(f, env);
        if (!std::isfinite(v))
            throw EvalError(EvalError::Kind::DomainViolation, "non-finite integrand");
        return v;
    }

    double refine(double a, double b, double fa, double fm, double fb, double whole, double eps,
                  int depth) {
        double m = 0.5 * (a + b);
        double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
        double flm = at(lm), frm = at(rm);
        double left = (m - a) / 6.0 * (fa + 4 * flm + fm);
        double right = (b - m) / 6.0 * (fm + 4 * frm + fb);
        double delta = left + right - whole;
        if (depth <= 0 || std::abs(delta) <= 15.0 * eps) return left + right + delta / 15.0;
        return refine(a, m, fa, flm, fm, left, eps / 2, depth - 1) +
               refine(m, b, fm, frm, fb, right, eps / 2, depth - 1);
    }
};

double quad_simpson(const Expr& f, const std::string& var, Bindings& env, double a, double b) {
    bool had = env.count(var) > 0;
    double saved = had ? env[var] : 0.0;
    Quad q{f, var, env};
    double fa = q.at(a), fb = q.at(b), fm = q.at(0.5 * (a + b));
    double whole = (b - a) / 6.0 * (fa + 4 * fm + fb);
    double scale = std::max({std::abs(whole), std::abs(b - a), 1e-3});
    double r = q.refine(a, b, fa, fm, fb, whole, 1e-10 * scale, 40);
    if (had)
        env[var] = saved;
    else
        env.erase(var);
    return r;
}

}  // namespace

double evaluate(const Expr& e, const Bindings& bindings) {
    Bindings env = bindings;
    return eval_rec(e, env);
}

}  // namespace jlm
