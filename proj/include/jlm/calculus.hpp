#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "jlm/expr.hpp"

namespace jlm {

Expr differentiate(const Expr& e, const std::string& v);

struct Antiderivative {
    Expr expr;                             // closed part plus any integral fallback
    Expr closed;                           // exactly integrable portion
    std::optional<Expr> remainder;         // integrand left under an integral sign
    std::vector<Expr> nonzero_conditions;  // expressions that must not vanish
    bool exact = true;
};

/// Termwise antiderivative in v. Closed forms for sums and constant multiples
/// of: powers v^a (a != -1, rational or v-free symbolic), 1/v, exp/sin/cos of
/// expressions linear in v, log(a*v+b), and log(a*v)/v. Anything else is left
/// under an unevaluated integral node.
Antiderivative antiderivative(const Expr& e, const std::string& v);

/// Integral of e dv from lo to hi; closed where possible, a bounded integral
/// node otherwise.
Antiderivative definite_integral(const Expr& e, const std::string& v, const Expr& lo,
                                 const Expr& hi);

/// e as a finite sum of v-free coefficients times rational powers of v.
std::optional<std::map<Rational, Expr>> collect_powers(const Expr& e, const std::string& v);

struct Linear {
    Expr a, b;  // a*v + b
};
std::optional<Linear> collect_linear(const Expr& e, const std::string& v);

}  // namespace jlm
