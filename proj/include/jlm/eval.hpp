#pragma once

#include <map>
#include <stdexcept>
#include <string>

#include "jlm/expr.hpp"

namespace jlm {

class EvalError : public std::runtime_error {
public:
    enum class Kind { UnboundSymbol, DomainViolation, Indefinite };
    EvalError(Kind k, const std::string& what) : std::runtime_error(what), kind_(k) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

using Bindings = std::map<std::string, double>;

/// Numeric value of e under the given symbol bindings. Integral nodes with
/// both bounds are evaluated by adaptive quadrature (relative tolerance
/// 1e-10); an integral without a lower bound raises EvalError::Indefinite.
double evaluate(const Expr& e, const Bindings& bindings);

}  // namespace jlm
