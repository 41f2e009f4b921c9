#pragma once

#include "jlm/expr.hpp"

namespace jlm {

/// Canonicalize: constant folding, flatten + sort sums and products, collect
/// like terms, combine powers over a common base, distribute products over
/// sums, exponential/log extraction. Total; never throws on well-formed input.
Expr normalize(const Expr& e);

/// Fixpoint of normalize (bounded passes). Idempotent.
Expr simplify(const Expr& e);

/// Split a term into (rational coefficient, remaining factor).
std::pair<Rational, Expr> split_coefficient(const Expr& term);

/// View an expression as a flat list of additive terms.
std::vector<Expr> additive_terms(const Expr& e);

/// View an expression as a flat list of multiplicative factors.
std::vector<Expr> multiplicative_factors(const Expr& e);

}  // namespace jlm
