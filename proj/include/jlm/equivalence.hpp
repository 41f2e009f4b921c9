#pragma once

#include <string>
#include <vector>

#include "jlm/domain.hpp"
#include "jlm/expr.hpp"

namespace jlm {

enum class CheckMode { Symbolic, Numeric };

struct EquivResult {
    bool equal = false;
    CheckMode mode = CheckMode::Symbolic;
    double max_deviation = 0.0;  // numeric mode only
    operator bool() const { return equal; }
};

struct EquivOptions {
    std::uint64_t seed = kDefaultSeed;
    int points = 64;
    double tolerance = 1e-9;  // |a-b| <= tol*(1 + |a| + |b|)
};

/// Equality of a and b as functions on the domain: first structurally
/// (simplify(a-b) == 0), then by sampling. Points where either side fails to
/// evaluate are rejected and redrawn; 1000 straight rejections raise
/// SamplingError.
EquivResult equivalent(const Expr& a, const Expr& b, const Domain& d,
                       const EquivOptions& opts = {});

/// Smallest |e| over sampled points (used for "does not vanish" checks).
double min_abs_on_samples(const Expr& e, const Domain& d, const EquivOptions& opts = {});

}  // namespace jlm
