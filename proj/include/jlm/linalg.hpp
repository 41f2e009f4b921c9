#pragma once

#include <vector>

#include "jlm/rational.hpp"

namespace jlm {

using QVec = std::vector<Rational>;
using QMat = std::vector<QVec>;  // row-major

struct LinearSolution {
    bool consistent = false;
    QVec particular;         // free variables set to zero
    std::vector<QVec> nullspace;
};

/// Exact solution of a x = b over the rationals (a is m x n, b length m).
LinearSolution solve_linear(QMat a, QVec b);

Rational determinant(QMat a);

}  // namespace jlm
