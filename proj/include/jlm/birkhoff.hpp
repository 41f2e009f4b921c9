#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "jlm/equivalence.hpp"
#include "jlm/linalg.hpp"
#include "jlm/system.hpp"
#include "jlm/varconstruct.hpp"  // ConstructionError

namespace jlm {

/// Two-form data alpha = sum_{i<j} A_ij dx_i^dx_j + sum_j B_j dt^dx_j for an
/// n-dimensional first-order system, with B_j = sum_i A_ji X_i.
class BirkhoffData {
public:
    BirkhoffData(std::size_t n, std::map<std::pair<int, int>, Expr> upper);

    std::size_t dim() const { return n_; }
    Expr a(int i, int j) const;  // signed entry, 0-based indices
    const std::map<std::pair<int, int>, Expr>& upper() const { return upper_; }
    std::vector<Expr> b(const FirstOrderSystem& sys) const;

private:
    std::size_t n_;
    std::map<std::pair<int, int>, Expr> upper_;  // keys (i, j) with i < j
};

BirkhoffData birkhoff_from_matrix(const QMat& a);

struct AlphaCheck {
    bool ok = false;
    CheckMode mode = CheckMode::Symbolic;
    double max_deviation = 0.0;
    double min_det = 0.0;  // smallest sampled |det A|
    std::vector<std::string> failures;
};

/// Transport equations along the flow, closedness of alpha, and sampled
/// nondegeneracy of A.
AlphaCheck verify_alpha(const FirstOrderSystem& sys, const BirkhoffData& bd,
                        const EquivOptions& opts = {});

struct ConstantAlphaResult {
    std::vector<QMat> basis;  // skew matrices spanning the solution space
    QMat chosen;              // a nondegenerate member (empty if none found)
    std::size_t dimension = 0;
};

/// All constant skew matrices A with A J + (A J)^T = 0 for the (constant,
/// rational) Jacobian J of the velocity field. Throws std::invalid_argument
/// when the field is not affine with rational coefficients.
ConstantAlphaResult solve_constant_alpha(const FirstOrderSystem& sys);

/// Up to `count` linearly independent nondegenerate members of the solution
/// space, chosen deterministically.
std::vector<QMat> nondegenerate_members(const ConstantAlphaResult& r, std::size_t count);

/// Coordinates of a constant skew matrix in the basis of r, if it lies in the
/// span.
std::optional<QVec> coordinates_in_basis(const ConstantAlphaResult& r, const QMat& a);

Rational pfaffian4(const QMat& a);  // n = 4 only

struct GeneralLambda {
    std::vector<Expr> m;  // one per state
    Expr h;
    std::vector<std::string> states;
    std::string t = "t";
    std::vector<Expr> nonzero_conditions;
    bool exact = true;
};

/// One-form lambda with d(lambda) = alpha, built by integrating alpha
/// coordinate by coordinate from a base point. Requires alpha closed (checked
/// by verify_alpha).
GeneralLambda integrate_alpha(const FirstOrderSystem& sys, const BirkhoffData& bd);

/// For each state j: d(m_j)/dt - dh/dx_j + sum_i X_i (d(m_j)/dx_i - d(m_i)/dx_j) = 0.
EquivResult birkhoff_el_check(const FirstOrderSystem& sys, const GeneralLambda& gl,
                              const EquivOptions& opts = {});

/// Exact-difference test for two lambdas; returns the gauge function f with
/// lambda_a = lambda_b + df when the difference is closed, else nullopt.
std::optional<Expr> lambda_gauge_equivalent(const GeneralLambda& a, const GeneralLambda& b,
                                            const Domain& d, const EquivOptions& opts = {});

}  // namespace jlm
