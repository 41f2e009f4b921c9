#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "jlm/equivalence.hpp"
#include "jlm/eval.hpp"
#include "jlm/multiplier.hpp"
#include "jlm/system.hpp"

namespace jlm {

class ConstructionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Cartan one-form data for a planar system: lambda = m_x dx + m_y dy + h dt.
/// The associated Lagrangian is affine in the velocities:
///   L = m_x x' + m_y y' + h.
struct LambdaForm {
    Expr m_x, m_y, h;
    std::string t = "t", x = "x", y = "y";
    std::vector<Expr> nonzero_conditions;
    bool exact = true;  // false when unevaluated integrals remain

    Expr mu() const;   // d(m_y)/dx - d(m_x)/dy
    Expr w_x() const;  // d(m_x)/dt - dh/dx
    Expr w_y() const;  // d(m_y)/dt - dh/dy
};

struct AffineLagrangian {
    Expr lagrangian;       // in (t, x, y, vx, vy)
    std::string vx, vy;    // velocity symbol names
    Expr energy;           // vx dL/dvx + vy dL/dvy - L  (= -h)
};

AffineLagrangian lagrangian_of(const LambdaForm& lf);

/// Builds a lambda form for the system from a verified multiplier, in the
/// gauge m_y = 0 (or m_x = 0 with swap_gauge). Throws ConstructionError when
/// the defining equations are inconsistent, which indicates a bad multiplier.
LambdaForm solve_lambda_form(const FirstOrderSystem& sys, const Multiplier& mult,
                             bool swap_gauge = false, const EquivOptions& opts = {});

/// Both Euler-Lagrange identities: mu*X + w_y = 0 and mu*Y - w_x = 0.
EquivResult euler_lagrange_check(const FirstOrderSystem& sys, const LambdaForm& lf,
                                 const EquivOptions& opts = {});

/// lambda -> lambda + df.
LambdaForm gauge_transform(const LambdaForm& lf, const Expr& f);

/// If a and b differ by an exact one-form df, returns f (path-integrated from
/// a base point and re-verified); otherwise nullopt.
std::optional<Expr> gauge_equivalent(const LambdaForm& a, const LambdaForm& b, const Domain& d,
                                     const EquivOptions& opts = {});

/// Canonical coordinates from a lambda form: q = x, p = -m_x (after reducing
/// to the gauge m_y = 0). The Hamiltonian is h composed with the inverse
/// y = y(t, q, p) when that inverse is closed-form (affine, single power, or
/// logarithmic dependence of m_x on y).
struct HamiltonianDescription {
    std::string q_name = "q", p_name = "p";
    std::string t_name, x_name, y_name;
    Expr p_of;                        // p as a function of (t, x, y)
    Expr h_source;                    // h(t, x, y) in the reduced gauge
    std::optional<Expr> y_of;         // y(t, q, p) when invertible in closed form
    std::optional<Expr> hamiltonian;  // H(t, q, p) when y_of exists
    bool symbolic_inverse = false;
    std::vector<Expr> nonzero_conditions;
};

HamiltonianDescription hamiltonianize(const FirstOrderSystem& sys, const LambdaForm& lf);

/// Newton inversion of p_of(t, x=q, y) = p for y (fallback when y_of is not
/// closed-form). Throws ConstructionError if it fails to converge.
double invert_p(const HamiltonianDescription& hd, double t, double q, double p, double y_guess,
                const Bindings& params);

}  // namespace jlm
