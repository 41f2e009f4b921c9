#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "jlm/domain.hpp"
#include "jlm/expr.hpp"

namespace jlm {

struct ParamDecl {
    std::string name;
    std::optional<Rational> value;  // pinned test value, if any
};

/// First-order autonomous-in-form system dx_i/dt = X_i(t, x). Parameters with
/// declared values are pinned in the domain; free parameters default to the
/// window (0, 2).
class FirstOrderSystem {
public:
    FirstOrderSystem(std::string time, std::vector<std::string> states,
                     std::vector<Expr> velocity, std::vector<ParamDecl> params, Domain domain);

    const std::string& time() const { return time_; }
    const std::vector<std::string>& states() const { return states_; }
    std::size_t dim() const { return states_.size(); }
    const std::vector<Expr>& velocity() const { return velocity_; }
    const Expr& velocity(std::size_t i) const { return velocity_[i]; }
    const std::vector<ParamDecl>& params() const { return params_; }
    const Domain& domain() const { return domain_; }
    Domain& domain() { return domain_; }

    int state_index(const std::string& name) const;  // -1 when absent
    std::vector<std::string> all_symbols() const;    // time + states + params

    /// True when the system is a lifted second-order equation: two states
    /// (x, v) with dx/dt = v.
    bool is_lifted_mechanical() const;

private:
    std::string time_;
    std::vector<std::string> states_;
    std::vector<Expr> velocity_;
    std::vector<ParamDecl> params_;
    Domain domain_;
};

struct MechanicalSystem {
    Expr force;  // d^2x/dt^2 = F(t, x, v)
    std::vector<ParamDecl> params;
    Domain domain;
    std::string time = "t", coord = "x", vel = "v";
};

/// First-order lift {dx/dt = v, dv/dt = F}.
FirstOrderSystem lift(const MechanicalSystem& m);

/// Divergence of the velocity field: sum_i dX_i/dx_i.
Expr divergence(const FirstOrderSystem& sys);

/// Action of the dynamics vector field on f: df/dt + sum_i X_i df/dx_i.
Expr gamma_apply(const FirstOrderSystem& sys, const Expr& f);

}  // namespace jlm
