#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "jlm/equivalence.hpp"
#include "jlm/system.hpp"

namespace jlm {

enum class MultiplierFamily {
    UserProvided,
    ConstantOne,          // divergence-free field
    TimeOnly,             // divergence depends on t (and parameters) alone
    MechanicalQuadratic,  // lifted force quadratic in the velocity
    MonomialExponential,  // exp(r t) * prod x_i^p_i for quasi-polynomial fields
    SingleState,          // mu = mu(x_k)
};

std::string family_name(MultiplierFamily f);

struct Multiplier {
    Expr mu;
    MultiplierFamily family = MultiplierFamily::UserProvided;
    std::vector<Expr> nonzero_conditions;  // parameter expressions that must not vanish
    CheckMode verified = CheckMode::Symbolic;
    Expr residual;       // simplified d(mu)/dt + sum_i d(mu X_i)/dx_i
    double residual_bound = 0.0;  // worst sampled |residual| (numeric mode)
};

class NotAMultiplierError : public std::runtime_error {
public:
    NotAMultiplierError(std::string what, Expr residual, double worst)
        : std::runtime_error(std::move(what)), residual_(std::move(residual)), worst_(worst) {}
    const Expr& residual() const { return residual_; }
    double worst_deviation() const { return worst_; }

private:
    Expr residual_;
    double worst_;
};

class VanishingMultiplierError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NoMultiplierError : public std::runtime_error {
public:
    NoMultiplierError(std::string what,
                      std::vector<std::pair<MultiplierFamily, std::string>> attempts)
        : std::runtime_error(std::move(what)), attempts_(std::move(attempts)) {}
    const std::vector<std::pair<MultiplierFamily, std::string>>& attempts() const {
        return attempts_;
    }

private:
    std::vector<std::pair<MultiplierFamily, std::string>> attempts_;
};

/// d(mu)/dt + sum_i d(mu X_i)/dx_i, simplified.
Expr multiplier_residual(const FirstOrderSystem& sys, const Expr& mu);

/// Checks that mu is a multiplier (residual identically or numerically zero)
/// and that it does not vanish on the sampled domain. Throws
/// NotAMultiplierError / VanishingMultiplierError.
Multiplier verify_multiplier(const FirstOrderSystem& sys, const Expr& mu,
                             std::vector<Expr> nonzero_conditions = {},
                             MultiplierFamily family = MultiplierFamily::UserProvided,
                             const EquivOptions& opts = {});

struct MultiplierSearch {
    std::vector<Multiplier> found;
    std::vector<std::pair<MultiplierFamily, std::string>> notes;  // per-family outcome
};

/// Tries the closed-form families in a fixed order. With all_families the
/// search continues past the first hit and deduplicates structurally.
MultiplierSearch find_multipliers(const FirstOrderSystem& sys, bool all_families = false,
                                  const EquivOptions& opts = {});

/// First family that works; throws NoMultiplierError with per-family notes.
Multiplier find_multiplier(const FirstOrderSystem& sys, const EquivOptions& opts = {});

// ---------------------------------------------------------------------------
// Inverse direction for second-order equations: which forces admit a
// multiplier of a prescribed shape.

enum class ForceShape {
    MuConstant,   // any velocity-independent force
    MuOfT,        // F = k(t) v + phi(t, x)
    MuOfX,        // F = k(x) v^2 + phi(t, x)
    MuOfV,        // F = phi(t, x) / mu'(v) ... phi times a fixed v-profile
    MuOfTX,       // F = A(t, x) + B(t) ... quadratic polynomial in v
    ProductTV,    // mu = a(t) b(v)
};

std::optional<ForceShape> force_shape_from_name(const std::string& name);
std::string force_shape_name(ForceShape s);

struct ForceFamily {
    ForceShape shape;
    Expr mu;
    std::string template_text;                  // readable force template
    std::vector<std::string> placeholders;      // free function slots, e.g. "phi"
    std::map<std::string, Expr> derived;        // named pieces computed from mu
    Expr template_expr;                         // placeholders appear as symbols

    /// Instantiates the template by substituting the placeholder symbols.
    Expr build(const std::map<std::string, Expr>& slots) const;
};

/// Given a multiplier profile of the stated shape, produce the family of
/// second-order forces it multiplies. Throws std::invalid_argument when mu
/// does not have the requested shape.
ForceFamily classify_force(ForceShape shape, const Expr& mu, const std::string& t = "t",
                           const std::string& x = "x", const std::string& v = "v");

/// Instantiates the family, lifts the resulting equation and re-verifies that
/// mu is a multiplier for it.
bool force_family_roundtrip(const ForceFamily& fam, const std::map<std::string, Expr>& slots,
                            const Domain& domain, const std::string& t = "t",
                            const std::string& x = "x", const std::string& v = "v");

}  // namespace jlm
