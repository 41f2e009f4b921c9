#pragma once

#include <cstdint>
#include <vector>

#include "jlm/eval.hpp"
#include "jlm/system.hpp"
#include "jlm/varconstruct.hpp"

namespace jlm {

struct Trajectory {
    double t0 = 0.0;
    double h = 1e-3;
    std::size_t steps_requested = 0;
    std::vector<double> times;                 // steps_taken() + 1 entries
    std::vector<std::vector<double>> states;   // one vector per time
    bool truncated = false;                    // left the domain / blew up

    std::size_t steps_taken() const { return times.empty() ? 0 : times.size() - 1; }
};

/// Classical fixed-step fourth-order Runge-Kutta. Parameters are bound from
/// the domain pins plus the explicit overrides. Integration stops early when
/// the right-hand side fails to evaluate, produces non-finite values, or the
/// state leaves a declared interval.
Trajectory rk4_integrate(const FirstOrderSystem& sys, const std::vector<double>& init, double t0,
                         double h, std::size_t steps, const Bindings& params = {});

struct FlowCompare {
    bool pass = false;
    double max_deviation = 0.0;
    double tolerance = 1e-6;
    std::size_t compared = 0;
    bool used_symbolic_hamiltonian = false;
};

/// Integrates the original planar system and the canonical equations side by
/// side and compares the reconstructed (x, y) trajectories pointwise. Uses
/// the closed-form Hamiltonian when available, otherwise Newton-inverts the
/// momentum relation at every step.
FlowCompare hamilton_flow_compare(const FirstOrderSystem& sys, const HamiltonianDescription& hd,
                                  const std::vector<double>& init, double t0, double h,
                                  std::size_t steps, double tolerance = 1e-6,
                                  const Bindings& params = {});

struct DriftReport {
    double initial = 0.0;
    double max_drift = 0.0;
    std::size_t points = 0;
};

/// Max |f(t, x(t)) - f(t0, x(t0))| along a trajectory.
DriftReport conservation_check(const FirstOrderSystem& sys, const Expr& f, const Trajectory& traj,
                               const Bindings& params = {});

struct FdReport {
    bool pass = false;
    double max_rel_err = 0.0;
    std::size_t points = 0;
};

/// Central finite differences against the symbolic derivative at sampled
/// points (step 1e-6, relative tolerance 1e-5).
FdReport fd_crosscheck(const Expr& e, const std::string& v, const Domain& d,
                       std::uint64_t seed = kDefaultSeed, int points = 64);

}  // namespace jlm
