#include "jlm/numverify.hpp"

#include <cmath>

#include "jlm/calculus.hpp"
#include "jlm/simplify.hpp"

namespace jlm {
namespace {

Bindings merge_params(const FirstOrderSystem& sys, const Bindings& overrides) {
    Bindings env;
    for (const auto& [k, v] : sys.domain().pins()) env[k] = v;
    for (const auto& [k, v] : overrides) env[k] = v;
    return env;
}

struct Stepper {
    const std::vector<Expr>& rhs;
    const std::vector<std::string>& names;
    const std::string& tname;
    Bindings env;

    bool eval(double t, const std::vector<double>& s, std::vector<double>& out) {
        env[tname] = t;
        for (std::size_t i = 0; i < names.size(); ++i) env[names[i]] = s[i];
        out.resize(s.size());
        for (std::size_t i = 0; i < rhs.size(); ++i) {
            try {
                out[i] = evaluate(rhs[i], env);
            } catch (const EvalError&) {
                return false;
            }
            if (!std::isfinite(out[i])) return false;
        }
        return true;
    }

    bool step(double t, double h, std::vector<double>& s) {
        const std::size_t n = s.size();
        std::vector<double> k1, k2, k3, k4, tmp(n);
        if (!eval(t, s, k1)) return false;
        for (std::size_t i = 0; i < n; ++i) tmp[i] = s[i] + 0.5 * h * k1[i];
        if (!eval(t + 0.5 * h, tmp, k2)) return false;
        for (std::size_t i = 0; i < n; ++i) tmp[i] = s[i] + 0.5 * h * k2[i];
        if (!eval(t + 0.5 * h, tmp, k3)) return false;
        for (std::size_t i = 0; i < n; ++i) tmp[i] = s[i] + h * k3[i];
        if (!eval(t + h, tmp, k4)) return false;
        for (std::size_t i = 0; i < n; ++i)
            s[i] += h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
        for (double v : s)
            if (!std::isfinite(v)) return false;
        return true;
    }
};

}  // namespace

Trajectory rk4_integrate(const FirstOrderSystem& sys, const std::vector<double>& init, double t0,
                         double h, std::size_t steps, const Bindings& params) {
    if (init.size() != sys.dim())
        throw std::invalid_argument("initial state has the wrong dimension");
    Trajectory traj;
    traj.t0 = t0;
    traj.h = h;
    traj.steps_requested = steps;
    traj.times.push_back(t0);
    traj.states.push_back(init);

    Stepper st{sys.velocity(), sys.states(), sys.time(), merge_params(sys, params)};
    std::vector<double> s = init;
    for (std::size_t k = 0; k < steps; ++k) {
        double t = t0 + static_cast<double>(k) * h;
        if (!st.step(t, h, s)) {
            traj.truncated = true;
            break;
        }
        bool inside = true;
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (!sys.domain().has_interval(sys.states()[i])) continue;
            Interval iv = sys.domain().interval(sys.states()[i]);
            if (s[i] <= iv.lo || s[i] >= iv.hi) inside = false;
        }
        if (!inside) {
            traj.truncated = true;
            break;
        }
        traj.times.push_back(t0 + static_cast<double>(k + 1) * h);
        traj.states.push_back(s);
    }
    return traj;
}

FlowCompare hamilton_flow_compare(const FirstOrderSystem& sys, const HamiltonianDescription& hd,
                                  const std::vector<double>& init, double t0, double h,
                                  std::size_t steps, double tolerance, const Bindings& params) {
    FlowCompare out;
    out.tolerance = tolerance;
    Trajectory base = rk4_integrate(sys, init, t0, h, steps, params);

    Bindings env = merge_params(sys, params);
    env[hd.t_name] = t0;
    env[hd.x_name] = init[0];
    env[hd.y_name] = init[1];
    double q = init[0];
    double p = evaluate(hd.p_of, env);

    std::vector<Expr> can_rhs;
    std::vector<std::string> can_names{hd.q_name, hd.p_name};
    out.used_symbolic_hamiltonian = hd.hamiltonian.has_value();
    Expr gamma_p;  // dp/dt along the flow, in (t, x, y)
    if (out.used_symbolic_hamiltonian) {
        can_rhs.push_back(differentiate(*hd.hamiltonian, hd.p_name));
        can_rhs.push_back(simplify(num(0) - differentiate(*hd.hamiltonian, hd.q_name)));
    } else {
        Expr gp = differentiate(hd.p_of, hd.t_name);
        gp = gp + sys.velocity(0) * differentiate(hd.p_of, hd.x_name);
        gp = gp + sys.velocity(1) * differentiate(hd.p_of, hd.y_name);
        gamma_p = simplify(gp);
    }

    double y_prev = init[1];
    double maxdev = 0.0;
    std::size_t compared = 0;
    for (std::size_t k = 0; k + 1 < base.times.size(); ++k) {
        double t = base.times[k];
        // advance the canonical pair by one RK4 step
        auto rhs = [&](double tt, double qq, double pp, double& dq, double& dp) -> bool {
            Bindings e2 = env;
            e2[hd.t_name] = tt;
            if (out.used_symbolic_hamiltonian) {
                e2[hd.q_name] = qq;
                e2[hd.p_name] = pp;
                try {
                    dq = evaluate(can_rhs[0], e2);
                    dp = evaluate(can_rhs[1], e2);
                } catch (const EvalError&) {
                    return false;
                }
            } else {
                double yy;
                try {
                    yy = invert_p(hd, tt, qq, pp, y_prev, env);
                } catch (const ConstructionError&) {
                    return false;
                }
                e2[hd.x_name] = qq;
                e2[hd.y_name] = yy;
                try {
                    dq = evaluate(sys.velocity(0), e2);
                    dp = evaluate(gamma_p, e2);
                } catch (const EvalError&) {
                    return false;
                }
            }
            return std::isfinite(dq) && std::isfinite(dp);
        };
        double k1q, k1p, k2q, k2p, k3q, k3p, k4q, k4p;
        if (!rhs(t, q, p, k1q, k1p) || !rhs(t + h / 2, q + h / 2 * k1q, p + h / 2 * k1p, k2q, k2p) ||
            !rhs(t + h / 2, q + h / 2 * k2q, p + h / 2 * k2p, k3q, k3p) ||
            !rhs(t + h, q + h * k3q, p + h * k3p, k4q, k4p))
            break;
        q += h / 6 * (k1q + 2 * k2q + 2 * k3q + k4q);
        p += h / 6 * (k1p + 2 * k2p + 2 * k3p + k4p);
        if (!std::isfinite(q) || !std::isfinite(p)) break;

        double tn = base.times[k + 1];
        double x_ref = base.states[k + 1][0];
        double y_ref = base.states[k + 1][1];
        double y_rec;
        try {
            if (hd.y_of) {
                Bindings e2 = env;
                e2[hd.t_name] = tn;
                e2[hd.q_name] = q;
                e2[hd.p_name] = p;
                y_rec = evaluate(*hd.y_of, e2);
            } else {
                y_rec = invert_p(hd, tn, q, p, y_prev, env);
            }
        } catch (const EvalError&) {
            break;
        } catch (const ConstructionError&) {
            break;
        }
        y_prev = y_rec;
        ++compared;
        maxdev = std::max(maxdev, std::abs(q - x_ref));
        maxdev = std::max(maxdev, std::abs(y_rec - y_ref));
    }
    out.compared = compared;
    out.max_deviation = maxdev;
    out.pass = !base.truncated && compared == base.steps_taken() && compared == steps &&
               maxdev < tolerance;
    return out;
}

DriftReport conservation_check(const FirstOrderSystem& sys, const Expr& f, const Trajectory& traj,
                               const Bindings& params) {
    DriftReport out;
    Bindings env = merge_params(sys, params);
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        env[sys.time()] = traj.times[k];
        for (std::size_t i = 0; i < sys.dim(); ++i) env[sys.states()[i]] = traj.states[k][i];
        double v = evaluate(f, env);
        if (k == 0)
            out.initial = v;
        else
            out.max_drift = std::max(out.max_drift, std::abs(v - out.initial));
        ++out.points;
    }
    return out;
}

FdReport fd_crosscheck(const Expr& e, const std::string& v, const Domain& d, std::uint64_t seed,
                       int points) {
    FdReport out;
    Expr de = differentiate(e, v);
    std::set<std::string> syms;
    for (const auto& s : free_symbols(e)) syms.insert(s);
    syms.insert(v);
    std::vector<std::string> symv(syms.begin(), syms.end());

    Rng rng(seed);
    int collected = 0, rejected = 0;
    const double step = 1e-6;
    while (collected < points) {
        Bindings pt;
        try {
            pt = d.sample(symv, rng);
        } catch (const SamplingError&) {
            break;
        }
        double exact, fplus, fminus;
        double hh = step * (1.0 + std::abs(pt[v]));
        try {
            exact = evaluate(de, pt);
            Bindings p2 = pt;
            p2[v] = pt[v] + hh;
            fplus = evaluate(e, p2);
            p2[v] = pt[v] - hh;
            fminus = evaluate(e, p2);
        } catch (const EvalError&) {
            if (++rejected >= 1000) break;
            continue;
        }
        rejected = 0;
        ++collected;
        double fd = (fplus - fminus) / (2 * hh);
        double rel = std::abs(fd - exact) / (1.0 + std::abs(exact));
        out.max_rel_err = std::max(out.max_rel_err, rel);
    }
    out.points = static_cast<std::size_t>(collected);
    out.pass = collected == points && out.max_rel_err <= 1e-5;
    return out;
}

}  // namespace jlm
