#include "jlm/domain.hpp"

#include <cmath>

#include "jlm/eval.hpp"

namespace jlm {

Interval Domain::window(const std::string& name) const {
    Interval iv = interval(name);
    bool lo_inf = std::isinf(iv.lo), hi_inf = std::isinf(iv.hi);
    if (lo_inf && hi_inf) return Interval{-2.0, 2.0};
    if (hi_inf) return Interval{iv.lo, iv.lo + 4.0};
    if (lo_inf) return Interval{iv.hi - 4.0, iv.hi};
    return iv;
}

std::map<std::string, double> Domain::sample(const std::vector<std::string>& symbols,
                                             Rng& rng) const {
    for (int attempt = 0; attempt < 1000; ++attempt) {
        std::map<std::string, double> pt;
        for (const auto& s : symbols) {
            if (pinned(s)) {
                pt[s] = pinned_value(s);
                continue;
            }
            Interval w = window(s);
            pt[s] = rng.uniform(w.lo, w.hi);
        }
        std::map<std::string, double> env = pt;
        for (const auto& [k, v] : pinned_)
            if (!env.count(k)) env[k] = v;
        bool ok = true;
        for (const auto& ex : excluded_) {
            try {
                if (std::abs(evaluate(ex, env)) < kExcludeTol) {
                    ok = false;
                    break;
                }
            } catch (const EvalError&) {
                // the exclusion constrains symbols that are not being
                // sampled here; it cannot reject this point
            }
        }
        if (ok) return pt;
    }
    throw SamplingError("could not sample a point off the excluded surfaces "
                        "(1000 consecutive rejections)");
}

std::map<std::string, Rational> Domain::base_point(
    const std::vector<std::string>& symbols) const {
    std::map<std::string, Rational> pt;
    for (const auto& s : symbols) {
        if (pinned(s)) {
            // keep exactness when the pin is a small rational
            double v = pinned_value(s);
            double r = std::nearbyint(v * 16);
            if (std::abs(r / 16 - v) < 1e-12 && std::abs(r) < 1e6)
                pt[s] = Rational(static_cast<long long>(r), 16);
            else
                pt[s] = Rational(1);
            continue;
        }
        Interval iv = interval(s);
        Rational c = (iv.lo >= 0.0 && !std::isinf(iv.lo)) ? Rational(1) : Rational(0);
        // respect a finite window
        Interval w = window(s);
        double cd = c.to_double();
        if (cd <= w.lo || cd >= w.hi) c = Rational(static_cast<long long>((w.lo + w.hi) / 2));
        pt[s] = c;
    }
    for (int round = 0; round < 8; ++round) {
        bool moved = false;
        std::map<std::string, double> dpt;
        for (const auto& [k, v] : pt) dpt[k] = v.to_double();
        for (const auto& [k, v] : pins())
            if (!dpt.count(k)) dpt[k] = v;
        for (const auto& ex : excluded_) {
            bool bad = false;
            try {
                bad = std::abs(evaluate(ex, dpt)) < kExcludeTol;
            } catch (const EvalError&) {
                // not decidable at this point; leave the base point alone
            }
            if (!bad) continue;
            for (const auto& s : free_symbols(ex)) {
                auto it = pt.find(s);
                if (it != pt.end()) {
                    it->second = it->second + Rational(1);
                    moved = true;
                }
            }
        }
        if (!moved) break;
    }
    return pt;
}

}  // namespace jlm
