#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "jlm/expr.hpp"
#include "jlm/rational.hpp"

namespace jlm {

/// Deterministic PRNG used everywhere sampling happens (fixed algorithm +
/// fixed default seed => reproducible runs).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : s_(seed ? seed : 0x9e3779b97f4a7c15ull) {}
    std::uint64_t next_u64() {
        // splitmix64
        std::uint64_t z = (s_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

private:
    std::uint64_t s_;
};

constexpr std::uint64_t kDefaultSeed = 20240915ull;

class SamplingError : public std::runtime_error {
public:
    explicit SamplingError(const std::string& what) : std::runtime_error(what) {}
};

struct Interval {
    double lo = -2.0;
    double hi = 2.0;  // open interval; +-inf allowed
};

/// Where variables live: per-variable open intervals, pinned parameter values,
/// and expressions that must stay away from zero when sampling.
class Domain {
public:
    static constexpr double kExcludeTol = 1e-8;

    void set_interval(const std::string& name, double lo, double hi) {
        intervals_[name] = Interval{lo, hi};
    }
    void pin(const std::string& name, double v) { pinned_[name] = v; }
    void exclude(const Expr& e) { excluded_.push_back(e); }

    bool pinned(const std::string& name) const { return pinned_.count(name) > 0; }
    double pinned_value(const std::string& name) const { return pinned_.at(name); }
    Interval interval(const std::string& name) const {
        auto it = intervals_.find(name);
        return it == intervals_.end() ? Interval{} : it->second;
    }
    bool has_interval(const std::string& name) const { return intervals_.count(name) > 0; }
    const std::vector<Expr>& excluded() const { return excluded_; }
    const std::map<std::string, double>& pins() const { return pinned_; }

    Domain with_excluded(const std::vector<Expr>& more) const {
        Domain d = *this;
        for (const auto& e : more)
            if (e.valid() && !e.is_number()) d.excluded_.push_back(e);
        return d;
    }

    /// Finite sampling window for a variable (infinite ends folded to a span
    /// of four units).
    Interval window(const std::string& name) const;

    /// One point for the listed symbols: pinned values where pinned, uniform
    /// draws elsewhere, rejecting draws that land within kExcludeTol of an
    /// excluded surface. Throws SamplingError after 1000 straight rejections.
    std::map<std::string, double> sample(const std::vector<std::string>& symbols,
                                         Rng& rng) const;

    /// A simple deterministic interior point (used as a base point for path
    /// integrations): 1 where the variable must stay positive, 0 otherwise,
    /// nudged off excluded surfaces.
    std::map<std::string, Rational> base_point(const std::vector<std::string>& symbols) const;

private:
    std::map<std::string, Interval> intervals_;
    std::map<std::string, double> pinned_;
    std::vector<Expr> excluded_;
};

}  // namespace jlm
