#include "jlm/equivalence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "jlm/eval.hpp"
#include "jlm/simplify.hpp"

namespace jlm {
namespace {

std::vector<std::string> gather_symbols(std::initializer_list<Expr> es, const Domain& d) {
    std::set<std::string> s;
    for (const auto& e : es)
        for (const auto& n : free_symbols(e)) s.insert(n);
    for (const auto& ex : d.excluded())
        for (const auto& n : free_symbols(ex)) s.insert(n);
    return {s.begin(), s.end()};
}

}  // namespace

EquivResult equivalent(const Expr& a, const Expr& b, const Domain& d, const EquivOptions& opts) {
    Expr diff = simplify(a - b);
    if (diff.is_zero()) return {true, CheckMode::Symbolic, 0.0};

    auto symbols = gather_symbols({a, b}, d);
    Rng rng(opts.seed);
    EquivResult r{true, CheckMode::Numeric, 0.0};
    int collected = 0, rejected = 0;
    while (collected < opts.points) {
        auto pt = d.sample(symbols, rng);
        double va, vb;
        try {
            va = evaluate(a, pt);
            vb = evaluate(b, pt);
        } catch (const EvalError&) {
            if (++rejected >= 1000)
                throw SamplingError("equivalence sampling: 1000 consecutive evaluation "
                                    "failures");
            continue;
        }
        rejected = 0;
        ++collected;
        double dev = std::abs(va - vb);
        double bound = opts.tolerance * (1.0 + std::abs(va) + std::abs(vb));
        r.max_deviation = std::max(r.max_deviation, dev);
        if (dev > bound) {
            r.equal = false;
            return r;
        }
    }
    return r;
}

double min_abs_on_samples(const Expr& e, const Domain& d, const EquivOptions& opts) {
    auto symbols = gather_symbols({e}, d);
    Rng rng(opts.seed);
    double best = std::numeric_limits<double>::infinity();
    int collected = 0, rejected = 0;
    while (collected < opts.points) {
        auto pt = d.sample(symbols, rng);
        double v;
        try {
            v = evaluate(e, pt);
        } catch (const EvalError&) {
            if (++rejected >= 1000)
                throw SamplingError("sampling: 1000 consecutive evaluation failures");
            continue;
        }
        rejected = 0;
        ++collected;
        best = std::min(best, std::abs(v));
    }
    return best;
}

}  // namespace jlm
