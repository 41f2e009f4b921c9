#include "jlm/simplify.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace jlm {

std::vector<Expr> additive_terms(const Expr& e) {
    if (e.kind() == Kind::Add) return e.kids();
    return {e};
}

std::vector<Expr> multiplicative_factors(const Expr& e) {
    if (e.kind() == Kind::Mul) return e.kids();
    return {e};
}

std::pair<Rational, Expr> split_coefficient(const Expr& term) {
    if (term.is_number()) return {term.value(), num(1)};
    if (term.kind() == Kind::Mul && !term.kids().empty() && term.kids()[0].is_number()) {
        std::vector<Expr> rest(term.kids().begin() + 1, term.kids().end());
        if (rest.size() == 1) return {term.kids()[0].value(), rest[0]};
        return {term.kids()[0].value(), raw_mul(std::move(rest))};
    }
    return {Rational(1), term};
}

namespace {

Expr norm(const Expr& e);
Expr make_add(std::vector<Expr> terms);
Expr make_mul(std::vector<Expr> factors);
Expr make_pow(const Expr& base, const Expr& exponent);
Expr make_fun(const std::string& name, const Expr& arg);

/// coeff * key with canonical product layout (Number first, factors sorted).
Expr coeff_times(const Rational& c, const Expr& key) {
    if (c.is_zero()) return raw_number(Rational(0));
    if (key.is_one()) return raw_number(c);
    if (c.is_one()) return key;
    std::vector<Expr> kids;
    kids.push_back(raw_number(c));
    for (const auto& f : multiplicative_factors(key)) kids.push_back(f);
    return raw_mul(std::move(kids));
}

bool leading_negative(const Expr& e) {
    switch (e.kind()) {
        case Kind::Number: return e.value().is_negative();
        case Kind::Mul:
            return !e.kids().empty() && e.kids()[0].is_number() && e.kids()[0].value().is_negative();
        case Kind::Add: return !e.kids().empty() && leading_negative(e.kids()[0]);
        default: return false;
    }
}

// Quotient N / D for canonical sums when it is a single monomial: try every
// monomial pair (n_i, d_j), form the candidate q = n_i / d_j and accept it if
// q * D re-expands to exactly N.
std::optional<Expr> divide_sum(const Expr& N, const Expr& D) {
    if (N.kind() != Kind::Add || D.kind() != Kind::Add) return std::nullopt;
    for (const auto& nk : N.kids()) {
        for (const auto& dk : D.kids()) {
            Expr q = make_mul({nk, make_pow(dk, raw_number(Rational(-1)))});
            if (structural_equal(make_mul({q, D}), N)) return q;
        }
    }
    return std::nullopt;
}

// One cancellation pass over the terms of a sum: terms sharing a factor
// D^(-k) (D itself a sum, k a positive integer) are combined; when their
// joint numerator is divisible by D the group collapses. This undoes the
// information the expanding canonical form loses in quotients like
// ((1+n)*x^n) / (1+n).
bool cancel_common_denominators(std::vector<Expr>& out) {
    struct Key {
        Expr base;
        Rational k;
    };
    struct KeyLess {
        bool operator()(const Key& a, const Key& b) const {
            int c = compare(a.base, b.base);
            if (c != 0) return c < 0;
            return a.k < b.k;
        }
    };
    std::map<Key, std::vector<std::size_t>, KeyLess> groups;
    for (std::size_t i = 0; i < out.size(); ++i) {
        for (const auto& f : multiplicative_factors(out[i])) {
            if (f.kind() != Kind::Pow) continue;
            const Expr& base = f.kids()[0];
            const Expr& expo = f.kids()[1];
            if (base.kind() != Kind::Add) continue;
            if (!expo.is_number() || !expo.value().is_integer()) continue;
            if (!expo.value().is_negative()) continue;
            groups[Key{base, Rational(0) - expo.value()}].push_back(i);
        }
    }
    for (const auto& [key, idx] : groups) {
        if (idx.size() < 2) continue;
        std::vector<Expr> stripped;
        for (std::size_t i : idx)
            stripped.push_back(make_mul({out[i], make_pow(key.base, raw_number(key.k))}));
        Expr N = make_add(std::move(stripped));
        auto q = divide_sum(N, key.base);
        if (!q) continue;
        Expr repl = key.k.is_one()
                        ? *q
                        : make_mul({*q, make_pow(key.base, raw_number(Rational(1) - key.k))});
        std::vector<Expr> next;
        for (std::size_t i = 0; i < out.size(); ++i)
            if (std::find(idx.begin(), idx.end(), i) == idx.end()) next.push_back(out[i]);
        if (!repl.is_zero()) next.push_back(repl);
        out = std::move(next);
        return true;
    }
    return false;
}

Expr make_add(std::vector<Expr> terms) {
    std::vector<Expr> flat;
    for (auto& t : terms) {
        if (t.kind() == Kind::Add)
            for (const auto& k : t.kids()) flat.push_back(k);
        else
            flat.push_back(std::move(t));
    }
    Rational acc(0);
    std::map<Expr, Rational, ExprLess> collected;
    for (const auto& t : flat) {
        if (t.is_number()) {
            try {
                acc += t.value();
            } catch (const std::overflow_error&) {
                collected[num(1)] += t.value();
            }
            continue;
        }
        auto [c, key] = split_coefficient(t);
        if (key.is_one()) {
            acc += c;
            continue;
        }
        collected[key] += c;
    }
    std::vector<Expr> out;
    for (const auto& [key, c] : collected) {
        if (c.is_zero()) continue;
        out.push_back(coeff_times(c, key));
    }
    if (!acc.is_zero()) out.push_back(raw_number(acc));
    if (out.size() > 1 && cancel_common_denominators(out)) return make_add(std::move(out));
    std::sort(out.begin(), out.end(), ExprLess{});
    if (out.empty()) return raw_number(Rational(0));
    if (out.size() == 1) return out[0];
    return raw_add(std::move(out));
}

/// Try to fold base^expo into the running rational coefficient.
bool fold_numeric_pow(const Rational& base, const Rational& expo, Rational& out) {
    if (expo.is_integer()) {
        try {
            out = Rational::pow(base, expo.num());
            return true;
        } catch (const std::exception&) {
            return false;
        }
    }
    if (base.is_negative()) return false;
    try {
        Rational powed = Rational::pow(base, expo.num());
        Rational rooted;
        if (Rational::root(powed, expo.den(), rooted)) {
            out = rooted;
            return true;
        }
    } catch (const std::exception&) {
        return false;
    }
    return false;
}

Expr make_mul(std::vector<Expr> factors) {
    std::vector<Expr> flat;
    for (auto& f : factors) {
        if (f.kind() == Kind::Mul)
            for (const auto& k : f.kids()) flat.push_back(k);
        else
            flat.push_back(std::move(f));
    }
    Rational coeff(1);
    std::map<Expr, std::vector<Expr>, ExprLess> bases;
    std::vector<Expr> exp_args;
    std::vector<Expr> unfoldable;
    for (const auto& f : flat) {
        if (f.is_zero()) return raw_number(Rational(0));
        if (f.is_number()) {
            try {
                coeff *= f.value();
            } catch (const std::overflow_error&) {
                unfoldable.push_back(f);
            }
            continue;
        }
        if (f.is_fun("exp")) {
            exp_args.push_back(f.kids()[0]);
            continue;
        }
        if (f.kind() == Kind::Pow) {
            bases[f.kids()[0]].push_back(f.kids()[1]);
            continue;
        }
        bases[f].push_back(num(1));
    }

    // Merge exponential factors through their summed arguments; rational
    // multiples of logs inside become ordinary power factors.
    if (!exp_args.empty()) {
        Expr s = make_add(std::move(exp_args));
        std::vector<Expr> remainder;
        for (const auto& t : additive_terms(s)) {
            auto [c, key] = split_coefficient(t);
            if (key.is_fun("log")) {
                bases[key.kids()[0]].push_back(num(c));
            } else {
                remainder.push_back(t);
            }
        }
        Expr rest = make_add(std::move(remainder));
        if (!rest.is_zero()) bases[raw_fun("exp", {rest})].push_back(num(1));
    }

    std::vector<Expr> out = std::move(unfoldable);
    for (auto& [base, exps] : bases) {
        Expr expo = make_add(std::move(exps));
        if (expo.is_zero()) continue;
        if (base.is_number() && expo.is_number()) {
            Rational folded;
            if (fold_numeric_pow(base.value(), expo.value(), folded)) {
                try {
                    coeff *= folded;
                    continue;
                } catch (const std::overflow_error&) {
                }
            }
            out.push_back(raw_pow(base, expo));
            continue;
        }
        if (expo.is_one()) {
            out.push_back(base);
            continue;
        }
        out.push_back(make_pow(base, expo));
    }

    if (coeff.is_zero()) return raw_number(Rational(0));

    // Distribute over any sum factor; the canonical form is expanded.
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (out[i].kind() != Kind::Add) continue;
        std::vector<Expr> others;
        others.push_back(raw_number(coeff));
        for (std::size_t j = 0; j < out.size(); ++j)
            if (j != i) others.push_back(out[j]);
        std::vector<Expr> terms;
        for (const auto& t : out[i].kids()) {
            auto fs = others;
            fs.push_back(t);
            terms.push_back(make_mul(std::move(fs)));
        }
        return make_add(std::move(terms));
    }

    std::sort(out.begin(), out.end(), ExprLess{});
    if (out.empty()) return raw_number(coeff);
    if (coeff.is_one()) {
        if (out.size() == 1) return out[0];
        return raw_mul(std::move(out));
    }
    std::vector<Expr> kids;
    kids.push_back(raw_number(coeff));
    for (auto& f : out) kids.push_back(std::move(f));
    return raw_mul(std::move(kids));
}

Expr make_pow(const Expr& base, const Expr& exponent) {
    if (exponent.is_zero()) return raw_number(Rational(1));
    if (exponent.is_one()) return base;
    if (base.is_one()) return raw_number(Rational(1));
    if (base.is_zero()) {
        if (exponent.is_number() && !exponent.value().is_negative()) return raw_number(Rational(0));
        return raw_pow(base, exponent);
    }
    if (base.is_number() && exponent.is_number()) {
        Rational folded;
        if (fold_numeric_pow(base.value(), exponent.value(), folded)) return raw_number(folded);
        return raw_pow(base, exponent);
    }
    if (base.is_fun("exp")) return make_fun("exp", make_mul({base.kids()[0], exponent}));
    bool int_exp = exponent.is_number() && exponent.value().is_integer();
    if (base.kind() == Kind::Pow && int_exp)
        return make_pow(base.kids()[0], make_mul({base.kids()[1], exponent}));
    if (base.kind() == Kind::Mul && int_exp) {
        std::vector<Expr> fs;
        for (const auto& k : base.kids()) fs.push_back(make_pow(k, exponent));
        return make_mul(std::move(fs));
    }
    if (base.kind() == Kind::Add && int_exp) {
        long long n = exponent.value().num();
        long long a = n < 0 ? -n : n;
        if (a >= 2 && a <= 16) {
            // expand term by term; handing make_mul two identical sums would
            // just re-collect them into this same power
            Expr acc = base;
            for (long long i = 1; i < a; ++i) {
                std::vector<Expr> terms;
                for (const auto& u : additive_terms(acc))
                    for (const auto& w : additive_terms(base)) terms.push_back(make_mul({u, w}));
                acc = make_add(std::move(terms));
            }
            if (n > 0) return acc;
            return raw_pow(acc, raw_number(Rational(-1)));
        }
    }
    return raw_pow(base, exponent);
}

Expr make_fun(const std::string& name, const Expr& arg) {
    if (name == "sqrt") return make_pow(arg, num(1, 2));
    if (name == "exp") {
        if (arg.is_zero()) return raw_number(Rational(1));
        if (arg.is_fun("log")) return arg.kids()[0];
        std::vector<Expr> pow_factors;
        std::vector<Expr> remainder;
        for (const auto& t : additive_terms(arg)) {
            auto [c, key] = split_coefficient(t);
            if (key.is_fun("log"))
                pow_factors.push_back(make_pow(key.kids()[0], num(c)));
            else
                remainder.push_back(t);
        }
        if (!pow_factors.empty()) {
            Expr rest = make_add(std::move(remainder));
            if (!rest.is_zero()) pow_factors.push_back(raw_fun("exp", {rest}));
            return make_mul(std::move(pow_factors));
        }
        return raw_fun("exp", {arg});
    }
    if (name == "log") {
        if (arg.is_one()) return raw_number(Rational(0));
        if (arg.is_fun("exp")) return arg.kids()[0];
        return raw_fun("log", {arg});
    }
    if (name == "sin") {
        if (arg.is_zero()) return raw_number(Rational(0));
        if (leading_negative(arg)) {
            Expr flipped = make_mul({raw_number(Rational(-1)), arg});
            return make_mul({raw_number(Rational(-1)), raw_fun("sin", {flipped})});
        }
        return raw_fun("sin", {arg});
    }
    if (name == "cos") {
        if (arg.is_zero()) return raw_number(Rational(1));
        if (leading_negative(arg)) return raw_fun("cos", {make_mul({raw_number(Rational(-1)), arg})});
        return raw_fun("cos", {arg});
    }
    return raw_fun(name, {arg});
}

Expr norm(const Expr& e) {
    switch (e.kind()) {
        case Kind::Number:
        case Kind::Symbol:
            return e;
        case Kind::Add: {
            std::vector<Expr> kids;
            kids.reserve(e.kids().size());
            for (const auto& k : e.kids()) kids.push_back(norm(k));
            return make_add(std::move(kids));
        }
        case Kind::Mul: {
            std::vector<Expr> kids;
            kids.reserve(e.kids().size());
            for (const auto& k : e.kids()) kids.push_back(norm(k));
            return make_mul(std::move(kids));
        }
        case Kind::Pow:
            return make_pow(norm(e.kids()[0]), norm(e.kids()[1]));
        case Kind::Neg:
            return make_mul({raw_number(Rational(-1)), norm(e.kids()[0])});
        case Kind::Div:
            return make_mul({norm(e.kids()[0]), make_pow(norm(e.kids()[1]), raw_number(Rational(-1)))});
        case Kind::Fun:
            return make_fun(e.name(), norm(e.kids()[0]));
        case Kind::Integral: {
            Expr integrand = norm(e.kids()[0]);
            if (integrand.is_zero()) return raw_number(Rational(0));
            std::optional<Expr> lo;
            Expr hi;
            if (e.has_lower()) {
                lo = norm(e.kids()[1]);
                hi = norm(e.kids()[2]);
            } else {
                hi = norm(e.kids()[1]);
            }
            return raw_integral(integrand, e.name(), lo, hi);
        }
    }
    return e;
}

}  // namespace

Expr normalize(const Expr& e) { return norm(e); }

Expr simplify(const Expr& e) {
    Expr cur = e;
    for (int pass = 0; pass < 8; ++pass) {
        Expr next = norm(cur);
        if (structural_equal(next, cur)) return next;
        cur = next;
    }
    return cur;
}

}  // namespace jlm
