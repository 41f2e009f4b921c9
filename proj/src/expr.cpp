#include "jlm/expr.hpp"

#include <algorithm>

#include "jlm/simplify.hpp"

namespace jlm {

Expr raw_number(const Rational& v) {
    ExprNode n;
    n.kind = Kind::Number;
    n.value = v;
    return Expr::raw(std::move(n));
}

Expr raw_symbol(const std::string& name) {
    ExprNode n;
    n.kind = Kind::Symbol;
    n.name = name;
    return Expr::raw(std::move(n));
}

Expr raw_add(std::vector<Expr> kids) {
    ExprNode n;
    n.kind = Kind::Add;
    n.kids = std::move(kids);
    return Expr::raw(std::move(n));
}

Expr raw_mul(std::vector<Expr> kids) {
    ExprNode n;
    n.kind = Kind::Mul;
    n.kids = std::move(kids);
    return Expr::raw(std::move(n));
}

Expr raw_pow(const Expr& base, const Expr& exponent) {
    ExprNode n;
    n.kind = Kind::Pow;
    n.kids = {base, exponent};
    return Expr::raw(std::move(n));
}

Expr raw_neg(const Expr& e) {
    ExprNode n;
    n.kind = Kind::Neg;
    n.kids = {e};
    return Expr::raw(std::move(n));
}

Expr raw_div(const Expr& a, const Expr& b) {
    ExprNode n;
    n.kind = Kind::Div;
    n.kids = {a, b};
    return Expr::raw(std::move(n));
}

Expr raw_fun(const std::string& name, std::vector<Expr> args) {
    ExprNode n;
    n.kind = Kind::Fun;
    n.name = name;
    n.kids = std::move(args);
    return Expr::raw(std::move(n));
}

Expr raw_integral(const Expr& integrand, const std::string& var,
                  const std::optional<Expr>& lower, const Expr& upper) {
    ExprNode n;
    n.kind = Kind::Integral;
    n.name = var;
    if (lower) {
        n.kids = {integrand, *lower, upper};
        n.has_lower = true;
    } else {
        n.kids = {integrand, upper};
    }
    return Expr::raw(std::move(n));
}

Expr num(long long n) { return raw_number(Rational(n)); }
Expr num(const Rational& v) { return raw_number(v); }
Expr num(long long n, long long d) { return raw_number(Rational(n, d)); }
Expr sym(const std::string& name) { return raw_symbol(name); }

Expr add(std::vector<Expr> kids) { return normalize(raw_add(std::move(kids))); }
Expr mul(std::vector<Expr> kids) { return normalize(raw_mul(std::move(kids))); }
Expr pow(const Expr& base, const Expr& exponent) { return normalize(raw_pow(base, exponent)); }
Expr exp(const Expr& e) { return normalize(raw_fun("exp", {e})); }
Expr log(const Expr& e) { return normalize(raw_fun("log", {e})); }
Expr sin(const Expr& e) { return normalize(raw_fun("sin", {e})); }
Expr cos(const Expr& e) { return normalize(raw_fun("cos", {e})); }
Expr sqrt(const Expr& e) { return normalize(raw_fun("sqrt", {e})); }

Expr integral(const Expr& integrand, const std::string& var,
              const std::optional<Expr>& lower, const Expr& upper) {
    return normalize(raw_integral(integrand, var, lower, upper));
}

Expr integral(const Expr& integrand, const std::string& var, const Expr& upper) {
    return normalize(raw_integral(integrand, var, std::nullopt, upper));
}

Expr operator+(const Expr& a, const Expr& b) { return add({a, b}); }
Expr operator-(const Expr& a, const Expr& b) { return add({a, mul({num(-1), b})}); }
Expr operator*(const Expr& a, const Expr& b) { return mul({a, b}); }
Expr operator/(const Expr& a, const Expr& b) { return mul({a, pow(b, num(-1))}); }
Expr operator-(const Expr& a) { return mul({num(-1), a}); }
Expr operator+(const Expr& a, long long b) { return a + num(b); }
Expr operator+(long long a, const Expr& b) { return num(a) + b; }
Expr operator-(const Expr& a, long long b) { return a - num(b); }
Expr operator-(long long a, const Expr& b) { return num(a) - b; }
Expr operator*(const Expr& a, long long b) { return a * num(b); }
Expr operator*(long long a, const Expr& b) { return num(a) * b; }
Expr operator/(const Expr& a, long long b) { return a / num(b); }
Expr operator/(long long a, const Expr& b) { return num(a) / b; }

namespace {

int kind_rank(Kind k) {
    switch (k) {
        case Kind::Number: return 0;
        case Kind::Symbol: return 1;
        case Kind::Pow: return 2;
        case Kind::Fun: return 3;
        case Kind::Integral: return 4;
        case Kind::Mul: return 5;
        case Kind::Add: return 6;
        case Kind::Neg: return 7;
        case Kind::Div: return 8;
    }
    return 9;
}

int compare_kids(const Expr& a, const Expr& b) {
    const auto& ka = a.kids();
    const auto& kb = b.kids();
    std::size_t n = std::min(ka.size(), kb.size());
    for (std::size_t i = 0; i < n; ++i) {
        int c = compare(ka[i], kb[i]);
        if (c != 0) return c;
    }
    if (ka.size() != kb.size()) return ka.size() < kb.size() ? -1 : 1;
    return 0;
}

}  // namespace

int compare(const Expr& a, const Expr& b) {
    int ra = kind_rank(a.kind()), rb = kind_rank(b.kind());
    if (ra != rb) return ra < rb ? -1 : 1;
    switch (a.kind()) {
        case Kind::Number: {
            if (a.value() == b.value()) return 0;
            return a.value() < b.value() ? -1 : 1;
        }
        case Kind::Symbol:
            return a.name().compare(b.name()) < 0 ? -1 : (a.name() == b.name() ? 0 : 1);
        case Kind::Fun: {
            int c = a.name().compare(b.name());
            if (c != 0) return c < 0 ? -1 : 1;
            return compare_kids(a, b);
        }
        case Kind::Integral: {
            int c = a.name().compare(b.name());
            if (c != 0) return c < 0 ? -1 : 1;
            if (a.has_lower() != b.has_lower()) return a.has_lower() ? 1 : -1;
            return compare_kids(a, b);
        }
        default:
            return compare_kids(a, b);
    }
}

bool structural_equal(const Expr& a, const Expr& b) { return compare(a, b) == 0; }

namespace {

void collect_symbols(const Expr& e, std::set<std::string>& out) {
    switch (e.kind()) {
        case Kind::Number: return;
        case Kind::Symbol:
            out.insert(e.name());
            return;
        case Kind::Integral: {
            std::set<std::string> inner;
            collect_symbols(e.kids()[0], inner);
            inner.erase(e.name());
            out.insert(inner.begin(), inner.end());
            for (std::size_t i = 1; i < e.kids().size(); ++i) collect_symbols(e.kids()[i], out);
            return;
        }
        default:
            for (const auto& k : e.kids()) collect_symbols(k, out);
    }
}

}  // namespace

std::set<std::string> free_symbols(const Expr& e) {
    std::set<std::string> s;
    collect_symbols(e, s);
    return s;
}

bool depends_on(const Expr& e, const std::string& name) {
    return free_symbols(e).count(name) > 0;
}

bool Expr::depends_on(const std::string& n) const { return jlm::depends_on(*this, n); }

bool Expr::depends_on_any(const std::set<std::string>& names) const {
    return jlm::depends_on_any(*this, names);
}

bool depends_on_any(const Expr& e, const std::set<std::string>& names) {
    auto fs = free_symbols(e);
    for (const auto& n : names)
        if (fs.count(n)) return true;
    return false;
}

namespace {

std::string fresh_dummy(const std::set<std::string>& taken) {
    if (!taken.count("z")) return "z";
    for (int i = 1;; ++i) {
        std::string c = "z" + std::to_string(i);
        if (!taken.count(c)) return c;
    }
}

Expr substitute_raw(const Expr& e, const std::map<std::string, Expr>& bindings) {
    switch (e.kind()) {
        case Kind::Number: return e;
        case Kind::Symbol: {
            auto it = bindings.find(e.name());
            return it == bindings.end() ? e : it->second;
        }
        case Kind::Integral: {
            auto inner = bindings;
            inner.erase(e.name());
            Expr integrand = e.kids()[0];
            std::string var = e.name();
            // Rename the dummy when a replacement would capture it.
            bool capture = false;
            for (const auto& [k, v] : inner)
                if (depends_on(integrand, k) && depends_on(v, var)) capture = true;
            if (capture) {
                std::set<std::string> taken = free_symbols(integrand);
                for (const auto& [k, v] : inner) {
                    auto fs = free_symbols(v);
                    taken.insert(fs.begin(), fs.end());
                }
                std::string nv = fresh_dummy(taken);
                integrand = substitute_raw(integrand, {{var, raw_symbol(nv)}});
                var = nv;
            }
            integrand = substitute_raw(integrand, inner);
            std::optional<Expr> lo;
            Expr hi;
            if (e.has_lower()) {
                lo = substitute_raw(e.kids()[1], bindings);
                hi = substitute_raw(e.kids()[2], bindings);
            } else {
                hi = substitute_raw(e.kids()[1], bindings);
            }
            return raw_integral(integrand, var, lo, hi);
        }
        default: {
            ExprNode n;
            n.kind = e.kind();
            n.value = e.value();
            n.name = e.name();
            n.has_lower = e.has_lower();
            n.kids.reserve(e.kids().size());
            for (const auto& k : e.kids()) n.kids.push_back(substitute_raw(k, bindings));
            return Expr::raw(std::move(n));
        }
    }
}

}  // namespace

Expr substitute(const Expr& e, const std::map<std::string, Expr>& bindings) {
    if (bindings.empty()) return e;
    return normalize(substitute_raw(e, bindings));
}

Expr substitute(const Expr& e, const std::string& name, const Expr& replacement) {
    return substitute(e, std::map<std::string, Expr>{{name, replacement}});
}

std::optional<Rational> as_number(const Expr& e) {
    if (e.is_number()) return e.value();
    return std::nullopt;
}

}  // namespace jlm
