#include "jlm/render.hpp"

#include <sstream>

#include "jlm/simplify.hpp"

namespace jlm {

namespace {

std::string render_sum(const Expr& e);
std::string render_factor(const Expr& e);

bool negative_term(const Expr& t) {
    if (t.is_number()) return t.value().is_negative();
    if (t.kind() == Kind::Mul && !t.kids().empty() && t.kids()[0].is_number())
        return t.kids()[0].value().is_negative();
    return false;
}

Expr negate_term(const Expr& t) {
    auto [c, key] = split_coefficient(t);
    Rational m = -c;
    if (key.is_one()) return raw_number(m);
    if (m.is_one()) return key;
    std::vector<Expr> kids;
    kids.push_back(raw_number(m));
    for (const auto& f : multiplicative_factors(key)) kids.push_back(f);
    return raw_mul(std::move(kids));
}

bool is_sqrt_pow(const Expr& e, bool negative) {
    if (e.kind() != Kind::Pow) return false;
    const Expr& ex = e.kids()[1];
    if (!ex.is_number()) return false;
    Rational want = negative ? Rational(-1, 2) : Rational(1, 2);
    return ex.value() == want;
}

std::string render_pow(const Expr& e) {
    const Expr& b = e.kids()[0];
    const Expr& ex = e.kids()[1];
    if (is_sqrt_pow(e, false)) return "sqrt(" + render_sum(b) + ")";
    std::string bs;
    switch (b.kind()) {
        case Kind::Symbol:
            bs = b.name();
            break;
        case Kind::Fun:
        case Kind::Integral:
            bs = render_factor(b);
            break;
        case Kind::Number:
            if (b.value().is_integer() && !b.value().is_negative())
                bs = b.value().str();
            else
                bs = "(" + b.value().str() + ")";
            break;
        default:
            bs = "(" + render_sum(b) + ")";
    }
    std::string es;
    if (ex.is_number() && ex.value().is_integer() && !ex.value().is_negative())
        es = ex.value().str();
    else if (ex.kind() == Kind::Symbol)
        es = ex.name();
    else
        es = "(" + render_sum(ex) + ")";
    return bs + "^" + es;
}

/// Renders a product-shaped term with nonnegative coefficient.
/// Second result reports whether the string begins with a caret power,
/// which a caller-prepended '-' would capture as (-base)^e.
std::pair<std::string, bool> render_product(const Expr& t) {
    Rational coeff(1);
    std::vector<std::pair<std::string, bool>> numerator;  // text, rendered-with-caret
    std::vector<std::string> den_parts;
    for (const auto& f : multiplicative_factors(t)) {
        if (f.is_number()) {
            coeff = f.value();
            continue;
        }
        if (f.kind() == Kind::Pow) {
            const Expr& ex = f.kids()[1];
            if (is_sqrt_pow(f, true)) {
                den_parts.push_back("sqrt(" + render_sum(f.kids()[0]) + ")");
                continue;
            }
            if (ex.is_number() && ex.value().is_negative()) {
                Rational flipped = -ex.value();
                if (flipped.is_one())
                    den_parts.push_back(render_factor(f.kids()[0]));
                else
                    den_parts.push_back(render_pow(raw_pow(f.kids()[0], raw_number(flipped))));
                continue;
            }
            numerator.emplace_back(render_pow(f), !is_sqrt_pow(f, false));
            continue;
        }
        numerator.emplace_back(render_factor(f), false);
    }
    std::vector<std::string> num_parts;
    for (auto& [s, _] : numerator) num_parts.push_back(s);
    std::string num;
    long long p = coeff.num() < 0 ? -coeff.num() : coeff.num();
    bool neg = coeff.num() < 0;
    bool first_is_pow = p == 1 && !numerator.empty() && numerator[0].second;
    if (num_parts.empty()) {
        num = std::to_string(p);
    } else if (p == 1) {
        for (std::size_t i = 0; i < num_parts.size(); ++i) {
            if (i) num += "*";
            num += num_parts[i];
        }
    } else {
        num = std::to_string(p);
        for (const auto& s : num_parts) num += "*" + s;
    }
    if (coeff.den() != 1) den_parts.insert(den_parts.begin(), std::to_string(coeff.den()));
    std::string out = num;
    if (!den_parts.empty()) {
        bool needs_paren = den_parts.size() > 1 || den_parts[0].find_first_of("*/^+- ") != std::string::npos;
        std::string den;
        for (std::size_t i = 0; i < den_parts.size(); ++i) {
            if (i) den += "*";
            den += den_parts[i];
        }
        out += "/" + (needs_paren ? "(" + den + ")" : den);
    }
    if (neg) out = "-" + out;  // callers strip signs first; defensive only
    return {out, first_is_pow && !neg};
}

std::string render_factor(const Expr& e) {
    switch (e.kind()) {
        case Kind::Number: {
            const Rational& v = e.value();
            if (v.is_integer() && !v.is_negative()) return v.str();
            return "(" + v.str() + ")";
        }
        case Kind::Symbol:
            return e.name();
        case Kind::Fun:
            return e.name() + "(" + render_sum(e.kids()[0]) + ")";
        case Kind::Integral: {
            std::string s = "integral(" + render_sum(e.kids()[0]) + ", " + e.name();
            if (e.has_lower()) s += ", " + render_sum(e.kids()[1]);
            s += ", " + render_sum(e.kids()[e.has_lower() ? 2 : 1]) + ")";
            return s;
        }
        case Kind::Pow:
            return render_pow(e);
        default:
            return "(" + render_sum(e) + ")";
    }
}

std::string render_term(const Expr& t) {
    if (t.is_number()) return t.value().str();
    if (t.kind() == Kind::Mul || t.kind() == Kind::Pow) return render_product(t).first;
    return render_factor(t);
}

std::string render_sum(const Expr& e) {
    auto terms = additive_terms(e);
    std::string out;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        const Expr& t = terms[i];
        bool neg = negative_term(t);
        Expr mag = neg ? negate_term(t) : t;
        if (i == 0) {
            if (!neg) {
                out += render_term(mag);
            } else if (mag.is_number()) {
                out += "-" + mag.value().str();
            } else {
                auto [s, starts_pow] = render_product(mag);
                out += starts_pow ? "-(" + s + ")" : "-" + s;
            }
        } else {
            out += neg ? " - " : " + ";
            out += render_term(mag);
        }
    }
    return out;
}

}  // namespace

std::string render(const Expr& e) { return render_sum(normalize(e)); }

}  // namespace jlm
