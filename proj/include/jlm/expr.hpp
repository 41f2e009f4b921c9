#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "jlm/rational.hpp"

namespace jlm {

enum class Kind {
    Number,    // exact rational literal (integers have denominator 1)
    Symbol,    // named variable or parameter
    Add,       // n-ary, flattened and sorted once normalized
    Mul,       // n-ary, flattened and sorted once normalized
    Pow,       // kids = {base, exponent}
    Neg,       // parser-level only, normalized to (-1)*e
    Div,       // parser-level only, normalized to a*b^-1
    Fun,       // exp, log, sin, cos (sqrt normalizes to power 1/2)
    Integral,  // kids = {integrand, [lower,] upper}, name holds the dummy variable
};

class Expr;
struct ExprNode {
    Kind kind;
    Rational value;          // Number
    std::string name;        // Symbol and Fun name, Integral dummy variable
    std::vector<Expr> kids;
    bool has_lower = false;  // Integral carries an explicit lower bound
};

/// Immutable expression handle. Copies are cheap; the tree is shared.
class Expr {
public:
    Expr() = default;

    Kind kind() const { return node_->kind; }
    const Rational& value() const { return node_->value; }
    const std::string& name() const { return node_->name; }
    const std::vector<Expr>& kids() const { return node_->kids; }
    bool has_lower() const { return node_->has_lower; }
    bool valid() const { return node_ != nullptr; }

    bool is_number() const { return node_->kind == Kind::Number; }
    bool is_zero() const { return is_number() && value().is_zero(); }
    bool is_one() const { return is_number() && value().is_one(); }
    bool is_symbol(const std::string& n) const { return node_->kind == Kind::Symbol && node_->name == n; }
    bool is_fun(const std::string& n) const { return node_->kind == Kind::Fun && node_->name == n; }

    bool depends_on(const std::string& n) const;  // defined with the free-function form
    bool depends_on_any(const std::set<std::string>& names) const;

    static Expr raw(ExprNode&& n) { return Expr(std::make_shared<const ExprNode>(std::move(n))); }

private:
    explicit Expr(std::shared_ptr<const ExprNode> n) : node_(std::move(n)) {}
    std::shared_ptr<const ExprNode> node_;
};

// Raw constructors. No rewriting; the parser and the normalizer build with
// these. Everything else should go through the normalizing builders below.
Expr raw_number(const Rational& v);
Expr raw_symbol(const std::string& name);
Expr raw_add(std::vector<Expr> kids);
Expr raw_mul(std::vector<Expr> kids);
Expr raw_pow(const Expr& base, const Expr& exponent);
Expr raw_neg(const Expr& e);
Expr raw_div(const Expr& a, const Expr& b);
Expr raw_fun(const std::string& name, std::vector<Expr> args);
Expr raw_integral(const Expr& integrand, const std::string& var,
                  const std::optional<Expr>& lower, const Expr& upper);

// Normalizing builders.
Expr num(long long n);
Expr num(const Rational& v);
Expr num(long long n, long long d);
Expr sym(const std::string& name);
Expr add(std::vector<Expr> kids);
Expr mul(std::vector<Expr> kids);
Expr pow(const Expr& base, const Expr& exponent);
Expr exp(const Expr& e);
Expr log(const Expr& e);
Expr sin(const Expr& e);
Expr cos(const Expr& e);
Expr sqrt(const Expr& e);
Expr integral(const Expr& integrand, const std::string& var,
              const std::optional<Expr>& lower, const Expr& upper);
Expr integral(const Expr& integrand, const std::string& var, const Expr& upper);

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr operator+(const Expr& a, long long b);
Expr operator+(long long a, const Expr& b);
Expr operator-(const Expr& a, long long b);
Expr operator-(long long a, const Expr& b);
Expr operator*(const Expr& a, long long b);
Expr operator*(long long a, const Expr& b);
Expr operator/(const Expr& a, long long b);
Expr operator/(long long a, const Expr& b);

/// Strict total order on expressions; drives canonical sorting and map keys.
int compare(const Expr& a, const Expr& b);
bool structural_equal(const Expr& a, const Expr& b);

struct ExprLess {
    bool operator()(const Expr& a, const Expr& b) const { return compare(a, b) < 0; }
};

std::set<std::string> free_symbols(const Expr& e);
bool depends_on(const Expr& e, const std::string& name);
bool depends_on_any(const Expr& e, const std::set<std::string>& names);

/// Substitute symbols by expressions (capture-avoiding across integral
/// dummies); result is normalized.
Expr substitute(const Expr& e, const std::map<std::string, Expr>& bindings);
Expr substitute(const Expr& e, const std::string& name, const Expr& replacement);

std::optional<Rational> as_number(const Expr& e);

}  // namespace jlm
