#include "jlm/parser.hpp"

#include <cctype>
#include <sstream>

#include "jlm/simplify.hpp"

namespace jlm {

namespace {

std::string format_message(std::size_t offset, const std::vector<std::string>& expected,
                           const std::string& found) {
    std::ostringstream os;
    os << "syntax error at byte " << offset << ": expected ";
    for (std::size_t i = 0; i < expected.size(); ++i) {
        if (i) os << (i + 1 == expected.size() ? " or " : ", ");
        os << expected[i];
    }
    os << "; found " << found;
    return os.str();
}

struct Token {
    enum Type { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, Comma, End };
    Type type;
    std::size_t offset;
    std::string text;
    Rational value;
};

class Lexer {
public:
    explicit Lexer(const std::string& src) : src_(src) {}

    Token next() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        std::size_t at = pos_;
        if (pos_ >= src_.size()) return {Token::End, at, "end of input", Rational(0)};
        char c = src_[pos_];
        switch (c) {
            case '+': ++pos_; return {Token::Plus, at, "'+'", Rational(0)};
            case '-': ++pos_; return {Token::Minus, at, "'-'", Rational(0)};
            case '*': ++pos_; return {Token::Star, at, "'*'", Rational(0)};
            case '/': ++pos_; return {Token::Slash, at, "'/'", Rational(0)};
            case '^': ++pos_; return {Token::Caret, at, "'^'", Rational(0)};
            case '(': ++pos_; return {Token::LParen, at, "'('", Rational(0)};
            case ')': ++pos_; return {Token::RParen, at, "')'", Rational(0)};
            case ',': ++pos_; return {Token::Comma, at, "','", Rational(0)};
            default: break;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) return lex_number(at);
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return lex_ident(at);
        throw ParseError(at, {"number", "identifier", "'('", "'-'"},
                         std::string("'") + c + "'");
    }

private:
    Token lex_number(std::size_t at) {
        std::string digits;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
            digits += src_[pos_++];
        std::string frac;
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
                frac += src_[pos_++];
            if (frac.empty()) throw ParseError(pos_, {"digit"}, "end of number");
        }
        try {
            Rational v(std::stoll(digits));
            if (!frac.empty()) {
                Rational scale = Rational::pow(Rational(10), static_cast<long long>(frac.size()));
                v += Rational(std::stoll(frac)) / scale;
            }
            return {Token::Number, at, digits + (frac.empty() ? "" : "." + frac), v};
        } catch (const std::exception&) {
            throw ParseError(at, {"representable number"}, "'" + digits + "'");
        }
    }

    Token lex_ident(std::size_t at) {
        std::string name;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
            name += src_[pos_++];
        return {Token::Ident, at, name, Rational(0)};
    }

    const std::string& src_;
    std::size_t pos_ = 0;
};

const std::vector<std::string> kAtomExpected = {"number", "identifier", "'('", "'-'"};
const std::vector<std::string> kKnownFunctions = {"exp", "log", "sin", "cos", "sqrt", "integral"};

class Parser {
public:
    explicit Parser(const std::string& src) : lexer_(src) { advance(); }

    Expr run() {
        Expr e = parse_expr();
        if (cur_.type != Token::End)
            throw ParseError(cur_.offset, {"'+'", "'-'", "'*'", "'/'", "'^'", "end of input"},
                             cur_.text);
        return e;
    }

private:
    void advance() { cur_ = lexer_.next(); }

    bool accept(Token::Type t) {
        if (cur_.type != t) return false;
        advance();
        return true;
    }

    Expr parse_expr() {
        Expr e = parse_term();
        while (true) {
            if (accept(Token::Plus)) {
                e = raw_add({e, parse_term()});
            } else if (accept(Token::Minus)) {
                e = raw_add({e, raw_neg(parse_term())});
            } else {
                return e;
            }
        }
    }

    Expr parse_term() {
        Expr e = parse_factor();
        while (true) {
            if (accept(Token::Star)) {
                e = raw_mul({e, parse_factor()});
            } else if (accept(Token::Slash)) {
                e = raw_div(e, parse_factor());
            } else {
                return e;
            }
        }
    }

    Expr parse_factor() {
        Expr e = parse_unary();
        if (accept(Token::Caret)) return raw_pow(e, parse_factor());
        return e;
    }

    Expr parse_unary() {
        if (accept(Token::Minus)) return raw_neg(parse_unary());
        return parse_atom();
    }

    Expr parse_atom() {
        if (cur_.type == Token::Number) {
            Expr e = raw_number(cur_.value);
            advance();
            return e;
        }
        if (cur_.type == Token::Ident) {
            Token id = cur_;
            advance();
            if (!accept(Token::LParen)) return raw_symbol(id.text);
            std::vector<Expr> args;
            std::vector<std::size_t> arg_offsets;
            arg_offsets.push_back(cur_.offset);
            args.push_back(parse_expr());
            while (accept(Token::Comma)) {
                arg_offsets.push_back(cur_.offset);
                args.push_back(parse_expr());
            }
            if (!accept(Token::RParen))
                throw ParseError(cur_.offset, {"')'", "','"}, cur_.text);
            return apply_function(id, std::move(args), arg_offsets);
        }
        if (cur_.type == Token::LParen) {
            advance();
            Expr e = parse_expr();
            if (!accept(Token::RParen)) throw ParseError(cur_.offset, {"')'"}, cur_.text);
            return e;
        }
        throw ParseError(cur_.offset, kAtomExpected, cur_.text);
    }

    Expr apply_function(const Token& id, std::vector<Expr> args,
                        const std::vector<std::size_t>& arg_offsets) {
        const std::string& name = id.text;
        if (name == "integral") {
            if (args.size() != 3 && args.size() != 4)
                throw ParseError(id.offset, {"integral(f, var, [lower,] upper)"},
                                 std::to_string(args.size()) + " arguments");
            if (args[1].kind() != Kind::Symbol)
                throw ParseError(arg_offsets[1], {"variable name"}, "expression");
            if (args.size() == 3) return raw_integral(args[0], args[1].name(), std::nullopt, args[2]);
            return raw_integral(args[0], args[1].name(), args[2], args[3]);
        }
        for (const auto& f : kKnownFunctions) {
            if (name != f) continue;
            if (args.size() != 1)
                throw ParseError(id.offset, {name + "(arg)"},
                                 std::to_string(args.size()) + " arguments");
            return raw_fun(name, {args[0]});
        }
        throw ParseError(id.offset, kKnownFunctions, "'" + name + "'");
    }

    Lexer lexer_;
    Token cur_;
};

}  // namespace

ParseError::ParseError(std::size_t offset, std::vector<std::string> expected, std::string found)
    : std::runtime_error(format_message(offset, expected, found)),
      offset_(offset),
      expected_(std::move(expected)),
      found_(std::move(found)) {}

Expr parse(const std::string& source) { return normalize(Parser(source).run()); }

}  // namespace jlm
