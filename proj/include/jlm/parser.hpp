#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "jlm/expr.hpp"

namespace jlm {

/// Syntax error carrying the byte offset and the token set that would have
/// been accepted at that position.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t offset, std::vector<std::string> expected, std::string found);
    std::size_t offset() const { return offset_; }
    const std::vector<std::string>& expected() const { return expected_; }
    const std::string& found() const { return found_; }

private:
    std::size_t offset_;
    std::vector<std::string> expected_;
    std::string found_;
};

/// Grammar:
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := unary ('^' factor)?
///   unary  := '-' unary | atom
///   atom   := NUMBER | IDENT | IDENT '(' expr (',' expr)* ')' | '(' expr ')'
/// Reserved functions: exp, log, sin, cos, sqrt, and integral(f, z, [lo,] hi).
/// Returns a normalized expression.
Expr parse(const std::string& source);

}  // namespace jlm
