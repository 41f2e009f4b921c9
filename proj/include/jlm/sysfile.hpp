#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "jlm/system.hpp"

namespace jlm {

// Error in the content of a system-definition file (syntax, unknown key,
// unparseable expression, inconsistent counts).
class FormatError : public std::runtime_error {
public:
    FormatError(std::string msg, int line = 0)
        : std::runtime_error(std::move(msg)), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

// Failure to read or write a file at all.
class IoError : public std::runtime_error {
public:
    explicit IoError(std::string msg) : std::runtime_error(std::move(msg)) {}
};

// A parsed system-definition file.  All expression-valued fields are kept as
// source text here; build_system() parses them.
//
// Format: line-based "key = value" pairs.  Values are quoted strings, arrays
// of quoted strings, or the bare tokens true/false.  '#' starts a comment.
// A "[section]" line prefixes following keys with "section." (used for
// [expected]).  Recognized keys:
//   name, description, time, states, parameters, equations, force,
//   domain.<var>, exclude, A_<i>_<j>, initial, t0, tspan, drift_span,
//   doc_only, expected.<what>
struct SystemFile {
    std::string name;
    std::string description;
    std::string time = "t";
    std::vector<std::string> states;
    std::vector<ParamDecl> parameters;
    std::vector<std::string> equations;
    std::optional<std::string> force;  // mechanical shorthand: states become x, v
    std::map<std::string, std::string> intervals;  // var -> raw "(lo, hi)" text
    std::vector<std::string> exclude;
    std::map<std::pair<int, int>, std::string> alpha;  // upper-triangle A entries
    std::map<std::string, std::string> expected;
    std::vector<std::string> initial;
    std::optional<std::string> t0;
    std::optional<std::string> tspan;
    std::optional<std::string> drift_span;
    bool doc_only = false;
    std::string origin = "<memory>";
};

SystemFile parse_system_file(const std::string& text, const std::string& origin = "<memory>");
SystemFile load_system_file(const std::string& path);

// Parse an expression string that must reduce to a numeric constant.
double number_of(const std::string& text);

// Instantiate the dynamical system described by the file.  Throws FormatError
// when expressions fail to parse or counts are inconsistent.
FirstOrderSystem build_system(const SystemFile& sf);

}  // namespace jlm
