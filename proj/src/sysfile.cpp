#include "jlm/sysfile.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "jlm/eval.hpp"
#include "jlm/parser.hpp"
#include "jlm/simplify.hpp"

namespace jlm {
namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

// Strip a trailing comment, honouring double quotes.
std::string strip_comment(const std::string& line) {
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') quoted = !quoted;
        else if (line[i] == '#' && !quoted) return line.substr(0, i);
    }
    return line;
}

struct Value {
    bool is_array = false;
    std::string scalar;               // unquoted content, or bare token
    bool was_quoted = false;
    std::vector<std::string> items;   // quoted array items
};

[[noreturn]] void fail(const std::string& origin, int line, const std::string& msg) {
    std::ostringstream os;
    os << origin << ":" << line << ": " << msg;
    throw FormatError(os.str(), line);
}

Value parse_value(const std::string& raw, const std::string& origin, int line) {
    Value v;
    std::string s = trim(raw);
    if (s.empty()) fail(origin, line, "missing value");
    if (s.front() == '[') {
        if (s.back() != ']') fail(origin, line, "unterminated array");
        v.is_array = true;
        std::string body = s.substr(1, s.size() - 2);
        std::size_t i = 0;
        while (true) {
            while (i < body.size() && (std::isspace(static_cast<unsigned char>(body[i])) || body[i] == ',')) ++i;
            if (i >= body.size()) break;
            if (body[i] != '"') fail(origin, line, "array items must be quoted strings");
            std::size_t close = body.find('"', i + 1);
            if (close == std::string::npos) fail(origin, line, "unterminated string in array");
            v.items.push_back(body.substr(i + 1, close - i - 1));
            i = close + 1;
        }
        return v;
    }
    if (s.front() == '"') {
        if (s.size() < 2 || s.back() != '"') fail(origin, line, "unterminated string");
        v.scalar = s.substr(1, s.size() - 2);
        v.was_quoted = true;
        return v;
    }
    v.scalar = s;  // bare token: true/false or a number
    return v;
}

ParamDecl parse_param(const std::string& text, const std::string& origin, int line) {
    ParamDecl p;
    auto eq = text.find('=');
    if (eq == std::string::npos) {
        p.name = trim(text);
    } else {
        p.name = trim(text.substr(0, eq));
        std::string val = trim(text.substr(eq + 1));
        Expr e;
        try {
            e = simplify(parse(val));
        } catch (const ParseError& pe) {
            fail(origin, line, "bad parameter value '" + val + "': " + pe.what());
        }
        if (!e.is_number()) fail(origin, line, "parameter value '" + val + "' is not a constant");
        p.value = e.value();
    }
    if (p.name.empty()) fail(origin, line, "empty parameter name");
    return p;
}

double interval_end(const std::string& tok, const std::string& origin, int line) {
    std::string s = trim(tok);
    if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    try {
        return evaluate(parse(s), {});
    } catch (const std::exception& e) {
        fail(origin, line, "bad interval endpoint '" + s + "': " + e.what());
    }
}

std::pair<double, double> parse_interval(const std::string& text, const std::string& origin,
                                         int line) {
    std::string s = trim(text);
    if (s.size() < 2 || s.front() != '(' || s.back() != ')')
        fail(origin, line, "interval must look like \"(lo, hi)\"");
    std::string body = s.substr(1, s.size() - 2);
    auto comma = body.find(',');
    if (comma == std::string::npos) fail(origin, line, "interval needs two endpoints");
    double lo = interval_end(body.substr(0, comma), origin, line);
    double hi = interval_end(body.substr(comma + 1), origin, line);
    if (!(lo < hi)) fail(origin, line, "empty interval");
    return {lo, hi};
}

bool parse_alpha_key(const std::string& key, int& i, int& j) {
    // A_<i>_<j>
    if (key.size() < 5 || key.compare(0, 2, "A_") != 0) return false;
    auto second = key.find('_', 2);
    if (second == std::string::npos) return false;
    std::string a = key.substr(2, second - 2), b = key.substr(second + 1);
    if (a.empty() || b.empty()) return false;
    for (char c : a)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    for (char c : b)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    i = std::stoi(a);
    j = std::stoi(b);
    return true;
}

}  // namespace

SystemFile parse_system_file(const std::string& text, const std::string& origin) {
    SystemFile sf;
    sf.origin = origin;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int lineno = 0;
    bool named = false;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = trim(strip_comment(raw));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail(origin, lineno, "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) fail(origin, lineno, "empty section name");
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos) fail(origin, lineno, "expected key = value");
        std::string key = trim(line.substr(0, eq));
        if (!section.empty()) key = section + "." + key;
        Value v = parse_value(line.substr(eq + 1), origin, lineno);

        auto scalar = [&]() -> const std::string& {
            if (v.is_array) fail(origin, lineno, "key '" + key + "' takes a single value");
            return v.scalar;
        };
        auto array = [&]() -> const std::vector<std::string>& {
            if (!v.is_array) fail(origin, lineno, "key '" + key + "' takes an array");
            return v.items;
        };

        int ai = 0, aj = 0;
        if (key == "name") {
            sf.name = scalar();
            named = true;
        } else if (key == "description") {
            sf.description = scalar();
        } else if (key == "time") {
            sf.time = scalar();
        } else if (key == "states") {
            sf.states = array();
        } else if (key == "parameters") {
            for (const auto& item : array()) sf.parameters.push_back(parse_param(item, origin, lineno));
        } else if (key == "equations") {
            sf.equations = array();
        } else if (key == "force") {
            sf.force = scalar();
        } else if (key == "exclude") {
            sf.exclude = array();
        } else if (key == "initial") {
            sf.initial = array();
        } else if (key == "t0") {
            sf.t0 = scalar();
        } else if (key == "tspan") {
            sf.tspan = scalar();
        } else if (key == "drift_span") {
            sf.drift_span = scalar();
        } else if (key == "doc_only") {
            const std::string& s = scalar();
            if (s != "true" && s != "false") fail(origin, lineno, "doc_only must be true or false");
            sf.doc_only = (s == "true");
        } else if (key.compare(0, 7, "domain.") == 0) {
            std::string var = key.substr(7);
            if (var.empty()) fail(origin, lineno, "domain key needs a variable name");
            parse_interval(scalar(), origin, lineno);  // syntax check with a line number
            sf.intervals[var] = scalar();              // raw "(lo, hi)" text
        } else if (key.compare(0, 9, "expected.") == 0) {
            std::string what = key.substr(9);
            if (what.empty()) fail(origin, lineno, "expected key needs a field name");
            sf.expected[what] = scalar();
        } else if (parse_alpha_key(key, ai, aj)) {
            if (ai <= 0 || aj <= 0 || ai >= aj)
                fail(origin, lineno, "A entries must be upper-triangle with 1-based indices");
            sf.alpha[{ai, aj}] = scalar();
        } else {
            fail(origin, lineno, "unknown key '" + key + "'");
        }
    }
    if (!named) throw FormatError(origin + ": missing required key 'name'");
    return sf;
}

SystemFile load_system_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoError("error while reading '" + path + "'");
    return parse_system_file(buf.str(), path);
}

double number_of(const std::string& text) {
    try {
        return evaluate(parse(text), {});
    } catch (const std::exception& e) {
        throw FormatError("'" + text + "' is not a numeric constant: " + std::string(e.what()));
    }
}

FirstOrderSystem build_system(const SystemFile& sf) {
    auto parse_field = [&](const std::string& what, const std::string& text) -> Expr {
        try {
            return parse(text);
        } catch (const ParseError& pe) {
            throw FormatError(sf.origin + ": bad expression for " + what + " ('" + text +
                              "'): " + pe.what());
        }
    };

    Domain dom;
    for (const auto& [var, iv] : sf.intervals) {
        std::string s = trim(iv);
        if (s.size() < 2 || s.front() != '(' || s.back() != ')')
            throw FormatError(sf.origin + ": interval for " + var + " must look like (lo, hi)");
        std::string body = s.substr(1, s.size() - 2);
        auto comma = body.find(',');
        if (comma == std::string::npos)
            throw FormatError(sf.origin + ": interval for " + var + " needs two endpoints");
        auto endpoint = [&](const std::string& tok) -> double {
            std::string e = trim(tok);
            if (e == "inf" || e == "+inf") return std::numeric_limits<double>::infinity();
            if (e == "-inf") return -std::numeric_limits<double>::infinity();
            return number_of(e);
        };
        double lo = endpoint(body.substr(0, comma));
        double hi = endpoint(body.substr(comma + 1));
        if (!(lo < hi)) throw FormatError(sf.origin + ": empty interval for " + var);
        dom.set_interval(var, lo, hi);
    }
    for (const auto& e : sf.exclude) dom.exclude(parse_field("exclude", e));

    if (sf.force) {
        if (!sf.equations.empty())
            throw FormatError(sf.origin + ": give either 'force' or 'equations', not both");
        MechanicalSystem m;
        m.force = parse_field("force", *sf.force);
        m.params = sf.parameters;
        m.domain = dom;
        m.time = sf.time;
        if (sf.states.size() == 2) {
            m.coord = sf.states[0];
            m.vel = sf.states[1];
        } else if (!sf.states.empty()) {
            throw FormatError(sf.origin + ": mechanical shorthand takes exactly two states");
        }
        try {
            return lift(m);
        } catch (const std::invalid_argument& e) {
            throw FormatError(sf.origin + ": " + e.what());
        }
    }

    if (sf.states.empty()) throw FormatError(sf.origin + ": no states declared");
    if (sf.equations.size() != sf.states.size()) {
        std::ostringstream os;
        os << sf.origin << ": " << sf.states.size() << " states but " << sf.equations.size()
           << " equations";
        throw FormatError(os.str());
    }
    std::vector<Expr> vel;
    for (std::size_t i = 0; i < sf.equations.size(); ++i)
        vel.push_back(parse_field("d" + sf.states[i] + "/dt", sf.equations[i]));
    try {
        return FirstOrderSystem(sf.time, sf.states, vel, sf.parameters, dom);
    } catch (const std::invalid_argument& e) {
        throw FormatError(sf.origin + ": " + e.what());
    }
}

}  // namespace jlm
