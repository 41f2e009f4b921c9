#include "jlm/system.hpp"

#include <stdexcept>

#include "jlm/calculus.hpp"
#include "jlm/simplify.hpp"

namespace jlm {

FirstOrderSystem::FirstOrderSystem(std::string time, std::vector<std::string> states,
                                   std::vector<Expr> velocity, std::vector<ParamDecl> params,
                                   Domain domain)
    : time_(std::move(time)),
      states_(std::move(states)),
      velocity_(std::move(velocity)),
      params_(std::move(params)),
      domain_(std::move(domain)) {
    if (states_.empty()) throw std::invalid_argument("system needs at least one state");
    if (velocity_.size() != states_.size())
        throw std::invalid_argument("need exactly one equation per state");

    std::set<std::string> allowed{time_};
    for (const auto& s : states_) {
        if (!allowed.insert(s).second)
            throw std::invalid_argument("duplicate variable name '" + s + "'");
    }
    for (const auto& p : params_) {
        if (!allowed.insert(p.name).second)
            throw std::invalid_argument("duplicate variable name '" + p.name + "'");
    }
    for (std::size_t i = 0; i < velocity_.size(); ++i) {
        velocity_[i] = simplify(velocity_[i]);
        for (const auto& s : free_symbols(velocity_[i]))
            if (!allowed.count(s))
                throw std::invalid_argument("equation for '" + states_[i] +
                                            "' uses undeclared symbol '" + s + "'");
    }
    for (const auto& p : params_) {
        if (p.value)
            domain_.pin(p.name, p.value->to_double());
        else if (!domain_.has_interval(p.name) && !domain_.pinned(p.name))
            domain_.set_interval(p.name, 0.0, 2.0);
    }
}

int FirstOrderSystem::state_index(const std::string& name) const {
    for (std::size_t i = 0; i < states_.size(); ++i)
        if (states_[i] == name) return static_cast<int>(i);
    return -1;
}

std::vector<std::string> FirstOrderSystem::all_symbols() const {
    std::vector<std::string> out{time_};
    out.insert(out.end(), states_.begin(), states_.end());
    for (const auto& p : params_) out.push_back(p.name);
    return out;
}

bool FirstOrderSystem::is_lifted_mechanical() const {
    return states_.size() == 2 && velocity_[0].is_symbol(states_[1]);
}

FirstOrderSystem lift(const MechanicalSystem& m) {
    return FirstOrderSystem(m.time, {m.coord, m.vel}, {sym(m.vel), m.force}, m.params, m.domain);
}

Expr divergence(const FirstOrderSystem& sys) {
    Expr d = num(0);
    for (std::size_t i = 0; i < sys.dim(); ++i)
        d = d + differentiate(sys.velocity(i), sys.states()[i]);
    return simplify(d);
}

Expr gamma_apply(const FirstOrderSystem& sys, const Expr& f) {
    Expr g = differentiate(f, sys.time());
    for (std::size_t i = 0; i < sys.dim(); ++i)
        g = g + sys.velocity(i) * differentiate(f, sys.states()[i]);
    return simplify(g);
}

}  // namespace jlm
