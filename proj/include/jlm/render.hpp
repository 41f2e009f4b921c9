#pragma once

#include <string>

#include "jlm/expr.hpp"

namespace jlm {

/// Deterministic text form; parse(render(e)) reproduces normalize(e).
std::string render(const Expr& e);

}  // namespace jlm
