#include "jlm/catalog.hpp"

#include <stdexcept>

namespace jlm {
namespace {

const char* kFreeForce = R"__(
name = "free-force"
description = "Free particle: zero velocity-independent force, so every constant is a multiplier."
force = "0"
initial = ["0", "1"]
tspan = "1"
[expected]
multiplier = "1"
m_x = "-v"
h = "v^2/2"
q = "x"
p = "v"
hamiltonian = "p^2/2"
)__";

const char* kVelocityIndependent = R"__(
name = "velocity-independent-force"
description = "Template family F = F(t,x) with unit multiplier; instance F = -sin(t)*x."
force = "-sin(t)*x"
initial = ["1", "0"]
tspan = "1"
[expected]
multiplier = "1"
m_x = "-v"
h = "v^2/2 + sin(t)*x^2/2"
q = "x"
p = "v"
hamiltonian = "p^2/2 + sin(t)*q^2/2"
)__";

const char* kDampedOscillator = R"__(
name = "damped-oscillator"
description = "Damped harmonic oscillator F = -omega^2*x - 2*b*v; time-exponential multiplier and the Bateman-Caldirola Hamiltonian."
force = "-(omega^2)*x - 2*b*v"
parameters = ["b = 1/10", "omega = 1"]
initial = ["1", "0"]
tspan = "1"
drift_span = "5"
[expected]
multiplier = "exp(2*b*t)"
m_x = "-exp(2*b*t)*v"
h = "exp(2*b*t)*(v^2 + omega^2*x^2)/2"
q = "x"
p = "exp(2*b*t)*v"
hamiltonian = "(p^2*exp(-2*b*t) + omega^2*exp(2*b*t)*q^2)/2"
)__";

const char* kDampedOscillator3d = R"__(
name = "damped-oscillator-3d-note"
description = "Three-dimensional isotropic damped oscillator: three independent copies of the one-dimensional damped oscillator (its normal modes), each carrying the multiplier exp(2*b*t); the Lagrangian is the sum of the three one-dimensional ones. Run the damped-oscillator entry per component."
doc_only = true
)__";

const char* kLaneEmden = R"__(
name = "lane-emden"
description = "Polytropic hydrostatic equilibrium: x'' + (2/t)*x' + x^n = 0."
force = "-(2/t)*v - x^n"
parameters = ["n = 3"]
domain.t = "(0, inf)"
domain.x = "(0, inf)"
t0 = "1/2"
initial = ["1", "0"]
tspan = "1"
[expected]
multiplier = "t^2"
m_x = "-(t^2)*v"
h = "t^2*(v^2/2 + x^(n+1)/(n+1))"
q = "x"
p = "t^2*v"
hamiltonian = "p^2/(2*t^2) + t^2*q^(n+1)/(n+1)"
)__";

const char* kEmdenGeneral = R"__(
name = "emden-general"
description = "Template family x'' + a(t)*x' + b(t)*x^n = 0; instance the Bessel equation x'' + (1/t)*x' + (1 - nu^2/t^2)*x = 0."
force = "-(1/t)*v - (1 - nu^2/t^2)*x"
parameters = ["nu = 1/2"]
domain.t = "(0, inf)"
t0 = "1"
initial = ["1", "0"]
tspan = "1"
[expected]
multiplier = "t"
m_x = "-t*v"
h = "t*v^2/2 + (t - nu^2/t)*x^2/2"
q = "x"
p = "t*v"
hamiltonian = "p^2/(2*t) + (t - nu^2/t)*q^2/2"
)__";

const char* kBuchdahl = R"__(
name = "buchdahl"
description = "x'' = 3*x'^2/x + x'/t (general relativity); velocity-quadratic force with phi = log(t*x^6)."
force = "3*v^2/x + v/t"
domain.t = "(0, inf)"
domain.x = "(0, inf)"
t0 = "1"
initial = ["1", "1/10"]
tspan = "1"
[expected]
multiplier = "1/(t*x^6)"
m_x = "-v/(t*x^6)"
h = "v^2/(2*t*x^6)"
q = "x"
p = "v/(t*x^6)"
hamiltonian = "p^2*t*q^6/2"
)__";

const char* kQuadraticVForce = R"__(
name = "quadratic-v-force"
description = "Template family F = A(t,x) + B(t,x)*v + C(t,x)*v^2 with B dt + 2*C dx exact; instance F = x^5 + 2*v + (2/x)*v^2, phi = 2*t + 4*log(x)."
force = "x^5 + 2*v + (2/x)*v^2"
domain.x = "(0, inf)"
initial = ["1/2", "0"]
tspan = "1/2"
[expected]
multiplier = "exp(-2*t)/x^4"
m_x = "-exp(-2*t)*v/x^4"
h = "exp(-2*t)*(v^2/(2*x^4) - x^2/2)"
q = "x"
p = "exp(-2*t)*v/x^4"
hamiltonian = "exp(2*t)*p^2*q^4/2 - exp(-2*t)*q^2/2"
)__";

const char* kGeneralizedLv = R"__(
name = "generalized-lv"
description = "Two-species quadratic growth model x' = x*(A + B*x + C*y), y' = y*(K + M*x + N*y) at A=1, B=2, C=1, K=1, M=1, N=2 (so B*N - C*M is nonzero); monomial-exponential multiplier."
states = ["x", "y"]
equations = ["x*(1 + 2*x + y)", "y*(1 + x + 2*y)"]
domain.x = "(0, inf)"
domain.y = "(0, inf)"
initial = ["1/2", "1/2"]
tspan = "1/4"
[expected]
multiplier = "exp(4*t/3)*x^(-5/3)*y^(-5/3)"
m_x = "(3/2)*exp(4*t/3)*x^(-5/3)*y^(-2/3)"
h = "-(3/2)*exp(4*t/3)*x^(-2/3)*y^(-2/3)*(1 + 2*x - 2*y)"
)__";

const char* kClassicalLv = R"__(
name = "classical-lv"
description = "Predator-prey system with exponential growth: x' = x*(A + C*y), y' = y*(K + M*x); conserved Lagrangian energy."
states = ["x", "y"]
parameters = ["A = 1", "C = -1", "K = -1", "M = 1"]
equations = ["x*(A + C*y)", "y*(K + M*x)"]
domain.x = "(0, inf)"
domain.y = "(0, inf)"
initial = ["2", "1"]
tspan = "1"
drift_span = "5"
[expected]
multiplier = "1/(x*y)"
m_x = "-log(y)/x"
h = "-K*log(x) - M*x + A*log(y) + C*y"
q = "x"
p = "log(y)/x"
hamiltonian = "-K*log(q) - M*q + A*p*q + C*exp(p*q)"
first_integral = "K*log(x) + M*x - A*log(y) - C*y"
)__";

const char* kHostParasite = R"__(
name = "host-parasite"
description = "Host-parasite model x' = x*(A - B*y), y' = y*(C - D*y/x)."
states = ["x", "y"]
parameters = ["A = 1", "B = 1", "C = 1", "D = 1"]
equations = ["x*(A - B*y)", "y*(C - D*y/x)"]
domain.x = "(0, inf)"
domain.y = "(0, inf)"
initial = ["1", "1/2"]
tspan = "1"
[expected]
multiplier = "exp(C*t)/(x*y^2)"
m_x = "exp(C*t)/(x*y)"
h = "-exp(C*t)*(D/x + A/y + B*log(y))"
q = "x"
p = "-exp(C*t)/(x*y)"
hamiltonian = "exp(C*t)*(-D/q + A*exp(-C*t)*p*q - B*C*t + B*log(-p*q))"
)__";

const char* kHojmanUrrutia = R"__(
name = "hojman-urrutia"
description = "First-order form of x'' = -y', y'' = -y, which admits no standard second-order Lagrangian; constant skew coefficients are solved for and two non-gauge-equivalent Lagrangians are produced."
states = ["x1", "x2", "x3", "x4"]
equations = ["x3", "x4", "-x4", "-x2"]
initial = ["1", "1", "0", "0"]
tspan = "1"
[expected]
dimension = "2"
m_1 = "x2 + x3"
m_2 = "0"
m_3 = "0"
m_4 = "-x3"
h = "(x4^2 - x3^2 - 2*x2*x3)/2"
)__";

const char* kCubicPair = R"__(
name = "cubic-pair"
description = "Coupled pair x'' = y^2, y'' = x^2 as a first-order system in (x1, x2, x3, x4) with supplied constant skew coefficients."
states = ["x1", "x2", "x3", "x4"]
equations = ["x3", "x4", "x2^2", "x1^2"]
A_1_4 = "-1"
A_2_3 = "-1"
initial = ["1/2", "1/2", "0", "0"]
tspan = "1"
[expected]
m_1 = "x4"
m_2 = "x3"
m_3 = "0"
m_4 = "0"
h = "(x1^3 + x2^3)/3 - x3*x4"
first_integral = "(x1^3 + x2^3)/3 - x3*x4"
)__";

const char* kLv4d = R"__(
name = "lv-4d"
description = "Four-species cyclic Lotka-Volterra system with supplied skew coefficients A_12 = 1/(x1*x2), A_14 = a/(x1*x4), A_34 = 1/(x3*x4)."
states = ["x1", "x2", "x3", "x4"]
parameters = ["a = 1/2"]
equations = ["x1*(-1 + x2)", "x2*(1 - x1 + a*x3)", "x3*(-1 - a*x2 + x4)", "x4*(1 - x3)"]
domain.x1 = "(0, inf)"
domain.x2 = "(0, inf)"
domain.x3 = "(0, inf)"
domain.x4 = "(0, inf)"
A_1_2 = "1/(x1*x2)"
A_1_4 = "a/(x1*x4)"
A_3_4 = "1/(x3*x4)"
initial = ["1", "1", "1", "1"]
tspan = "1"
[expected]
m_1 = "0"
m_2 = "log(x1)/x2"
m_3 = "-log(x4)/x3"
m_4 = "a*log(x1)/x4"
h = "x1 + x2 + x3 + x4 - (1 + a)*log(x1) - log(x2) - log(x3) - (1 + a)*log(x4)"
first_integral = "x1 + x2 + x3 + x4 - (1 + a)*log(x1) - log(x2) - log(x3) - (1 + a)*log(x4)"
)__";

}  // namespace

const std::vector<CatalogEntry>& catalog() {
    static const std::vector<CatalogEntry> entries = {
        {"free-force", kFreeForce},
        {"velocity-independent-force", kVelocityIndependent},
        {"damped-oscillator", kDampedOscillator},
        {"damped-oscillator-3d-note", kDampedOscillator3d},
        {"lane-emden", kLaneEmden},
        {"emden-general", kEmdenGeneral},
        {"buchdahl", kBuchdahl},
        {"quadratic-v-force", kQuadraticVForce},
        {"generalized-lv", kGeneralizedLv},
        {"classical-lv", kClassicalLv},
        {"host-parasite", kHostParasite},
        {"hojman-urrutia", kHojmanUrrutia},
        {"cubic-pair", kCubicPair},
        {"lv-4d", kLv4d},
    };
    return entries;
}

const CatalogEntry* catalog_find(const std::string& name) {
    for (const auto& e : catalog())
        if (e.name == name) return &e;
    return nullptr;
}

SystemFile catalog_load(const std::string& name) {
    const CatalogEntry* e = catalog_find(name);
    if (!e) throw std::out_of_range("no catalog entry named '" + name + "'");
    return parse_system_file(e->text, "catalog:" + name);
}

}  // namespace jlm
