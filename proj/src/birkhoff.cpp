#include "jlm/birkhoff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "jlm/calculus.hpp"
#include "jlm/eval.hpp"
#include "jlm/simplify.hpp"

namespace jlm {
namespace {

double det_double(std::vector<std::vector<double>> a) {
    const std::size_t n = a.size();
    double det = 1;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
        if (a[piv][c] == 0) return 0;
        if (piv != c) {
            std::swap(a[piv], a[c]);
            det = -det;
        }
        det *= a[c][c];
        for (std::size_t r = c + 1; r < n; ++r) {
            double f = a[r][c] / a[c][c];
            for (std::size_t j = c; j < n; ++j) a[r][j] -= f * a[c][j];
        }
    }
    return det;
}

QMat from_vector(const QVec& v, std::size_t n) {
    QMat a(n, QVec(n, Rational(0)));
    std::size_t idx = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j, ++idx) {
            a[i][j] = v[idx];
            a[j][i] = Rational(0) - v[idx];
        }
    return a;
}

QVec to_vector(const QMat& a) {
    const std::size_t n = a.size();
    QVec v;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) v.push_back(a[i][j]);
    return v;
}

}  // namespace

BirkhoffData::BirkhoffData(std::size_t n, std::map<std::pair<int, int>, Expr> upper)
    : n_(n), upper_(std::move(upper)) {
    for (auto& [key, e] : upper_) {
        if (key.first < 0 || key.second <= key.first || key.second >= static_cast<int>(n_))
            throw std::invalid_argument("two-form entry index out of range");
        e = simplify(e);
    }
}

Expr BirkhoffData::a(int i, int j) const {
    if (i == j) return num(0);
    bool flip = i > j;
    if (flip) std::swap(i, j);
    auto it = upper_.find({i, j});
    if (it == upper_.end()) return num(0);
    return flip ? simplify(num(0) - it->second) : it->second;
}

std::vector<Expr> BirkhoffData::b(const FirstOrderSystem& sys) const {
    std::vector<Expr> out;
    for (std::size_t j = 0; j < n_; ++j) {
        Expr s = num(0);
        for (std::size_t i = 0; i < n_; ++i) s = s + a(static_cast<int>(j), static_cast<int>(i)) * sys.velocity(i);
        out.push_back(simplify(s));
    }
    return out;
}

BirkhoffData birkhoff_from_matrix(const QMat& a) {
    const std::size_t n = a.size();
    std::map<std::pair<int, int>, Expr> upper;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (!a[i][j].is_zero()) upper[{static_cast<int>(i), static_cast<int>(j)}] = num(a[i][j]);
    return BirkhoffData(n, std::move(upper));
}

AlphaCheck verify_alpha(const FirstOrderSystem& sys, const BirkhoffData& bd,
                        const EquivOptions& opts) {
    const std::size_t n = sys.dim();
    AlphaCheck out;
    if (bd.dim() != n) {
        out.failures.push_back("two-form dimension does not match the system");
        return out;
    }
    const auto& st = sys.states();
    Domain d = sys.domain();

    EquivResult all{true, CheckMode::Symbolic, 0.0};
    auto check_zero = [&](const Expr& e, const std::string& what) {
        EquivResult r;
        try {
            r = equivalent(e, num(0), d, opts);
        } catch (const SamplingError& err) {
            r.equal = false;
            out.failures.push_back(what + ": " + err.what());
            all.equal = false;
            return;
        }
        if (!r.equal) out.failures.push_back(what + " does not vanish");
        all = EquivResult{all.equal && r.equal,
                          (all.mode == CheckMode::Numeric || r.mode == CheckMode::Numeric)
                              ? CheckMode::Numeric
                              : CheckMode::Symbolic,
                          std::max(all.max_deviation, r.max_deviation)};
    };

    // transport of A along the flow
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            Expr r = differentiate(bd.a(i, j), sys.time());
            for (std::size_t k = 0; k < n; ++k) {
                r = r + sys.velocity(k) * differentiate(bd.a(i, j), st[k]) +
                    bd.a(k, j) * differentiate(sys.velocity(k), st[i]) +
                    bd.a(i, k) * differentiate(sys.velocity(k), st[j]);
            }
            check_zero(simplify(r), "transport residual (" + std::to_string(i + 1) + "," +
                                        std::to_string(j + 1) + ")");
        }
    }

    // closedness: spatial and mixed components of d(alpha)
    std::vector<Expr> bvec = bd.b(sys);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            for (std::size_t k = j + 1; k < n; ++k)
                check_zero(simplify(differentiate(bd.a(j, k), st[i]) -
                                    differentiate(bd.a(i, k), st[j]) +
                                    differentiate(bd.a(i, j), st[k])),
                           "closedness (d alpha) component (" + std::to_string(i + 1) + "," +
                               std::to_string(j + 1) + "," + std::to_string(k + 1) + ")");
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            check_zero(simplify(differentiate(bd.a(i, j), sys.time()) +
                                differentiate(bvec[i], st[j]) - differentiate(bvec[j], st[i])),
                       "closedness (mixed) component (" + std::to_string(i + 1) + "," +
                           std::to_string(j + 1) + ")");

    // sampled nondegeneracy
    std::set<std::string> syms;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            for (const auto& s : free_symbols(bd.a(i, j))) syms.insert(s);
    for (const auto& s : sys.all_symbols()) syms.insert(s);
    std::vector<std::string> symv(syms.begin(), syms.end());
    Rng rng(opts.seed);
    out.min_det = std::numeric_limits<double>::infinity();
    int collected = 0, rejected = 0;
    while (collected < opts.points) {
        auto pt = d.sample(symv, rng);
        std::vector<std::vector<double>> av(n, std::vector<double>(n, 0.0));
        bool good = true;
        for (std::size_t i = 0; i < n && good; ++i)
            for (std::size_t j = 0; j < n && good; ++j) {
                try {
                    av[i][j] = evaluate(bd.a(i, j), pt);
                } catch (const EvalError&) {
                    good = false;
                }
            }
        if (!good) {
            if (++rejected >= 1000) {
                out.failures.push_back("nondegeneracy: could not sample the matrix");
                all.equal = false;
                break;
            }
            continue;
        }
        rejected = 0;
        ++collected;
        out.min_det = std::min(out.min_det, std::abs(det_double(av)));
    }
    if (collected == opts.points && out.min_det < 1e-10) {
        out.failures.push_back("matrix A is degenerate on the sampled domain");
        all.equal = false;
    }

    out.ok = all.equal;
    out.mode = all.mode;
    out.max_deviation = all.max_deviation;
    return out;
}

ConstantAlphaResult solve_constant_alpha(const FirstOrderSystem& sys) {
    const std::size_t n = sys.dim();
    const auto& st = sys.states();
    QMat jac(n, QVec(n, Rational(0)));
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            Expr d = differentiate(sys.velocity(k), st[i]);
            if (!d.is_number())
                throw std::invalid_argument(
                    "constant two-form search needs an affine velocity field with "
                    "constant coefficients");
            jac[k][i] = d.value();
        }
    }

    const std::size_t m = n * (n - 1) / 2;
    auto pair_index = [&](std::size_t i, std::size_t j) {
        // i < j
        std::size_t idx = 0;
        for (std::size_t a = 0; a < i; ++a) idx += n - 1 - a;
        return idx + (j - i - 1);
    };
    auto signed_coeff = [&](std::size_t a, std::size_t b) -> std::pair<std::size_t, int> {
        if (a < b) return {pair_index(a, b), 1};
        return {pair_index(b, a), -1};
    };

    QMat rows;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            QVec row(m, Rational(0));
            for (std::size_t k = 0; k < n; ++k) {
                if (k != j && !jac[k][i].is_zero()) {
                    auto [idx, s] = signed_coeff(k, j);
                    row[idx] = row[idx] + Rational(s) * jac[k][i];
                }
                if (k != i && !jac[k][j].is_zero()) {
                    auto [idx, s] = signed_coeff(i, k);
                    row[idx] = row[idx] + Rational(s) * jac[k][j];
                }
            }
            rows.push_back(std::move(row));
        }
    }

    LinearSolution sol = solve_linear(rows, QVec(rows.size(), Rational(0)));
    ConstantAlphaResult out;
    for (const auto& v : sol.nullspace) out.basis.push_back(from_vector(v, n));
    out.dimension = out.basis.size();
    auto members = nondegenerate_members(out, 1);
    if (!members.empty()) out.chosen = members.front();
    return out;
}

std::vector<QMat> nondegenerate_members(const ConstantAlphaResult& r, std::size_t count) {
    std::vector<QMat> chosen;
    if (r.basis.empty()) return chosen;
    const std::size_t nb = r.basis.size();
    std::vector<QVec> chosen_coords;

    auto independent = [&](const QVec& coords) {
        QMat rows = chosen_coords;
        rows.push_back(coords);
        // rank check via RREF on the small coordinate matrix
        QMat a = rows;
        std::size_t rank = 0;
        for (std::size_t c = 0; c < nb && rank < a.size(); ++c) {
            std::size_t piv = rank;
            while (piv < a.size() && a[piv][c].is_zero()) ++piv;
            if (piv == a.size()) continue;
            std::swap(a[piv], a[rank]);
            Rational inv = Rational(1) / a[rank][c];
            for (std::size_t j = 0; j < nb; ++j) a[rank][j] = a[rank][j] * inv;
            for (std::size_t q = 0; q < a.size(); ++q) {
                if (q == rank || a[q][c].is_zero()) continue;
                Rational f = a[q][c];
                for (std::size_t j = 0; j < nb; ++j) a[q][j] = a[q][j] - f * a[rank][j];
            }
            ++rank;
        }
        return rank == rows.size();
    };

    auto consider = [&](const QVec& coords) {
        if (chosen.size() >= count) return;
        QVec vec(r.basis.empty() ? 0 : to_vector(r.basis[0]).size(), Rational(0));
        for (std::size_t b = 0; b < nb; ++b) {
            if (coords[b].is_zero()) continue;
            QVec bv = to_vector(r.basis[b]);
            for (std::size_t k = 0; k < vec.size(); ++k) vec[k] = vec[k] + coords[b] * bv[k];
        }
        QMat cand = from_vector(vec, r.basis[0].size());
        if (determinant(cand).is_zero()) return;
        if (!independent(coords)) return;
        chosen.push_back(cand);
        chosen_coords.push_back(coords);
    };

    for (std::size_t b = 0; b < nb; ++b) {
        QVec c(nb, Rational(0));
        c[b] = Rational(1);
        consider(c);
    }
    for (std::size_t a = 0; a < nb; ++a) {
        for (std::size_t b = a + 1; b < nb; ++b) {
            for (int s : {1, -1}) {
                QVec c(nb, Rational(0));
                c[a] = Rational(1);
                c[b] = Rational(s);
                consider(c);
            }
        }
    }
    Rng rng(kDefaultSeed);
    for (int tries = 0; tries < 200 && chosen.size() < count; ++tries) {
        QVec c(nb);
        for (auto& v : c)
            v = Rational(static_cast<long long>(rng.next_u64() % 5) - 2);
        consider(c);
    }
    return chosen;
}

std::optional<QVec> coordinates_in_basis(const ConstantAlphaResult& r, const QMat& a) {
    if (r.basis.empty()) return std::nullopt;
    QVec target = to_vector(a);
    QMat cols;  // rows: one per upper entry, columns: basis
    const std::size_t m = target.size();
    cols.assign(m, QVec(r.basis.size(), Rational(0)));
    for (std::size_t b = 0; b < r.basis.size(); ++b) {
        QVec bv = to_vector(r.basis[b]);
        for (std::size_t k = 0; k < m; ++k) cols[k][b] = bv[k];
    }
    LinearSolution sol = solve_linear(cols, target);
    if (!sol.consistent) return std::nullopt;
    return sol.particular;
}

Rational pfaffian4(const QMat& a) {
    if (a.size() != 4) throw std::invalid_argument("pfaffian4 needs a 4x4 matrix");
    return a[0][1] * a[2][3] - a[0][2] * a[1][3] + a[0][3] * a[1][2];
}

GeneralLambda integrate_alpha(const FirstOrderSystem& sys, const BirkhoffData& bd) {
    const std::size_t n = sys.dim();
    GeneralLambda out;
    out.states = sys.states();
    out.t = sys.time();

    // full (n+1)-dimensional antisymmetric coefficient matrix over (t, x)
    std::vector<std::string> coords{out.t};
    coords.insert(coords.end(), out.states.begin(), out.states.end());
    std::vector<Expr> bvec = bd.b(sys);
    std::vector<std::vector<Expr>> mm(n + 1, std::vector<Expr>(n + 1, num(0)));
    for (std::size_t j = 0; j < n; ++j) {
        mm[0][j + 1] = bvec[j];
        mm[j + 1][0] = simplify(num(0) - bvec[j]);
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) mm[i + 1][j + 1] = bd.a(static_cast<int>(i), static_cast<int>(j));

    auto base = sys.domain().base_point(coords);
    std::vector<Expr> lambda(n + 1, num(0));
    std::map<std::string, Expr> pinned;
    for (std::size_t d = n; d >= 1; --d) {
        Expr lo = num(base.at(coords[d]));
        for (std::size_t a = 0; a < d; ++a) {
            Expr entry = simplify(substitute(mm[d][a], pinned));
            if (entry.is_zero()) continue;
            Antiderivative leg = definite_integral(entry, coords[d], lo, sym(coords[d]));
            out.exact = out.exact && leg.exact;
            for (const auto& s : leg.nonzero_conditions) out.nonzero_conditions.push_back(s);
            lambda[a] = simplify(lambda[a] + leg.expr);
        }
        pinned[coords[d]] = lo;
    }

    out.h = lambda[0];
    for (std::size_t i = 0; i < n; ++i) out.m.push_back(lambda[i + 1]);
    return out;
}

EquivResult birkhoff_el_check(const FirstOrderSystem& sys, const GeneralLambda& gl,
                              const EquivOptions& opts) {
    const std::size_t n = sys.dim();
    Domain d = sys.domain().with_excluded(gl.nonzero_conditions);
    EquivResult all{true, CheckMode::Symbolic, 0.0};
    for (std::size_t j = 0; j < n; ++j) {
        Expr r = differentiate(gl.m[j], gl.t) - differentiate(gl.h, gl.states[j]);
        for (std::size_t i = 0; i < n; ++i)
            r = r + sys.velocity(i) * (differentiate(gl.m[j], gl.states[i]) -
                                       differentiate(gl.m[i], gl.states[j]));
        EquivResult c = equivalent(simplify(r), num(0), d, opts);
        all.equal = all.equal && c.equal;
        if (c.mode == CheckMode::Numeric) all.mode = CheckMode::Numeric;
        all.max_deviation = std::max(all.max_deviation, c.max_deviation);
        if (!all.equal) break;
    }
    return all;
}

std::optional<Expr> lambda_gauge_equivalent(const GeneralLambda& a, const GeneralLambda& b,
                                            const Domain& d, const EquivOptions& opts) {
    if (a.m.size() != b.m.size() || a.states != b.states) return std::nullopt;
    const std::size_t n = a.m.size();
    Domain dd = d.with_excluded(a.nonzero_conditions).with_excluded(b.nonzero_conditions);
    auto vanishes = [&](const Expr& e) {
        if (e.is_zero()) return true;
        try {
            return equivalent(e, num(0), dd, opts).equal;
        } catch (const SamplingError&) {
            return false;
        }
    };

    std::vector<Expr> dm(n);
    for (std::size_t i = 0; i < n; ++i) dm[i] = simplify(a.m[i] - b.m[i]);
    Expr dh = simplify(a.h - b.h);

    for (std::size_t i = 0; i < n; ++i) {
        if (!vanishes(simplify(differentiate(dm[i], a.t) - differentiate(dh, a.states[i]))))
            return std::nullopt;
        for (std::size_t j = i + 1; j < n; ++j)
            if (!vanishes(simplify(differentiate(dm[j], a.states[i]) -
                                   differentiate(dm[i], a.states[j]))))
                return std::nullopt;
    }

    std::vector<std::string> coords{a.t};
    coords.insert(coords.end(), a.states.begin(), a.states.end());
    auto base = dd.base_point(coords);
    std::vector<Expr> comp{dh};
    comp.insert(comp.end(), dm.begin(), dm.end());

    // integrate df = sum comp_a dc_a leg by leg, later coordinates pinned
    Expr f = num(0);
    std::map<std::string, Expr> pinned;
    for (std::size_t idx = coords.size(); idx >= 1; --idx) {
        std::size_t c = idx - 1;
        Expr entry = simplify(substitute(comp[c], pinned));
        Expr lo = num(base.at(coords[c]));
        if (!entry.is_zero()) {
            Antiderivative leg = definite_integral(entry, coords[c], lo, sym(coords[c]));
            f = simplify(f + leg.expr);
        }
        pinned[coords[c]] = lo;
    }

    if (!vanishes(simplify(differentiate(f, a.t) - dh))) return std::nullopt;
    for (std::size_t i = 0; i < n; ++i)
        if (!vanishes(simplify(differentiate(f, a.states[i]) - dm[i]))) return std::nullopt;
    return f;
}

}  // namespace jlm
