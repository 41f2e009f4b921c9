#include "jlm/linalg.hpp"

#include <stdexcept>

namespace jlm {

LinearSolution solve_linear(QMat a, QVec b) {
    const std::size_t m = a.size();
    const std::size_t n = m ? a[0].size() : 0;
    if (b.size() != m) throw std::invalid_argument("solve_linear: size mismatch");

    std::vector<int> pivot_col(m, -1);
    std::size_t row = 0;
    for (std::size_t col = 0; col < n && row < m; ++col) {
        std::size_t piv = row;
        while (piv < m && a[piv][col].is_zero()) ++piv;
        if (piv == m) continue;
        std::swap(a[piv], a[row]);
        std::swap(b[piv], b[row]);
        Rational inv = Rational(1) / a[row][col];
        for (std::size_t j = col; j < n; ++j) a[row][j] = a[row][j] * inv;
        b[row] = b[row] * inv;
        for (std::size_t r = 0; r < m; ++r) {
            if (r == row || a[r][col].is_zero()) continue;
            Rational f = a[r][col];
            for (std::size_t j = col; j < n; ++j) a[r][j] = a[r][j] - f * a[row][j];
            b[r] = b[r] - f * b[row];
        }
        pivot_col[row] = static_cast<int>(col);
        ++row;
    }

    LinearSolution sol;
    for (std::size_t r = row; r < m; ++r)
        if (!b[r].is_zero()) return sol;  // inconsistent
    sol.consistent = true;

    std::vector<bool> is_pivot(n, false);
    sol.particular.assign(n, Rational(0));
    for (std::size_t r = 0; r < row; ++r) {
        is_pivot[pivot_col[r]] = true;
        sol.particular[pivot_col[r]] = b[r];
    }
    for (std::size_t col = 0; col < n; ++col) {
        if (is_pivot[col]) continue;
        QVec v(n, Rational(0));
        v[col] = Rational(1);
        for (std::size_t r = 0; r < row; ++r)
            v[pivot_col[r]] = Rational(0) - a[r][col];
        sol.nullspace.push_back(std::move(v));
    }
    return sol;
}

Rational determinant(QMat a) {
    const std::size_t n = a.size();
    for (const auto& r : a)
        if (r.size() != n) throw std::invalid_argument("determinant: not square");
    Rational det(1);
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        while (piv < n && a[piv][col].is_zero()) ++piv;
        if (piv == n) return Rational(0);
        if (piv != col) {
            std::swap(a[piv], a[col]);
            det = Rational(0) - det;
        }
        det = det * a[col][col];
        Rational inv = Rational(1) / a[col][col];
        for (std::size_t r = col + 1; r < n; ++r) {
            if (a[r][col].is_zero()) continue;
            Rational f = a[r][col] * inv;
            for (std::size_t j = col; j < n; ++j) a[r][j] = a[r][j] - f * a[col][j];
        }
    }
    return det;
}

}  // namespace jlm
