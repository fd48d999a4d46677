#pragma once

// Reference evaluations used by tests and the selftest. They deliberately take
// routes independent of svd(): spectral counting on the Jordan-Wielandt
// matrix, and Laplace expansion for determinants.

#include <cmath>
#include <vector>

#include "linalg.hpp"
#include "matrix.hpp"
#include "mu.hpp"

namespace logmajor::oracle {

/// Singular values of x as the nonnegative eigenvalues of [[0, x], [x*, 0]],
/// which has spectrum {+s_j, -s_j}.
inline std::vector<double> singular_values_by_dilation(const ComplexMatrix& x) {
    const std::size_t n = x.size();
    const auto e = hermitian_eigen(block_matrix(ComplexMatrix::zero(n), x, ComplexMatrix::zero(n)));
    std::vector<double> s(e.values.begin(), e.values.begin() + static_cast<std::ptrdiff_t>(n));
    for (double& v : s) v = std::max(v, 0.0);
    return s;
}

/// inf{ lambda >= 0 : #{j : s_j > lambda} / n  <= t }   (strict == false)
/// inf{ lambda >= 0 : #{j : s_j > lambda} / n  <  t }   (strict == true)
inline double counting_value(const std::vector<double>& spectrum, double t, bool strict) {
    const double n = static_cast<double>(spectrum.size());
    auto admissible = [&](double lambda) {
        std::size_t count = 0;
        for (double s : spectrum)
            if (s > lambda) ++count;
        const double measure = static_cast<double>(count) / n;
        return strict ? measure < t : measure <= t;
    };
    double best = pos_inf;
    if (admissible(0.0)) best = 0.0;
    for (double s : spectrum)
        if (s < best && admissible(s)) best = s;
    return best;
}

/// mu_t(x) from the spectral-counting definition, evaluated at the left end of each cell.
inline StepFunction mu_by_counting(const ComplexMatrix& x) {
    const auto spec = singular_values_by_dilation(x);
    const std::size_t n = x.size();
    StepFunction f;
    f.continuity = Continuity::Right;
    for (std::size_t k = 1; k <= n; ++k)
        f.values.push_back(counting_value(spec, static_cast<double>(k - 1) / static_cast<double>(n), false));
    return f;
}

/// mu^l_t(x) from the strict counting definition, evaluated at the right end of each cell.
inline StepFunction mu_left_by_counting(const ComplexMatrix& x) {
    const auto spec = singular_values_by_dilation(x);
    const std::size_t n = x.size();
    StepFunction f;
    f.continuity = Continuity::Left;
    for (std::size_t k = 1; k <= n; ++k)
        f.values.push_back(counting_value(spec, static_cast<double>(k) / static_cast<double>(n), true));
    return f;
}

/// Laplace expansion along the first row. Exponential cost; meant for n <= 5.
inline Complex cofactor_determinant(const ComplexMatrix& x) {
    const std::size_t n = x.size();
    if (n == 1) return x(0, 0);
    if (n == 2) return x(0, 0) * x(1, 1) - x(0, 1) * x(1, 0);
    Complex det{};
    for (std::size_t col = 0; col < n; ++col) {
        if (x(0, col) == Complex{}) continue;
        ComplexMatrix minor(n - 1);
        for (std::size_t i = 1; i < n; ++i) {
            std::size_t jj = 0;
            for (std::size_t j = 0; j < n; ++j)
                if (j != col) minor(i - 1, jj++) = x(i, j);
        }
        const double sign = (col % 2 == 0) ? 1.0 : -1.0;
        det += sign * x(0, col) * cofactor_determinant(minor);
    }
    return det;
}

/// |det x|^{1/n}.
inline double determinant_root(const ComplexMatrix& x) {
    return std::pow(std::abs(cofactor_determinant(x)), 1.0 / static_cast<double>(x.size()));
}

} // namespace logmajor::oracle
