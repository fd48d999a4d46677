#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "errors.hpp"
#include "matrix.hpp"
#include "scalar_function.hpp"

namespace logmajor {

inline constexpr int max_jacobi_sweeps = 60;

template <typename Real>
struct HermitianEigen {
    std::vector<Real> values; // nonincreasing
    BasicMatrix<Real> vectors; // columns are eigenvectors
};

template <typename Real>
struct SingularSpectrum {
    std::vector<Real> values; // nonincreasing, >= 0
    BasicMatrix<Real> left;
    BasicMatrix<Real> right;
};

template <typename Real>
struct Polar {
    BasicMatrix<Real> unitary;  // kernel completed to a full unitary
    BasicMatrix<Real> absolute; // (x* x)^{1/2}
    BasicMatrix<Real> partial_isometry; // unitary restricted to the support of |x|
};

namespace detail {

template <typename Real>
std::vector<std::size_t> descending_order(const std::vector<Real>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] > v[b]; });
    return idx;
}

template <typename Real>
BasicMatrix<Real> permute_columns(const BasicMatrix<Real>& m, const std::vector<std::size_t>& order) {
    BasicMatrix<Real> out(m.size());
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m.size(); ++j) out(i, j) = m(i, order[j]);
    return out;
}

// Gram-Schmidt (two passes) of column j of `q` against columns in `done`.
template <typename Real>
Real orthogonalize_column(BasicMatrix<Real>& q, std::size_t j, const std::vector<std::size_t>& done) {
    const std::size_t n = q.size();
    for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t c : done) {
            std::complex<Real> dot{};
            for (std::size_t k = 0; k < n; ++k) dot += std::conj(q(k, c)) * q(k, j);
            for (std::size_t k = 0; k < n; ++k) q(k, j) -= dot * q(k, c);
        }
    }
    Real norm = 0;
    for (std::size_t k = 0; k < n; ++k) norm += std::norm(q(k, j));
    return std::sqrt(norm);
}

} // namespace detail

/// Frobenius-norm Hermiticity test, relative to ||x||_F.
template <typename Real>
bool is_hermitian(const BasicMatrix<Real>& x, Real rel_tol = Real(1e-12)) {
    Real diff = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = 0; j < x.size(); ++j) diff += std::norm(x(i, j) - std::conj(x(j, i)));
    return std::sqrt(diff) <= rel_tol * x.frobenius_norm();
}

/// Cyclic two-sided Jacobi for Hermitian matrices.
template <typename Real>
HermitianEigen<Real> hermitian_eigen(const BasicMatrix<Real>& x) {
    if (!x.all_finite()) throw NotHermitian("hermitian_eigen: non-finite entries");
    if (!is_hermitian(x)) throw NotHermitian("hermitian_eigen: input is not Hermitian");
    using C = std::complex<Real>;
    const std::size_t n = x.size();
    const Real eps = std::numeric_limits<Real>::epsilon();
    BasicMatrix<Real> a = x.hermitian_part();
    BasicMatrix<Real> v = BasicMatrix<Real>::identity(n);
    for (std::size_t i = 0; i < n; ++i) a(i, i) = a(i, i).real();
    const Real floor = eps * Real(1e-2) * a.frobenius_norm();

    bool converged = false;
    for (int sweep = 0; sweep < max_jacobi_sweeps && !converged; ++sweep) {
        converged = true;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const Real apq = std::abs(a(p, q));
                const Real app = a(p, p).real(), aqq = a(q, q).real();
                if (apq <= floor || apq <= eps * std::sqrt(std::abs(app * aqq))) continue;
                converged = false;
                const C phase = a(p, q) / apq; // e^{i phi}
                const Real zeta = (aqq - app) / (Real(2) * apq);
                const Real t = (zeta >= 0 ? Real(1) : Real(-1)) /
                               (std::abs(zeta) + std::sqrt(Real(1) + zeta * zeta));
                const Real c = Real(1) / std::sqrt(Real(1) + t * t);
                const Real s = t * c;
                const C sp = s * std::conj(phase); // s e^{-i phi}
                // A <- A J, J e_p = c e_p - s e^{-i phi} e_q, J e_q = s e_p + c e^{-i phi} e_q
                for (std::size_t k = 0; k < n; ++k) {
                    const C akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - sp * akq;
                    a(k, q) = s * akp + c * std::conj(phase) * akq;
                    const C vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - sp * vkq;
                    v(k, q) = s * vkp + c * std::conj(phase) * vkq;
                }
                // A <- J* A
                for (std::size_t k = 0; k < n; ++k) {
                    const C apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - std::conj(sp) * aqk;
                    a(q, k) = s * apk + c * phase * aqk;
                }
                a(p, q) = C{};
                a(q, p) = C{};
                a(p, p) = a(p, p).real();
                a(q, q) = a(q, q).real();
            }
        }
    }
    if (!converged)
        throw NonConvergence("hermitian_eigen: no convergence after " +
                             std::to_string(max_jacobi_sweeps) + " sweeps");

    std::vector<Real> lambda(n);
    for (std::size_t i = 0; i < n; ++i) lambda[i] = a(i, i).real();
    const auto order = detail::descending_order(lambda);
    HermitianEigen<Real> out;
    out.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.values[i] = lambda[order[i]];
    out.vectors = detail::permute_columns(v, order);
    return out;
}

/// One-sided (Hestenes) cyclic Jacobi SVD. Columns of x are rotated until
/// mutually orthogonal; this diagonalizes x* x without forming it.
template <typename Real>
SingularSpectrum<Real> svd(const BasicMatrix<Real>& x) {
    if (!x.all_finite()) throw NonConvergence("svd: non-finite entries");
    using C = std::complex<Real>;
    const std::size_t n = x.size();
    const Real eps = std::numeric_limits<Real>::epsilon();
    // rounding floor of a recomputed column inner product
    const Real tol = eps * Real(n);
    BasicMatrix<Real> a = x;
    BasicMatrix<Real> v = BasicMatrix<Real>::identity(n);

    auto column_norm2 = [&](std::size_t j) {
        Real s = 0;
        for (std::size_t k = 0; k < n; ++k) s += std::norm(a(k, j));
        return s;
    };

    bool converged = false;
    for (int sweep = 0; sweep < max_jacobi_sweeps && !converged; ++sweep) {
        converged = true;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                const Real alpha = column_norm2(i);
                const Real beta = column_norm2(j);
                if (alpha == 0 || beta == 0) continue;
                C gamma{};
                for (std::size_t k = 0; k < n; ++k) gamma += std::conj(a(k, i)) * a(k, j);
                const Real g = std::abs(gamma);
                if (g <= tol * std::sqrt(alpha) * std::sqrt(beta)) continue;
                converged = false;
                const C phase = gamma / g;
                const Real zeta = (beta - alpha) / (Real(2) * g);
                const Real t = (zeta >= 0 ? Real(1) : Real(-1)) /
                               (std::abs(zeta) + std::sqrt(Real(1) + zeta * zeta));
                const Real c = Real(1) / std::sqrt(Real(1) + t * t);
                const Real s = t * c;
                const C s_minus = s * std::conj(phase);
                const C s_plus = s * phase;
                for (std::size_t k = 0; k < n; ++k) {
                    const C ai = a(k, i), aj = a(k, j);
                    a(k, i) = c * ai - s_minus * aj;
                    a(k, j) = s_plus * ai + c * aj;
                    const C vi = v(k, i), vj = v(k, j);
                    v(k, i) = c * vi - s_minus * vj;
                    v(k, j) = s_plus * vi + c * vj;
                }
            }
        }
    }
    if (!converged)
        throw NonConvergence("svd: no convergence after " + std::to_string(max_jacobi_sweeps) +
                             " sweeps");

    std::vector<Real> sigma(n);
    for (std::size_t j = 0; j < n; ++j) sigma[j] = std::sqrt(column_norm2(j));
    const auto order = detail::descending_order(sigma);

    SingularSpectrum<Real> out;
    out.values.resize(n);
    out.right = detail::permute_columns(v, order);
    out.left = BasicMatrix<Real>(n);
    std::vector<std::size_t> done;
    std::vector<std::size_t> missing;
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t src = order[j];
        out.values[j] = sigma[src];
        if (sigma[src] > std::numeric_limits<Real>::min()) {
            for (std::size_t k = 0; k < n; ++k) out.left(k, j) = a(k, src) / sigma[src];
            done.push_back(j);
        } else {
            out.values[j] = 0;
            missing.push_back(j);
        }
    }
    // Deterministic completion of the left factor on the kernel.
    std::size_t basis = 0;
    for (std::size_t j : missing) {
        for (; basis < n; ++basis) {
            for (std::size_t k = 0; k < n; ++k) out.left(k, j) = k == basis ? Real(1) : Real(0);
            const Real norm = detail::orthogonalize_column(out.left, j, done);
            if (norm > Real(0.5)) {
                for (std::size_t k = 0; k < n; ++k) out.left(k, j) /= norm;
                ++basis;
                break;
            }
        }
        done.push_back(j);
    }
    return out;
}

template <typename Real>
Real operator_norm(const BasicMatrix<Real>& x) {
    return svd(x).values.front();
}

template <typename Real>
std::complex<Real> normalized_trace(const BasicMatrix<Real>& x) {
    return x.trace() / static_cast<Real>(x.size());
}

/// U diag(d) V*.
template <typename Real>
BasicMatrix<Real> compose(const BasicMatrix<Real>& u, const std::vector<Real>& d, const BasicMatrix<Real>& v) {
    const std::size_t n = u.size();
    BasicMatrix<Real> out(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            std::complex<Real> s{};
            for (std::size_t k = 0; k < n; ++k) s += u(i, k) * d[k] * std::conj(v(j, k));
            out(i, j) = s;
        }
    return out;
}

template <typename Real>
Polar<Real> polar(const BasicMatrix<Real>& x) {
    const auto s = svd(x);
    const std::size_t n = x.size();
    Polar<Real> p;
    p.absolute = compose(s.right, s.values, s.right).hermitian_part();
    p.unitary = s.left * s.right.adjoint();
    const Real cut = static_cast<Real>(n) * std::numeric_limits<Real>::epsilon() * s.values.front();
    std::vector<Real> support(n);
    for (std::size_t j = 0; j < n; ++j) support[j] = s.values[j] > cut ? Real(1) : Real(0);
    p.partial_isometry = compose(s.left, support, s.right);
    return p;
}

/// |x| = (x* x)^{1/2}.
template <typename Real>
BasicMatrix<Real> absolute_value(const BasicMatrix<Real>& x) {
    return polar(x).absolute;
}

/// Spectral calculus U diag(f(lambda)) U* on a positive semidefinite x.
/// Eigenvalues in [-1e-10 ||x||, 0) are clamped to 0.
template <typename Real, typename F>
BasicMatrix<Real> apply_function(const BasicMatrix<Real>& x, F&& f) {
    HermitianEigen<Real> e;
    try {
        e = hermitian_eigen(x);
    } catch (const NotHermitian& err) {
        throw NotPositive(std::string("apply_scalar_function: ") + err.what());
    }
    Real scale = 0;
    for (Real l : e.values) scale = std::max(scale, std::abs(l));
    std::vector<Real> fl(e.values.size());
    for (std::size_t i = 0; i < e.values.size(); ++i) {
        Real l = e.values[i];
        if (l < 0) {
            if (l < -Real(1e-10) * scale)
                throw NotPositive("apply_scalar_function: eigenvalue " +
                                  std::to_string(static_cast<double>(l)) + " is negative");
            l = 0;
        }
        fl[i] = static_cast<Real>(f(l));
    }
    return compose(e.vectors, fl, e.vectors).hermitian_part();
}

template <typename Real>
BasicMatrix<Real> apply_scalar_function(const BasicMatrix<Real>& x, const ScalarFunction& f) {
    return apply_function(x, [&](Real t) { return static_cast<Real>(f(static_cast<double>(t))); });
}

/// x^alpha for positive semidefinite x.
template <typename Real>
BasicMatrix<Real> psd_power(const BasicMatrix<Real>& x, Real alpha) {
    if (alpha == Real(1)) return x.hermitian_part();
    return apply_function(x, [alpha](Real t) { return t > 0 ? std::pow(t, alpha) : Real(0); });
}

template <typename Real>
BasicMatrix<Real> direct_sum(const BasicMatrix<Real>& x1, const BasicMatrix<Real>& x2) {
    const std::size_t n1 = x1.size(), n2 = x2.size();
    BasicMatrix<Real> out(n1 + n2);
    for (std::size_t i = 0; i < n1; ++i)
        for (std::size_t j = 0; j < n1; ++j) out(i, j) = x1(i, j);
    for (std::size_t i = 0; i < n2; ++i)
        for (std::size_t j = 0; j < n2; ++j) out(n1 + i, n1 + j) = x2(i, j);
    return out;
}

/// [[a, x], [x*, b]].
template <typename Real>
BasicMatrix<Real> block_matrix(const BasicMatrix<Real>& a, const BasicMatrix<Real>& x, const BasicMatrix<Real>& b) {
    const std::size_t n = a.size();
    if (x.size() != n || b.size() != n) throw DimensionMismatch("block_matrix: sizes differ");
    BasicMatrix<Real> out(2 * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            out(i, j) = a(i, j);
            out(i, n + j) = x(i, j);
            out(n + i, j) = std::conj(x(j, i));
            out(n + i, n + j) = b(i, j);
        }
    return out;
}

/// Returns a contraction w with x = a^{1/2} w b^{1/2}, given that [[a, x], [x*, b]] >= 0.
/// w is built from pseudo-inverses of a^{1/2} and b^{1/2} on their supports.
template <typename Real>
BasicMatrix<Real> contraction_factor(const BasicMatrix<Real>& a, const BasicMatrix<Real>& b, const BasicMatrix<Real>& x) {
    const auto block = block_matrix(a, x, b);
    HermitianEigen<Real> be;
    try {
        be = hermitian_eigen(block);
    } catch (const NotHermitian&) {
        throw NotPSDBlock("contraction_factor: block matrix is not Hermitian");
    }
    const Real block_norm = std::max(std::abs(be.values.front()), std::abs(be.values.back()));
    if (be.values.back() < -Real(1e-9) * std::max(Real(1), block_norm))
        throw NotPSDBlock("contraction_factor: block matrix has eigenvalue " +
                          std::to_string(static_cast<double>(be.values.back())));

    auto root_pinv = [](const BasicMatrix<Real>& m) {
        const auto e = hermitian_eigen(m);
        const Real top = std::max(Real(1), std::abs(e.values.front()));
        const Real cut = Real(1e-12) * top;
        std::vector<Real> d(e.values.size());
        for (std::size_t i = 0; i < d.size(); ++i)
            d[i] = e.values[i] > cut ? Real(1) / std::sqrt(e.values[i]) : Real(0);
        return compose(e.vectors, d, e.vectors);
    };
    return root_pinv(a) * x * root_pinv(b);
}

} // namespace logmajor
