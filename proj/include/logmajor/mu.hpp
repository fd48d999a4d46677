#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"
#include "linalg.hpp"
#include "matrix.hpp"
#include "scalar_function.hpp"

namespace logmajor {

inline constexpr double neg_inf = -std::numeric_limits<double>::infinity();
inline constexpr double pos_inf = std::numeric_limits<double>::infinity();

/// Values below this are exact zeros for every logarithm taken in the library.
inline constexpr double log_floor = 1e-300;

inline double safe_log(double v) { return v < log_floor ? neg_inf : std::log(v); }

enum class Continuity { Right, Left };

/// Nonincreasing step function on (0, 1) over the grid k/n.
/// Right: values[k-1] holds on [(k-1)/n, k/n). Left: on ((k-1)/n, k/n].
struct StepFunction {
    std::vector<double> values;
    Continuity continuity = Continuity::Right;

    std::size_t size() const noexcept { return values.size(); }

    double at(double t) const {
        const double n = static_cast<double>(values.size());
        if (continuity == Continuity::Right) {
            if (t < 0 || t >= 1) return 0.0;
            return values[static_cast<std::size_t>(std::floor(t * n))];
        }
        if (t <= 0 || t > 1) return 0.0;
        return values[static_cast<std::size_t>(std::ceil(t * n)) - 1];
    }

    /// s -> 1 - s: cell k maps to cell n+1-k and the continuity flavor flips.
    StepFunction reflected() const {
        StepFunction out{{values.rbegin(), values.rend()},
                         continuity == Continuity::Right ? Continuity::Left : Continuity::Right};
        return out;
    }

    StepFunction one_minus() const {
        StepFunction out = *this;
        for (double& v : out.values) v = 1.0 - v;
        return out;
    }

    bool nonincreasing() const {
        return std::is_sorted(values.rbegin(), values.rend());
    }
};

/// Piecewise-linear curve k/n -> sum_{j<=k} increments[j-1], stored by its
/// increments so the slope monotonicity is checkable exactly.
class LambdaCurve {
public:
    /// Concave: log-integral of a nonincreasing integrand (Lambda curves).
    /// Convex: integrand nondecreasing (1 - mu transforms and tail integrals).
    enum class Shape { Concave, Convex };

    LambdaCurve() = default;
    LambdaCurve(std::vector<double> increments, Shape shape)
        : increments_(std::move(increments)), shape_(shape) {
        if (!well_formed())
            throw DomainError("LambdaCurve: increments violate the curve shape");
    }

    std::size_t n() const noexcept { return increments_.size(); }
    Shape shape() const noexcept { return shape_; }
    const std::vector<double>& increments() const noexcept { return increments_; }

    /// Log value at t = k/n, k = 0..n.
    double at(std::size_t k) const {
        double s = 0;
        for (std::size_t j = 0; j < k; ++j) {
            if (increments_[j] == neg_inf) return neg_inf;
            s += increments_[j];
        }
        return s;
    }

    std::vector<double> log_values() const {
        std::vector<double> out(n() + 1, 0.0);
        for (std::size_t k = 1; k <= n(); ++k)
            out[k] = (out[k - 1] == neg_inf || increments_[k - 1] == neg_inf)
                         ? neg_inf
                         : out[k - 1] + increments_[k - 1];
        return out;
    }

    double lambda(std::size_t k) const { return std::exp(at(k)); }

    /// Value at arbitrary t in [0, 1] (affine between grid points).
    double at_time(double t) const {
        const double pos = std::clamp(t, 0.0, 1.0) * static_cast<double>(n());
        const auto k = std::min(static_cast<std::size_t>(std::floor(pos)), n());
        if (k == n()) return at(n());
        const double base = at(k);
        const double inc = increments_[k];
        if (pos == static_cast<double>(k)) return base;
        if (base == neg_inf || inc == neg_inf) return neg_inf;
        return base + (pos - static_cast<double>(k)) * inc;
    }

    LambdaCurve scaled(double c) const {
        if (!(c > 0)) throw DomainError("LambdaCurve: scale factor must be positive");
        LambdaCurve out = *this;
        for (double& v : out.increments_) v = v == neg_inf ? neg_inf : c * v;
        return out;
    }

    /// Pointwise sum of log curves, i.e. product of the Lambda values.
    friend LambdaCurve operator+(const LambdaCurve& a, const LambdaCurve& b) {
        if (a.n() != b.n()) throw DimensionMismatch("LambdaCurve: grid sizes differ");
        if (a.shape_ != b.shape_) throw DomainError("LambdaCurve: cannot add curves of opposite shape");
        LambdaCurve out = a;
        for (std::size_t j = 0; j < a.n(); ++j)
            out.increments_[j] = (a.increments_[j] == neg_inf || b.increments_[j] == neg_inf)
                                     ? neg_inf
                                     : a.increments_[j] + b.increments_[j];
        return out;
    }

    bool well_formed() const {
        for (double v : increments_)
            if (std::isnan(v) || v == pos_inf) return false;
        for (std::size_t j = 1; j < increments_.size(); ++j) {
            if (shape_ == Shape::Concave && increments_[j] > increments_[j - 1]) return false;
            if (shape_ == Shape::Convex && increments_[j] < increments_[j - 1]) return false;
        }
        return true;
    }

private:
    std::vector<double> increments_;
    Shape shape_ = Shape::Concave;
};

/// One grid-point comparison. slack >= 0 means the stated relation holds there.
struct CheckMargin {
    std::string part;
    std::size_t k = 0;
    double t = 0;
    double lhs = 0;
    double rhs = 0;
    double slack = 0;
};

enum class Relation { LessEq, GreaterEq, Equal };

/// rhs - lhs with infinities resolved: (-inf, -inf) is 0.
inline double slack_le(double lhs, double rhs) {
    if (lhs == rhs) return 0.0;
    if (lhs == neg_inf) return pos_inf;
    if (rhs == neg_inf) return neg_inf;
    return rhs - lhs;
}

inline double slack_ge(double lhs, double rhs) { return slack_le(rhs, lhs); }

inline double slack_eq(double lhs, double rhs) {
    if (lhs == rhs) return 0.0;
    if (lhs == neg_inf || rhs == neg_inf) return neg_inf;
    return -std::abs(lhs - rhs);
}

inline double relation_slack(Relation rel, double lhs, double rhs) {
    switch (rel) {
    case Relation::LessEq: return slack_le(lhs, rhs);
    case Relation::GreaterEq: return slack_ge(lhs, rhs);
    case Relation::Equal: return slack_eq(lhs, rhs);
    }
    return neg_inf;
}

inline CheckMargin make_margin(std::string part, std::size_t k, std::size_t n, Relation rel, double lhs, double rhs) {
    return CheckMargin{std::move(part), k, static_cast<double>(k) / static_cast<double>(n), lhs, rhs,
                       relation_slack(rel, lhs, rhs)};
}

/// Margins at t = k/n, k = 1..n. Both curves are affine on every cell, so
/// ordering at grid points is ordering everywhere.
inline std::vector<CheckMargin> compare_curves(const std::string& part, const LambdaCurve& lhs, const LambdaCurve& rhs, Relation rel) {
    if (lhs.n() != rhs.n()) throw DimensionMismatch("compare_curves: grid sizes differ");
    const auto a = lhs.log_values();
    const auto b = rhs.log_values();
    std::vector<CheckMargin> out;
    out.reserve(lhs.n());
    for (std::size_t k = 1; k <= lhs.n(); ++k) out.push_back(make_margin(part, k, lhs.n(), rel, a[k], b[k]));
    return out;
}

/// Cell-by-cell comparison of step functions, in value units.
inline std::vector<CheckMargin> compare_steps(const std::string& part, const StepFunction& lhs, const StepFunction& rhs, Relation rel) {
    if (lhs.size() != rhs.size()) throw DimensionMismatch("compare_steps: grid sizes differ");
    std::vector<CheckMargin> out;
    for (std::size_t k = 1; k <= lhs.size(); ++k)
        out.push_back(make_margin(part, k, lhs.size(), rel, lhs.values[k - 1], rhs.values[k - 1]));
    return out;
}

/// mu_t(x): the sorted singular values as a right-continuous step function.
template <typename Real>
StepFunction mu(const BasicMatrix<Real>& x) {
    const auto s = svd(x);
    StepFunction f;
    f.continuity = Continuity::Right;
    f.values.reserve(s.values.size());
    for (Real v : s.values) f.values.push_back(static_cast<double>(v));
    return f;
}

/// mu^l_t(x): same values, left-continuous cells.
template <typename Real>
StepFunction mu_left(const BasicMatrix<Real>& x) {
    StepFunction f = mu(x);
    f.continuity = Continuity::Left;
    return f;
}

/// Log-integral t -> int_0^t log f(s) ds at the grid points.
inline LambdaCurve lambda_curve(const StepFunction& f) {
    const double n = static_cast<double>(f.size());
    std::vector<double> inc(f.size());
    for (std::size_t j = 0; j < f.size(); ++j) {
        const double l = safe_log(f.values[j]);
        inc[j] = l == neg_inf ? neg_inf : l / n;
    }
    return LambdaCurve(std::move(inc), LambdaCurve::Shape::Concave);
}

template <typename Real>
LambdaCurve lambda_curve(const BasicMatrix<Real>& x) {
    return lambda_curve(mu(x));
}

namespace detail {

inline double one_minus_checked(double v) {
    const double w = 1.0 - v;
    if (w < -1e-12) throw DomainError("1 - mu is negative: input is not a contraction");
    return std::max(w, 0.0);
}

} // namespace detail

/// t -> int_0^t log(1 - f(s)) ds. Integrand is nondecreasing, so the curve is convex.
inline LambdaCurve one_minus_log_curve(const StepFunction& f) {
    const double n = static_cast<double>(f.size());
    std::vector<double> inc(f.size());
    for (std::size_t j = 0; j < f.size(); ++j) {
        const double l = safe_log(detail::one_minus_checked(f.values[j]));
        inc[j] = l == neg_inf ? neg_inf : l / n;
    }
    return LambdaCurve(std::move(inc), LambdaCurve::Shape::Convex);
}

/// t -> int_{1-t}^1 log f(s) ds, indexed by t on the same grid.
inline LambdaCurve tail_log_curve(const StepFunction& f) {
    const double n = static_cast<double>(f.size());
    std::vector<double> inc(f.size());
    for (std::size_t j = 0; j < f.size(); ++j) {
        const double v = f.values[f.size() - 1 - j];
        if (v < -1e-12) throw DomainError("tail_log_curve: negative integrand");
        const double l = safe_log(std::max(v, 0.0));
        inc[j] = l == neg_inf ? neg_inf : l / n;
    }
    return LambdaCurve(std::move(inc), LambdaCurve::Shape::Convex);
}

enum class ShiftTransform {
    OneMinusRight, // int_0^t log(1 - mu_s(x)) ds
    OneMinusLeft,  // int_0^t log(1 - mu^l_s(x)) ds
    TailLeft,      // int_{1-t}^1 log mu^l_s(x) ds
};

template <typename Real>
LambdaCurve shifted_log_curve(const BasicMatrix<Real>& x, ShiftTransform transform) {
    const StepFunction f = transform == ShiftTransform::OneMinusRight ? mu(x) : mu_left(x);
    if (!f.values.empty() && f.values.front() > 1.0 + 1e-12)
        throw DomainError("shifted_log_curve: operator norm exceeds 1");
    return transform == ShiftTransform::TailLeft ? tail_log_curve(f) : one_minus_log_curve(f);
}

/// exp tau(log |x|) = (prod_j s_j)^{1/n}; 0 for singular x.
template <typename Real>
double fk_determinant(const BasicMatrix<Real>& x) {
    return std::exp(lambda_curve(x).at(x.size()));
}

struct SubmajorizationResult {
    bool holds = false;
    std::vector<CheckMargin> margins;
};

/// x logarithmically submajorized by y: Lambda_t(x) <= Lambda_t(y) at every grid point.
template <typename Real>
SubmajorizationResult log_submajorize(const BasicMatrix<Real>& x, const BasicMatrix<Real>& y, double tolerance = 1e-8) {
    if (x.size() != y.size()) throw DimensionMismatch("log_submajorize: dimensions differ");
    SubmajorizationResult r;
    r.margins = compare_curves("Lambda(x)<=Lambda(y)", lambda_curve(x), lambda_curve(y), Relation::LessEq);
    r.holds = std::all_of(r.margins.begin(), r.margins.end(),
                          [&](const CheckMargin& m) { return m.slack >= -tolerance; });
    return r;
}

/// Decreasing rearrangement f* of samples on a uniform grid of [0, 1].
inline StepFunction rearrange_function(std::span<const double> samples) {
    StepFunction f;
    f.values.reserve(samples.size());
    for (double s : samples) {
        if (!std::isfinite(s)) throw DomainError("rearrange_function: non-finite sample");
        f.values.push_back(std::abs(s));
    }
    std::sort(f.values.begin(), f.values.end(), std::greater<>());
    return f;
}

struct TraceIdentity {
    double trace = 0;    // tau(f(x))
    double integral = 0; // int_0^1 f(mu_t(x)) dt
    bool agree = false;  // within 1e-10 relative to max(1, |trace|)
};

template <typename Real>
TraceIdentity trace_of_function(const BasicMatrix<Real>& x, const ScalarFunction& f) {
    const auto fx = apply_scalar_function(x, f);
    TraceIdentity r;
    r.trace = static_cast<double>(normalized_trace(fx).real());
    const auto m = mu(x);
    double s = 0;
    for (double v : m.values) s += f(v);
    r.integral = s / static_cast<double>(m.size());
    r.agree = std::abs(r.trace - r.integral) <= 1e-10 * std::max(1.0, std::abs(r.trace));
    return r;
}

/// CSV rows `k,t,logValue` with -inf written literally.
inline std::string curve_csv(const LambdaCurve& c) {
    std::string out = "k,t,logValue\n";
    const auto v = c.log_values();
    for (std::size_t k = 0; k < v.size(); ++k) {
        out += std::to_string(k) + "," + format_double(static_cast<double>(k) / static_cast<double>(c.n())) +
               "," + format_double(v[k]) + "\n";
    }
    return out;
}

} // namespace logmajor
