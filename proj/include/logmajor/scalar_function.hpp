#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "matrix.hpp"

namespace logmajor {

/// Scalar function on [0, inf) used for functional calculus:
/// f(t) = shift + scale * kernel(t).
///
/// The monotone and concave flags are probed once, at construction, on a
/// 1000-point grid over [0, probe_limit].
class ScalarFunction {
public:
    enum class Kind { Power, LogShift, Rational, PiecewiseLinearConcave, AffinePlusOne, Table };

    static constexpr double probe_limit = 8.0;
    static constexpr int probe_points = 1000;

    /// t^alpha, alpha > 0.
    static ScalarFunction power(double alpha) {
        if (!(alpha > 0) || !std::isfinite(alpha))
            throw InvalidStatementParams("power exponent must be positive");
        return ScalarFunction(Kind::Power, {alpha});
    }

    /// c * log(1 + t / c); c = 1 gives log(1 + t).
    static ScalarFunction log_shift(double c = 1.0) {
        if (!(c > 0)) throw InvalidStatementParams("logShift scale must be positive");
        return ScalarFunction(Kind::LogShift, {c});
    }

    /// c * t / (c + t); c = 1 gives t / (1 + t).
    static ScalarFunction rational(double c = 1.0) {
        if (!(c > 0)) throw InvalidStatementParams("rational scale must be positive");
        return ScalarFunction(Kind::Rational, {c});
    }

    /// Piecewise linear through the origin. `breaks` starts at 0 and increases;
    /// slopes[i] holds on [breaks[i], breaks[i+1]) and the last slope continues to infinity.
    static ScalarFunction piecewise_linear(std::vector<double> breaks, std::vector<double> slopes) {
        if (breaks.empty() || breaks.size() != slopes.size() || breaks.front() != 0.0)
            throw InvalidStatementParams("piecewise linear: breaks must start at 0, one slope each");
        for (std::size_t i = 1; i < breaks.size(); ++i)
            if (!(breaks[i] > breaks[i - 1]))
                throw InvalidStatementParams("piecewise linear: breaks must increase");
        std::vector<double> p;
        for (std::size_t i = 0; i < breaks.size(); ++i) {
            p.push_back(breaks[i]);
            p.push_back(slopes[i]);
        }
        return ScalarFunction(Kind::PiecewiseLinearConcave, std::move(p));
    }

    /// 1 + t.
    static ScalarFunction affine_plus_one() { return ScalarFunction(Kind::AffinePlusOne, {}); }

    /// Linear interpolation of (t, f) samples; t starts at 0 and increases.
    /// Extrapolates the last segment beyond the final sample.
    static ScalarFunction table(std::vector<std::pair<double, double>> points) {
        if (points.size() < 2 || points.front().first != 0.0)
            throw InvalidStatementParams("table needs >= 2 points starting at t = 0");
        std::vector<double> p;
        for (std::size_t i = 0; i < points.size(); ++i) {
            if (i && !(points[i].first > points[i - 1].first))
                throw InvalidStatementParams("table abscissae must increase");
            p.push_back(points[i].first);
            p.push_back(points[i].second);
        }
        return ScalarFunction(Kind::Table, std::move(p));
    }

    /// shift + scale * (*this).
    ScalarFunction affine(double shift, double scale) const {
        ScalarFunction f = *this;
        f.shift_ = shift + scale * shift_;
        f.scale_ = scale * scale_;
        f.probe();
        return f;
    }

    double operator()(double t) const { return shift_ + scale_ * kernel(t); }

    Kind kind() const noexcept { return kind_; }
    const std::vector<double>& params() const noexcept { return params_; }
    double shift() const noexcept { return shift_; }
    double scale() const noexcept { return scale_; }
    bool increasing() const noexcept { return increasing_; }
    bool concave() const noexcept { return concave_; }

    /// Hypothesis of the concave family: nonnegative, concave, f(0) = 0.
    void require_concave_origin() const {
        if ((*this)(0.0) != 0.0) throw InvalidStatementParams(describe() + ": f(0) must be 0");
        if (!concave_) throw InvalidStatementParams(describe() + ": concavity probe failed");
        if (!increasing_) throw InvalidStatementParams(describe() + ": must be nondecreasing");
    }

    /// Hypothesis of the determinant family: increasing with f(0) = 1.
    void require_increasing_from_one() const {
        if (std::abs((*this)(0.0) - 1.0) > 1e-15)
            throw InvalidStatementParams(describe() + ": f(0) must be 1");
        if (!increasing_) throw InvalidStatementParams(describe() + ": must be increasing");
    }

    std::string describe() const {
        std::string core;
        switch (kind_) {
        case Kind::Power: core = "power"; break;
        case Kind::LogShift: core = "logShift"; break;
        case Kind::Rational: core = "rational"; break;
        case Kind::PiecewiseLinearConcave: core = "pwl"; break;
        case Kind::AffinePlusOne: core = "affinePlusOne"; break;
        case Kind::Table: core = "table"; break;
        }
        core += '(';
        for (std::size_t i = 0; i < params_.size(); ++i) {
            if (i) core += ',';
            core += format_double(params_[i]);
        }
        core += ')';
        if (shift_ == 0.0 && scale_ == 1.0) return core;
        return "affine(" + format_double(shift_) + "," + format_double(scale_) + "," + core + ")";
    }

    /// Inverse of describe().
    static ScalarFunction parse(std::string_view text) {
        auto fail = [&](const std::string& why) -> ScalarFunction {
            throw ParseError("bad scalar function '" + std::string(text) + "': " + why, 1, 1);
        };
        auto numbers = [&](std::string_view body) {
            std::vector<double> out;
            while (!body.empty()) {
                auto comma = body.find(',');
                auto tok = body.substr(0, comma);
                double v = 0;
                auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
                if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
                    fail("bad number '" + std::string(tok) + "'");
                out.push_back(v);
                if (comma == std::string_view::npos) break;
                body.remove_prefix(comma + 1);
            }
            return out;
        };
        auto open = text.find('(');
        if (open == std::string_view::npos || text.back() != ')') return fail("missing parentheses");
        auto name = text.substr(0, open);
        auto body = text.substr(open + 1, text.size() - open - 2);
        if (name == "affine") {
            auto c1 = body.find(',');
            auto c2 = body.find(',', c1 == std::string_view::npos ? 0 : c1 + 1);
            if (c1 == std::string_view::npos || c2 == std::string_view::npos)
                return fail("affine needs shift,scale,inner");
            auto head = numbers(body.substr(0, c2));
            return parse(body.substr(c2 + 1)).affine(head.at(0), head.at(1));
        }
        auto p = numbers(body);
        if (name == "power" && p.size() == 1) return power(p[0]);
        if (name == "logShift" && p.size() == 1) return log_shift(p[0]);
        if (name == "rational" && p.size() == 1) return rational(p[0]);
        if (name == "affinePlusOne" && p.empty()) return affine_plus_one();
        if ((name == "pwl" || name == "table") && p.size() >= 2 && p.size() % 2 == 0) {
            std::vector<double> a, b;
            std::vector<std::pair<double, double>> pts;
            for (std::size_t i = 0; i < p.size(); i += 2) {
                a.push_back(p[i]);
                b.push_back(p[i + 1]);
                pts.emplace_back(p[i], p[i + 1]);
            }
            return name == "pwl" ? piecewise_linear(a, b) : table(pts);
        }
        return fail("unknown kind or wrong parameter count");
    }

private:
    ScalarFunction(Kind kind, std::vector<double> params)
        : kind_(kind), params_(std::move(params)) {
        probe();
    }

    double kernel(double t) const {
        switch (kind_) {
        case Kind::Power:
            if (t <= 0) return 0.0;
            return params_[0] == 1.0 ? t : std::pow(t, params_[0]);
        case Kind::LogShift: return params_[0] * std::log1p(t / params_[0]);
        case Kind::Rational: return params_[0] * t / (params_[0] + t);
        case Kind::AffinePlusOne: return 1.0 + t;
        case Kind::PiecewiseLinearConcave: {
            double value = 0;
            const std::size_t m = params_.size() / 2;
            for (std::size_t i = 0; i < m; ++i) {
                const double lo = params_[2 * i];
                const double hi = i + 1 < m ? params_[2 * i + 2] : INFINITY;
                if (t <= lo) break;
                value += params_[2 * i + 1] * (std::min(t, hi) - lo);
            }
            return value;
        }
        case Kind::Table: {
            const std::size_t m = params_.size() / 2;
            std::size_t i = 0;
            while (i + 2 < m && t > params_[2 * (i + 1)]) ++i;
            const double t0 = params_[2 * i], f0 = params_[2 * i + 1];
            const double t1 = params_[2 * i + 2], f1 = params_[2 * i + 3];
            return f0 + (f1 - f0) * (t - t0) / (t1 - t0);
        }
        }
        return 0.0;
    }

    void probe() {
        std::vector<double> v(probe_points);
        for (int i = 0; i < probe_points; ++i)
            v[i] = (*this)(probe_limit * i / (probe_points - 1));
        increasing_ = true;
        concave_ = true;
        for (int i = 1; i < probe_points; ++i) {
            const double tol = 1e-12 * (1.0 + std::abs(v[i]));
            if (v[i] < v[i - 1] - tol) increasing_ = false;
            if (i + 1 < probe_points && v[i + 1] - 2 * v[i] + v[i - 1] > tol) concave_ = false;
        }
    }

    Kind kind_;
    std::vector<double> params_;
    double shift_ = 0.0;
    double scale_ = 1.0;
    bool increasing_ = true;
    bool concave_ = true;
};

} // namespace logmajor
