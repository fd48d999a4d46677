#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "linalg.hpp"
#include "matrix.hpp"
#include "scalar_function.hpp"

namespace logmajor {

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// FNV-1a; turns purpose tags into stream keys.
constexpr std::uint64_t tag_hash(std::string_view tag) noexcept {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (char c : tag) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ULL;
    }
    return h;
}

/// Identifies one random stream: (master seed, trial index, purpose tag).
struct SamplerSeed {
    std::uint64_t master = 0;
    std::uint64_t stream = 0;

    static SamplerSeed derive(std::uint64_t master, std::uint64_t trial, std::string_view purpose) {
        std::uint64_t s = mix64(master);
        s = mix64(s ^ mix64(trial ^ 0xD1B54A32D192ED03ULL));
        s = mix64(s ^ tag_hash(purpose));
        return SamplerSeed{master, s};
    }

    SamplerSeed child(std::string_view tag) const {
        return SamplerSeed{master, mix64(stream ^ tag_hash(tag))};
    }
};

/// Counter-based generator: draw i of a stream is a pure function of (stream, i).
class CounterRng {
public:
    explicit CounterRng(SamplerSeed seed) : key_(seed.stream) {}

    std::uint64_t next_u64() noexcept { return mix64(key_ + 0xA0761D6478BD642FULL * ++counter_); }

    /// Uniform on [0, 1).
    double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1).
    double uniform_open() noexcept {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

    /// Box-Muller; caches the second variate.
    double gaussian() noexcept {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform_open()));
        const double theta = 2.0 * std::numbers::pi * uniform();
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

    /// Standard complex Gaussian, E|z|^2 = 1.
    Complex complex_gaussian() noexcept {
        const double re = gaussian();
        const double im = gaussian();
        return Complex(re, im) * (1.0 / std::numbers::sqrt2);
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    bool has_spare_ = false;
    double spare_ = 0;
};

inline constexpr double contraction_margin = 1e-6;

inline ComplexMatrix sample_ginibre(std::size_t n, SamplerSeed seed) {
    CounterRng rng(seed);
    ComplexMatrix x(n);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) x(i, j) = rng.complex_gaussian() * scale;
    return x;
}

/// Haar unitary: Gram-Schmidt QR of a Ginibre draw. Gram-Schmidt leaves
/// diag(R) real positive, which is the phase normalization Haar needs.
inline ComplexMatrix sample_haar_unitary(std::size_t n, SamplerSeed seed) {
    ComplexMatrix q = sample_ginibre(n, seed);
    std::vector<std::size_t> done;
    for (std::size_t j = 0; j < n; ++j) {
        const double norm = detail::orthogonalize_column(q, j, done);
        for (std::size_t k = 0; k < n; ++k) q(k, j) /= norm;
        done.push_back(j);
    }
    return q;
}

/// U diag(sigma) V* with sigma_j uniform on [0, 1 - delta] (strict) or [0, 1].
inline ComplexMatrix sample_contraction(std::size_t n, SamplerSeed seed, bool strict = true) {
    const ComplexMatrix u = sample_haar_unitary(n, seed.child("U"));
    const ComplexMatrix v = sample_haar_unitary(n, seed.child("V"));
    CounterRng rng(seed.child("sigma"));
    const double top = strict ? 1.0 - contraction_margin : 1.0;
    std::vector<double> sigma(n);
    for (double& s : sigma) s = top * rng.uniform();
    return compose(u, sigma, v);
}

/// g* g for Ginibre g.
inline ComplexMatrix sample_positive(std::size_t n, SamplerSeed seed) {
    const ComplexMatrix g = sample_ginibre(n, seed);
    return (g.adjoint() * g).hermitian_part();
}

/// U diag(lambda) U*, lambda_j uniform on [-1, 1].
inline ComplexMatrix sample_selfadjoint_contraction(std::size_t n, SamplerSeed seed) {
    const ComplexMatrix u = sample_haar_unitary(n, seed.child("U"));
    CounterRng rng(seed.child("lambda"));
    std::vector<double> lambda(n);
    for (double& l : lambda) l = rng.uniform(-1.0, 1.0);
    return compose(u, lambda, u).hermitian_part();
}

/// Random nonnegative concave f with f(0) = 0. One power draw in eight is
/// exactly t (the linear boundary member of the family).
inline ScalarFunction sample_concave(SamplerSeed seed) {
    CounterRng rng(seed);
    const auto kind = rng.next_u64() % 4;
    auto log_uniform_scale = [&] { return std::exp(rng.uniform(std::log(0.25), std::log(4.0))); };
    switch (kind) {
    case 0: {
        if (rng.next_u64() % 8 == 0) return ScalarFunction::power(1.0);
        return ScalarFunction::power(1.0 - rng.uniform());
    }
    case 1: return ScalarFunction::log_shift(log_uniform_scale());
    case 2: return ScalarFunction::rational(log_uniform_scale());
    default: {
        std::vector<double> breaks{0.0, rng.uniform(0.0, 2.0), rng.uniform(0.0, 2.0), rng.uniform(0.0, 2.0)};
        std::sort(breaks.begin(), breaks.end());
        for (std::size_t i = 1; i < breaks.size(); ++i)
            if (breaks[i] <= breaks[i - 1]) breaks[i] = breaks[i - 1] + 1e-3;
        std::vector<double> slopes(4);
        for (double& s : slopes) s = 2.0 * rng.uniform_open();
        std::sort(slopes.begin(), slopes.end(), std::greater<>());
        return ScalarFunction::piecewise_linear(breaks, slopes);
    }
    }
}

/// Hoelder-conjugate exponents: 1/p_i = w_i / sum(w), w_i uniform on (0, 1).
inline std::vector<double> sample_exponents(std::size_t m, SamplerSeed seed) {
    if (m < 2) throw InvalidStatementParams("sample_exponents: need m >= 2");
    CounterRng rng(seed);
    std::vector<double> w(m);
    double total = 0;
    for (double& v : w) {
        v = rng.uniform_open();
        total += v;
    }
    std::vector<double> p(m);
    for (std::size_t i = 0; i < m; ++i) p[i] = total / w[i];
    return p;
}

} // namespace logmajor
