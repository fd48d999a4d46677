#include <gtest/gtest.h>

#include <cmath>

#include "logmajor/linalg.hpp"
#include "logmajor/matrix.hpp"
#include "logmajor/sampler.hpp"

using namespace logmajor;

namespace {

double distance(const ComplexMatrix& a, const ComplexMatrix& b) { return (a - b).frobenius_norm(); }

double unitarity_residual(const ComplexMatrix& u) {
    return distance(u.adjoint() * u, ComplexMatrix::identity(u.size()));
}

SamplerSeed seed_for(std::uint64_t trial, std::string_view purpose) {
    return SamplerSeed::derive(7, trial, purpose);
}

} // namespace

TEST(Svd, DiagonalIsSorted) {
    const auto s = svd(ComplexMatrix::diagonal({0.2, 0.8}));
    ASSERT_EQ(s.values.size(), 2u);
    EXPECT_DOUBLE_EQ(s.values[0], 0.8);
    EXPECT_DOUBLE_EQ(s.values[1], 0.2);
}

TEST(Svd, ZeroMatrix) {
    const auto s = svd(ComplexMatrix::zero(3));
    for (double v : s.values) EXPECT_EQ(v, 0.0);
    EXPECT_LT(unitarity_residual(s.left), 1e-15);
    EXPECT_LT(unitarity_residual(s.right), 1e-15);
}

TEST(Svd, Nilpotent2x2) {
    // x e2 = e1: x* x = diag(0, 1), so s = (1, 0).
    const ComplexMatrix x{{0, 1}, {0, 0}};
    const auto s = svd(x);
    EXPECT_DOUBLE_EQ(s.values[0], 1.0);
    EXPECT_DOUBLE_EQ(s.values[1], 0.0);
    EXPECT_LT(distance(compose(s.left, s.values, s.right), x), 1e-15);
}

TEST(Svd, ReconstructionOnGinibre) {
    for (std::uint64_t trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 1 + trial % 16;
        const auto x = sample_ginibre(n, seed_for(trial, "svd"));
        const auto s = svd(x);
        ASSERT_TRUE(std::is_sorted(s.values.rbegin(), s.values.rend()));
        EXPECT_GE(s.values.back(), 0.0);
        const double norm = s.values.front();
        const auto residual = compose(s.left, s.values, s.right) - x;
        EXPECT_LE(operator_norm(residual), 1e-12 * static_cast<double>(n) * norm) << "n=" << n;
        EXPECT_LT(unitarity_residual(s.left), 1e-12 * n);
        EXPECT_LT(unitarity_residual(s.right), 1e-12 * n);
    }
}

TEST(Svd, RankDeficientCompletesLeftFactor) {
    ComplexMatrix x = sample_ginibre(5, seed_for(0, "rankdef"));
    for (std::size_t i = 0; i < 5; ++i) {
        x(i, 1) = 0;
        x(i, 3) = 0;
    }
    const auto s = svd(x);
    EXPECT_EQ(s.values[3], 0.0);
    EXPECT_EQ(s.values[4], 0.0);
    EXPECT_LT(unitarity_residual(s.left), 1e-13);
    EXPECT_LT(distance(compose(s.left, s.values, s.right), x), 1e-13);
}

TEST(Svd, DeterministicForFixedInput) {
    const auto x = sample_ginibre(6, seed_for(3, "det"));
    const auto a = svd(x);
    const auto b = svd(x);
    EXPECT_EQ(a.values, b.values);
    EXPECT_TRUE(a.left == b.left);
}

TEST(HermitianEigen, Identity) {
    const auto e = hermitian_eigen(ComplexMatrix::identity(2));
    EXPECT_EQ(e.values, (std::vector<double>{1.0, 1.0}));
    EXPECT_LT(unitarity_residual(e.vectors), 1e-15);
}

TEST(HermitianEigen, SwapMatrix) {
    const auto e = hermitian_eigen(ComplexMatrix{{0, 1}, {1, 0}});
    EXPECT_NEAR(e.values[0], 1.0, 1e-15);
    EXPECT_NEAR(e.values[1], -1.0, 1e-15);
}

TEST(HermitianEigen, DiagonalSorting) {
    const auto e = hermitian_eigen(ComplexMatrix::diagonal({3.0, 1.0, 2.0}));
    EXPECT_EQ(e.values, (std::vector<double>{3.0, 2.0, 1.0}));
    // eigenvectors form the sorting permutation
    EXPECT_EQ(std::abs(e.vectors(0, 0)), 1.0);
    EXPECT_EQ(std::abs(e.vectors(2, 1)), 1.0);
    EXPECT_EQ(std::abs(e.vectors(1, 2)), 1.0);
}

TEST(HermitianEigen, RejectsNonHermitian) {
    EXPECT_THROW(hermitian_eigen(ComplexMatrix{{0, 1}, {0, 0}}), NotHermitian);
}

TEST(HermitianEigen, ReconstructionOnRandomHermitian) {
    for (std::uint64_t trial = 0; trial < 300; ++trial) {
        const std::size_t n = 1 + trial % 16;
        const auto g = sample_ginibre(n, seed_for(trial, "herm"));
        const auto h = (g + g.adjoint()).hermitian_part();
        const auto e = hermitian_eigen(h);
        ASSERT_TRUE(std::is_sorted(e.values.rbegin(), e.values.rend()));
        const double norm = std::max(std::abs(e.values.front()), std::abs(e.values.back()));
        EXPECT_LE(operator_norm(compose(e.vectors, e.values, e.vectors) - h), 1e-12 * n * norm);
        // complex phases exercised: eigenvalues must match the dilation-free trace
        double sum = 0;
        for (double v : e.values) sum += v;
        EXPECT_NEAR(sum, h.trace().real(), 1e-12 * n * norm);
    }
}

TEST(Polar, PositiveDiagonal) {
    const auto x = ComplexMatrix::diagonal({2.0, 3.0});
    const auto p = polar(x);
    EXPECT_LT(distance(p.unitary, ComplexMatrix::identity(2)), 1e-15);
    EXPECT_LT(distance(p.absolute, x), 1e-14);
}

TEST(Polar, Nilpotent) {
    const ComplexMatrix x{{0, 1}, {0, 0}};
    const auto p = polar(x);
    EXPECT_LT(distance(p.absolute, ComplexMatrix::diagonal({0.0, 1.0})), 1e-15);
    EXPECT_LT(distance(p.unitary * p.absolute, x), 1e-15);
    // kernel completed deterministically: u e1 = e2
    EXPECT_LT(distance(p.unitary, ComplexMatrix{{0, 1}, {1, 0}}), 1e-15);
    // partial isometry: u*u is the support projection of |x|
    const auto pi = p.partial_isometry;
    EXPECT_LT(distance(pi.adjoint() * pi, ComplexMatrix::diagonal({0.0, 1.0})), 1e-15);
}

TEST(Polar, UnitaryInput) {
    const auto w = sample_haar_unitary(4, seed_for(1, "polar-u"));
    const auto p = polar(w);
    EXPECT_LT(distance(p.unitary, w), 1e-13);
    EXPECT_LT(distance(p.absolute, ComplexMatrix::identity(4)), 1e-13);
}

TEST(Polar, ConsistencyOnRandomInputs) {
    for (std::uint64_t trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + trial % 10;
        const auto x = sample_ginibre(n, seed_for(trial, "polar"));
        const auto p = polar(x);
        const double norm = operator_norm(x);
        EXPECT_LE(operator_norm(p.unitary * p.absolute - x), 1e-11 * n * norm);
        const auto sx = svd(x).values;
        const auto sa = svd(p.absolute).values;
        for (std::size_t j = 0; j < n; ++j) EXPECT_NEAR(sx[j], sa[j], 1e-10);
        EXPECT_GE(hermitian_eigen(p.absolute).values.back(), -1e-12);
    }
}

TEST(ApplyScalarFunction, IdentityFunction) {
    const auto x = sample_positive(5, seed_for(0, "asf"));
    EXPECT_LT(distance(apply_scalar_function(x, ScalarFunction::power(1.0)), x), 1e-12 * x.frobenius_norm());
}

TEST(ApplyScalarFunction, SquareOfDiagonal) {
    const auto y = apply_scalar_function(ComplexMatrix::diagonal({2.0, 3.0}), ScalarFunction::power(2.0));
    EXPECT_LT(distance(y, ComplexMatrix::diagonal({4.0, 9.0})), 1e-13);
}

TEST(ApplyScalarFunction, LogShift) {
    const double e = std::exp(1.0);
    const auto y = apply_scalar_function(ComplexMatrix::diagonal({0.0, e - 1.0}), ScalarFunction::log_shift());
    EXPECT_LT(distance(y, ComplexMatrix::diagonal({0.0, 1.0})), 1e-15);
}

TEST(ApplyScalarFunction, RejectsNegative) {
    EXPECT_THROW(apply_scalar_function(ComplexMatrix::diagonal({1.0, -0.5}), ScalarFunction::power(0.5)),
                 NotPositive);
    // tiny negatives are clamped
    EXPECT_NO_THROW(apply_scalar_function(ComplexMatrix::diagonal({1.0, -1e-13}), ScalarFunction::power(0.5)));
}

TEST(ApplyScalarFunction, CommutesWithInput) {
    for (std::uint64_t trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + trial % 8;
        const auto x = sample_positive(n, seed_for(trial, "commute"));
        const auto fx = apply_scalar_function(x, ScalarFunction::rational(0.7));
        const double bound = 1e-9 * operator_norm(x) * operator_norm(fx);
        EXPECT_LE(operator_norm(x * fx - fx * x), bound);
    }
}

TEST(ContractionFactor, IdentityBlocks) {
    const auto x = sample_contraction(3, seed_for(0, "cf"));
    const auto w = contraction_factor(ComplexMatrix::identity(3), ComplexMatrix::identity(3), x);
    EXPECT_LT(distance(w, x), 1e-13);
}

TEST(ContractionFactor, CommutingSquareRoots) {
    // x = a^{1/2} b^{1/2} with a = diag(4, 0, 1), b = diag(1, 9, 0):
    // w = P_a P_b = diag(1, 0, 0).
    const auto a = ComplexMatrix::diagonal({4.0, 0.0, 1.0});
    const auto b = ComplexMatrix::diagonal({1.0, 9.0, 0.0});
    const auto x = ComplexMatrix::diagonal({2.0, 0.0, 0.0});
    const auto w = contraction_factor(a, b, x);
    EXPECT_LT(distance(w, ComplexMatrix::diagonal({1.0, 0.0, 0.0})), 1e-14);
}

TEST(ContractionFactor, RankDeficientLeftBlock) {
    const Complex c(0.6, -0.3);
    const auto a = ComplexMatrix::diagonal({1.0, 0.0});
    const ComplexMatrix x{{c, 0}, {0, 0}};
    const auto w = contraction_factor(a, ComplexMatrix::identity(2), x);
    EXPECT_LT(std::abs(w(0, 0) - c), 1e-15);
    EXPECT_LE(operator_norm(w), 1.0);
}

TEST(ContractionFactor, RejectsIndefiniteBlock) {
    const auto x = ComplexMatrix::diagonal({2.0, 0.0});
    EXPECT_THROW(contraction_factor(ComplexMatrix::identity(2), ComplexMatrix::identity(2), x), NotPSDBlock);
}

TEST(ContractionFactor, RoundTripFromRandomContraction) {
    for (std::uint64_t trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + trial % 6;
        const auto a = sample_positive(n, seed_for(trial, "cf-a"));
        const auto b = sample_positive(n, seed_for(trial, "cf-b"));
        const auto w0 = sample_contraction(n, seed_for(trial, "cf-w"), false);
        const auto x = psd_power(a, 0.5) * w0 * psd_power(b, 0.5);
        // forward direction: the block is positive semidefinite
        const auto block = hermitian_eigen(block_matrix(a, x, b).hermitian_part());
        EXPECT_GE(block.values.back(), -1e-9 * std::max(1.0, block.values.front()));
        // backward direction: recover a contraction reproducing x
        const auto w = contraction_factor(a, b, x);
        EXPECT_LE(operator_norm(w), 1.0 + 1e-8);
        const double scale = (1 + operator_norm(a)) * (1 + operator_norm(b));
        EXPECT_LE(operator_norm(psd_power(a, 0.5) * w * psd_power(b, 0.5) - x), 1e-8 * scale);
    }
}

TEST(DirectSum, Zeros) {
    EXPECT_TRUE(direct_sum(ComplexMatrix::zero(2), ComplexMatrix::zero(3)) == ComplexMatrix::zero(5));
}

TEST(DirectSum, Scalars) {
    EXPECT_TRUE(direct_sum(ComplexMatrix::diagonal({1.0}), ComplexMatrix::diagonal({2.0})) ==
                ComplexMatrix::diagonal({1.0, 2.0}));
}

TEST(DirectSum, SpectrumIsMergedAndTraceAveraged) {
    const auto x1 = sample_ginibre(3, seed_for(0, "ds1"));
    const auto x2 = sample_ginibre(3, seed_for(0, "ds2"));
    auto merged = svd(x1).values;
    const auto s2 = svd(x2).values;
    merged.insert(merged.end(), s2.begin(), s2.end());
    std::sort(merged.begin(), merged.end(), std::greater<>());
    const auto s = svd(direct_sum(x1, x2)).values;
    for (std::size_t j = 0; j < 6; ++j) EXPECT_NEAR(s[j], merged[j], 1e-13);
    const auto tau = normalized_trace(direct_sum(x1, x2));
    const auto expected = (normalized_trace(x1) + normalized_trace(x2)) * 0.5;
    EXPECT_LT(std::abs(tau - expected), 1e-15);
}

TEST(OperatorNorm, Examples) {
    EXPECT_DOUBLE_EQ(operator_norm(ComplexMatrix::identity(3)), 1.0);
    EXPECT_DOUBLE_EQ(operator_norm(ComplexMatrix::diagonal({0.3, -0.7})), 0.7);
    EXPECT_DOUBLE_EQ(operator_norm(ComplexMatrix{{0, 2}, {0, 0}}), 2.0);
}

TEST(MatrixText, RoundTripIsExact) {
    for (std::uint64_t trial = 0; trial < 50; ++trial) {
        const auto x = sample_ginibre(1 + trial % 7, seed_for(trial, "text"));
        EXPECT_TRUE(parse_matrix(to_text(x)) == x);
    }
}

TEST(MatrixText, ParseErrorsCarryPosition) {
    try {
        parse_matrix("2\n1 0 0 0\n0 0 abc 0\n");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3);
        EXPECT_EQ(e.column(), 5);
    }
    EXPECT_THROW(parse_matrix("2\n1 0 0 0\n"), ParseError);
    EXPECT_THROW(parse_matrix("0\n"), ParseError);
    EXPECT_THROW(parse_matrix("1\n1 0 extra\n"), ParseError);
}

TEST(ScalarFunctionTest, FlagsAndParsing) {
    EXPECT_TRUE(ScalarFunction::power(0.5).concave());
    EXPECT_FALSE(ScalarFunction::power(2.0).concave());
    EXPECT_TRUE(ScalarFunction::power(1.0).concave());
    EXPECT_TRUE(ScalarFunction::log_shift().increasing());
    EXPECT_FALSE(ScalarFunction::power(1.0).affine(1.0, -1.0).increasing());
    EXPECT_NO_THROW(ScalarFunction::rational(2.0).require_concave_origin());
    EXPECT_THROW(ScalarFunction::affine_plus_one().require_concave_origin(), InvalidStatementParams);
    EXPECT_NO_THROW(ScalarFunction::affine_plus_one().require_increasing_from_one());
    EXPECT_FALSE(ScalarFunction::piecewise_linear({0, 1}, {0.5, 1.5}).concave());

    const auto f = ScalarFunction::piecewise_linear({0, 0.5, 1.2}, {2, 1, 0.25}).affine(1.0, 3.0);
    const auto g = ScalarFunction::parse(f.describe());
    for (double t : {0.0, 0.3, 0.9, 2.0}) EXPECT_EQ(f(t), g(t));
    EXPECT_DOUBLE_EQ(ScalarFunction::table({{0, 0}, {1, 2}, {2, 3}})(1.5), 2.5);
    EXPECT_DOUBLE_EQ(ScalarFunction::table({{0, 0}, {1, 2}, {2, 3}})(4.0), 5.0);
}
