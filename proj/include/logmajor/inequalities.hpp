#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "linalg.hpp"
#include "matrix.hpp"
#include "mu.hpp"
#include "scalar_function.hpp"

namespace logmajor {

inline constexpr double default_tolerance = 1e-8;

enum class StatementId {
    ROTFELD_1_1,
    GARG_AUJLA_1_2,
    POWER_1_3,
    HOLDER_1_4,
    MU_AXIOMS_2,
    LEMMA_3_1,
    LEMMA_3_2,
    THEOREM_3_3,
    LEMMA_4_1,
    LEMMA_4_2,
    LEMMA_4_3,
    LEMMA_4_5,
    THEOREM_4_6,
    COROLLARY_4_7,
    REMARK_4_8,
    NEGATIVE_CONTROL, // THEOREM_3_3 with the relation reversed; must be able to fail
};

inline constexpr std::array all_statements{
    StatementId::ROTFELD_1_1,  StatementId::GARG_AUJLA_1_2, StatementId::POWER_1_3,
    StatementId::HOLDER_1_4,   StatementId::MU_AXIOMS_2,    StatementId::LEMMA_3_1,
    StatementId::LEMMA_3_2,    StatementId::THEOREM_3_3,    StatementId::LEMMA_4_1,
    StatementId::LEMMA_4_2,    StatementId::LEMMA_4_3,      StatementId::LEMMA_4_5,
    StatementId::THEOREM_4_6,  StatementId::COROLLARY_4_7,  StatementId::REMARK_4_8,
    StatementId::NEGATIVE_CONTROL,
};

inline std::string_view to_string(StatementId id) {
    switch (id) {
    case StatementId::ROTFELD_1_1: return "ROTFELD_1_1";
    case StatementId::GARG_AUJLA_1_2: return "GARG_AUJLA_1_2";
    case StatementId::POWER_1_3: return "POWER_1_3";
    case StatementId::HOLDER_1_4: return "HOLDER_1_4";
    case StatementId::MU_AXIOMS_2: return "MU_AXIOMS_2";
    case StatementId::LEMMA_3_1: return "LEMMA_3_1";
    case StatementId::LEMMA_3_2: return "LEMMA_3_2";
    case StatementId::THEOREM_3_3: return "THEOREM_3_3";
    case StatementId::LEMMA_4_1: return "LEMMA_4_1";
    case StatementId::LEMMA_4_2: return "LEMMA_4_2";
    case StatementId::LEMMA_4_3: return "LEMMA_4_3";
    case StatementId::LEMMA_4_5: return "LEMMA_4_5";
    case StatementId::THEOREM_4_6: return "THEOREM_4_6";
    case StatementId::COROLLARY_4_7: return "COROLLARY_4_7";
    case StatementId::REMARK_4_8: return "REMARK_4_8";
    case StatementId::NEGATIVE_CONTROL: return "NEGATIVE_CONTROL";
    }
    return "?";
}

inline std::optional<StatementId> parse_statement(std::string_view name) {
    for (auto id : all_statements)
        if (to_string(id) == name) return id;
    return std::nullopt;
}

/// Statement-specific parameters. Fields a statement does not use are ignored.
struct StatementParams {
    double r = 1.0;     // power exponent (THEOREM_3_3, POWER_1_3, section-4 statements)
    double p = 1.0;     // ROTFELD_1_1 exponent, LEMMA_3_2 exponent
    double rho = 1.0;   // ROTFELD_1_1 scale
    double alpha = 1.0; // MU_AXIOMS_2 power
    std::vector<double> exponents;  // Hoelder tuple
    std::optional<ScalarFunction> f;
    bool exploratory = false; // admit out-of-range parameters / literal forms
    bool literal = false;     // LEMMA_4_3 / LEMMA_4_5 with |y| in place of |y*| (exploratory only)
};

struct CheckResult {
    StatementId statement = StatementId::MU_AXIOMS_2;
    StatementParams params;
    bool pass = false;
    double worst_slack = pos_inf;
    double tolerance = default_tolerance;
    std::vector<CheckMargin> margins;
    std::vector<std::pair<std::string, ComplexMatrix>> witness;
};

/// One evaluable instance: statement, parameters and labelled input matrices.
struct Witness {
    StatementId statement = StatementId::MU_AXIOMS_2;
    StatementParams params;
    std::vector<std::pair<std::string, ComplexMatrix>> inputs;

    std::size_t dimension() const { return inputs.empty() ? 0 : inputs.front().second.size(); }
};

namespace detail {

inline void append(std::vector<CheckMargin>& out, std::vector<CheckMargin> more) {
    out.insert(out.end(), std::make_move_iterator(more.begin()), std::make_move_iterator(more.end()));
}

inline CheckResult finish(StatementId id, const StatementParams& params, std::vector<CheckMargin> margins,
                          std::vector<std::pair<std::string, ComplexMatrix>> witness, double tolerance) {
    CheckResult r;
    r.statement = id;
    r.params = params;
    r.tolerance = tolerance;
    r.margins = std::move(margins);
    r.witness = std::move(witness);
    for (const auto& m : r.margins) r.worst_slack = std::min(r.worst_slack, m.slack);
    r.pass = r.worst_slack >= -tolerance;
    return r;
}

inline void require_same_size(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.size() != b.size()) throw DimensionMismatch("inputs must share one dimension");
}

inline void require_contraction(const ComplexMatrix& x, std::string_view label) {
    const double norm = operator_norm(x);
    if (norm > 1.0 + 1e-12)
        throw NotContraction(std::string(label) + " has operator norm " + format_double(norm) + " > 1");
}

inline void require_positive(const ComplexMatrix& x, std::string_view label) {
    if (!is_hermitian(x)) throw NotPositive(std::string(label) + " is not Hermitian");
    const auto e = hermitian_eigen(x);
    const double scale = std::max(std::abs(e.values.front()), std::abs(e.values.back()));
    if (e.values.back() < -1e-10 * scale) throw NotPositive(std::string(label) + " has a negative eigenvalue");
}

inline void require_hoelder(const std::vector<double>& ps) {
    if (ps.size() < 2) throw InvalidStatementParams("Hoelder tuple needs m >= 2 exponents");
    double s = 0;
    for (double p : ps) {
        if (!(p > 0) || !std::isfinite(p)) throw InvalidStatementParams("Hoelder exponents must be positive");
        s += 1.0 / p;
    }
    if (std::abs(s - 1.0) > 1e-12)
        throw InvalidStatementParams("Hoelder exponents: sum of reciprocals is " + format_double(s) + ", not 1");
}

inline ComplexMatrix identity_plus(const ComplexMatrix& x, double c = 1.0) {
    ComplexMatrix out = x * Complex(c);
    for (std::size_t i = 0; i < out.size(); ++i) out(i, i) += 1.0;
    return out;
}

inline ComplexMatrix identity_minus(const ComplexMatrix& x) {
    ComplexMatrix out = -x;
    for (std::size_t i = 0; i < out.size(); ++i) out(i, i) += 1.0;
    return out.hermitian_part();
}

/// |x|^r.
inline ComplexMatrix abs_power(const ComplexMatrix& x, double r) { return psd_power(absolute_value(x), r); }

inline ComplexMatrix product(const std::vector<ComplexMatrix>& xs) {
    ComplexMatrix p = xs.front();
    for (std::size_t i = 1; i < xs.size(); ++i) p = p * xs[i];
    return p;
}

inline double log_det(const ComplexMatrix& x) { return lambda_curve(x).at(x.size()); }

inline CheckMargin determinant_margin(std::string part, std::size_t n, Relation rel, double lhs, double rhs) {
    return make_margin(std::move(part), n, n, rel, lhs, rhs);
}

} // namespace detail

/// Elementary identities of mu and Lambda, checked as one statement.
inline CheckResult check_mu_axioms(const ComplexMatrix& x, const ComplexMatrix& y, const ComplexMatrix& u,
                                   const ComplexMatrix& v, const ScalarFunction& f, double alpha,
                                   double tolerance = default_tolerance) {
    using namespace detail;
    require_same_size(x, y);
    require_same_size(x, u);
    require_same_size(x, v);
    if (!f.increasing() || f(0.0) < 0.0)
        throw InvalidStatementParams("MU_AXIOMS_2: f must be increasing with f(0) >= 0");
    if (!(alpha > 0)) throw InvalidStatementParams("MU_AXIOMS_2: alpha must be positive");
    const std::size_t n = x.size();
    const auto absx = absolute_value(x);
    const auto mux = mu(x);

    std::vector<CheckMargin> m;
    append(m, compare_steps("mu(x*x)=mu(xx*)", mu(x.adjoint() * x), mu(x * x.adjoint()), Relation::Equal));

    StepFunction bound = mux;
    const double uv = operator_norm(u) * operator_norm(v);
    for (double& b : bound.values) b *= uv;
    append(m, compare_steps("mu(uxv)<=|u|mu(x)|v|", mu(u * x * v), bound, Relation::LessEq));

    StepFunction fmu = mux;
    for (double& b : fmu.values) b = f(b);
    append(m, compare_steps("mu(f(|x|))=f(mu(x))", mu(apply_scalar_function(absx, f)), fmu, Relation::Equal));

    StepFunction one_plus = mux;
    for (double& b : one_plus.values) b += 1.0;
    append(m, compare_steps("mu(1+|x|)=1+mu(x)", mu(identity_plus(absx)), one_plus, Relation::Equal));

    const auto lx = lambda_curve(mux);
    append(m, compare_curves("Lambda(x)=Lambda(x*)", lx, lambda_curve(x.adjoint()), Relation::Equal));
    append(m, compare_curves("Lambda(x)=Lambda(|x|)", lx, lambda_curve(absx), Relation::Equal));
    // the powered operator is formed in extended precision; in double its small
    // singular values drown in rounding once cond(x)^alpha nears 1/eps
    const auto absx_ext = absolute_value(BasicMatrix<long double>::convert(x));
    append(m, compare_curves("Lambda(|x|^a)=Lambda(x)^a",
                             lambda_curve(psd_power(absx_ext, static_cast<long double>(alpha))), lx.scaled(alpha),
                             Relation::Equal));
    append(m, compare_curves("Lambda(xy)<=Lambda(x)Lambda(y)", lambda_curve(x * y), lx + lambda_curve(y),
                             Relation::LessEq));

    const auto tr = trace_of_function(absx, f);
    m.push_back(make_margin("tau(f(|x|))=int f(mu)", n, n, Relation::Equal, tr.trace, tr.integral));

    StatementParams params;
    params.f = f;
    params.alpha = alpha;
    return finish(StatementId::MU_AXIOMS_2, params, std::move(m), {{"x", x}, {"y", y}, {"u", u}, {"v", v}},
                  tolerance);
}

/// Normalized-determinant form: Delta(1 + rho|x+y|^p) <= Delta(1 + rho|x|^p) Delta(1 + rho|y|^p).
inline CheckResult check_rotfeld(const ComplexMatrix& x, const ComplexMatrix& y, double rho, double p,
                                 double tolerance = default_tolerance, bool exploratory = false) {
    using namespace detail;
    require_same_size(x, y);
    if (!(rho > 0)) throw InvalidStatementParams("ROTFELD_1_1: rho must be positive");
    if (!(p > 0) || (!exploratory && p > 1)) throw InvalidStatementParams("ROTFELD_1_1: p must lie in (0, 1]");
    const std::size_t n = x.size();
    auto side = [&](const ComplexMatrix& z) { return log_det(identity_plus(abs_power(z, p), rho)); };
    std::vector<CheckMargin> m{
        determinant_margin("logDelta(1+rho|x+y|^p)<=sum", n, Relation::LessEq, side(x + y), side(x) + side(y))};
    StatementParams params;
    params.rho = rho;
    params.p = p;
    params.exploratory = exploratory;
    return finish(StatementId::ROTFELD_1_1, params, std::move(m), {{"x", x}, {"y", y}}, tolerance);
}

/// Lambda(1 + f(|x+y|)) <= Lambda(1 + f(|x|)) Lambda(1 + f(|y|)), f concave with f(0) = 0.
inline CheckResult check_concave_perturbation(const ComplexMatrix& x, const ComplexMatrix& y, const ScalarFunction& f,
                                              double tolerance = default_tolerance) {
    using namespace detail;
    require_same_size(x, y);
    f.require_concave_origin();
    auto curve = [&](const ComplexMatrix& z) {
        return lambda_curve(identity_plus(apply_scalar_function(absolute_value(z), f)));
    };
    StatementParams params;
    params.f = f;
    return finish(StatementId::GARG_AUJLA_1_2, params,
                  compare_curves("Lambda(1+f|x+y|)<=Lambda(1+f|x|)Lambda(1+f|y|)", curve(x + y),
                                 curve(x) + curve(y), Relation::LessEq),
                  {{"x", x}, {"y", y}}, tolerance);
}

/// Lambda(|x+y|^r) <= Lambda(1 + |x|^r) Lambda(1 + |y|^r) on the grid, plus its determinant form.
/// `reversed` flips the relation (negative control).
inline CheckResult check_power_bound(const ComplexMatrix& x, const ComplexMatrix& y, double r,
                                     double tolerance = default_tolerance, bool exploratory = false,
                                     bool reversed = false) {
    using namespace detail;
    require_same_size(x, y);
    if (!(r > 0) || (!exploratory && !reversed && (r < 1 || r > 2)))
        throw InvalidStatementParams("THEOREM_3_3: r must lie in [1, 2]");
    const std::size_t n = x.size();
    const auto lhs_matrix = abs_power(x + y, r);
    const auto rx = identity_plus(abs_power(x, r));
    const auto ry = identity_plus(abs_power(y, r));
    const Relation rel = reversed ? Relation::GreaterEq : Relation::LessEq;
    const std::string op = reversed ? ">=" : "<=";
    auto m = compare_curves("Lambda(|x+y|^r)" + op + "Lambda(1+|x|^r)Lambda(1+|y|^r)", lambda_curve(lhs_matrix),
                            lambda_curve(rx) + lambda_curve(ry), rel);
    m.push_back(determinant_margin("logDelta(|x+y|^r)" + op + "logDelta(1+|x|^r)+logDelta(1+|y|^r)", n, rel,
                                   std::log(fk_determinant(lhs_matrix)),
                                   std::log(fk_determinant(rx)) + std::log(fk_determinant(ry))));
    StatementParams params;
    params.r = r;
    params.exploratory = exploratory;
    return finish(reversed ? StatementId::NEGATIVE_CONTROL : StatementId::THEOREM_3_3, params, std::move(m),
                  {{"x", x}, {"y", y}}, tolerance);
}

/// Unnormalized partial products: sum_{j<=k} log s_j(|x+y|^r) <= sum_{j<=k} log s_j(1+|x|^r) s_j(1+|y|^r).
/// Computed from singular values by scalar calculus, independently of check_power_bound.
inline std::vector<CheckMargin> power_bound_partial_products(const ComplexMatrix& x, const ComplexMatrix& y,
                                                             double r) {
    detail::require_same_size(x, y);
    const auto s = svd(x + y).values;
    const auto a = svd(x).values;
    const auto b = svd(y).values;
    const std::size_t n = x.size();
    std::vector<CheckMargin> out;
    double lhs = 0, rhs = 0;
    for (std::size_t k = 1; k <= n; ++k) {
        const double l = safe_log(s[k - 1]);
        lhs = (lhs == neg_inf || l == neg_inf) ? neg_inf : lhs + r * l;
        rhs += std::log1p(std::pow(a[k - 1], r)) + std::log1p(std::pow(b[k - 1], r));
        out.push_back(make_margin("sum log s_j(|x+y|^r)<=sum log s_j(1+|x|^r)s_j(1+|y|^r)", k, n,
                                  Relation::LessEq, lhs, rhs));
    }
    return out;
}

inline CheckResult check_power_partial_products(const ComplexMatrix& x, const ComplexMatrix& y, double r,
                                                double tolerance = default_tolerance, bool exploratory = false) {
    if (!(r > 0) || (!exploratory && (r < 1 || r > 2)))
        throw InvalidStatementParams("POWER_1_3: r must lie in [1, 2]");
    StatementParams params;
    params.r = r;
    params.exploratory = exploratory;
    return detail::finish(StatementId::POWER_1_3, params, power_bound_partial_products(x, y, r),
                          {{"x", x}, {"y", y}}, tolerance);
}

/// Largest |Lambda-margin_k - partialProductMargin_k / n| over the grid.
inline double power_bound_coherence(const ComplexMatrix& x, const ComplexMatrix& y, double r) {
    const auto curve = check_power_bound(x, y, r).margins;
    const auto pp = power_bound_partial_products(x, y, r);
    const double n = static_cast<double>(x.size());
    double worst = 0;
    for (std::size_t k = 0; k < pp.size(); ++k) {
        const double a = curve[k].slack;
        const double b = pp[k].slack / n;
        if (a == b) continue;
        worst = std::max(worst, std::abs(a - b));
    }
    return worst;
}

namespace detail {

using ExtendedMatrix = BasicMatrix<long double>;

/// Singular values of x^a y^b for positive x, y, from their eigendecompositions:
/// s(x^a y^b) = s(D_x^a (U_x* U_y) D_y^b). The graded product is never formed
/// from powered matrices, which keeps small singular values accurate.
inline std::vector<double> graded_singular_values(const HermitianEigen<long double>& ex, long double a,
                                                  const HermitianEigen<long double>& ey, long double b) {
    const std::size_t n = ex.values.size();
    ExtendedMatrix w = ex.vectors.adjoint() * ey.vectors;
    for (std::size_t i = 0; i < n; ++i) {
        const long double di = std::pow(std::max(ex.values[i], 0.0L), a);
        for (std::size_t j = 0; j < n; ++j) w(i, j) *= di * std::pow(std::max(ey.values[j], 0.0L), b);
    }
    const auto sv = svd(w).values;
    return std::vector<double>(sv.begin(), sv.end());
}

} // namespace detail

/// Lambda(y^p x^p y^p) vs Lambda((yxy)^p): <= for p <= 1, >= for p >= 1, equality at p = 1.
/// Both sides are evaluated through s(y^p x^p y^p) = s(x^{p/2} y^p)^2 and
/// Lambda((yxy)^p) = 2p Lambda(x^{1/2} y), in extended precision.
inline CheckResult check_lemma_3_2(const ComplexMatrix& x, const ComplexMatrix& y, double p,
                                   double tolerance = default_tolerance) {
    using namespace detail;
    require_same_size(x, y);
    if (!(p > 0)) throw InvalidStatementParams("LEMMA_3_2: p must be positive");
    require_positive(x, "x");
    require_positive(y, "y");
    const auto ex = hermitian_eigen(ExtendedMatrix::convert(x.hermitian_part()));
    const auto ey = hermitian_eigen(ExtendedMatrix::convert(y.hermitian_part()));
    const long double lp = p;
    const auto lhs = lambda_curve(StepFunction{graded_singular_values(ex, lp / 2, ey, lp)}).scaled(2.0);
    const auto rhs = lambda_curve(StepFunction{graded_singular_values(ex, 0.5L, ey, 1.0L)}).scaled(2.0 * p);
    const Relation rel = p < 1 ? Relation::LessEq : p > 1 ? Relation::GreaterEq : Relation::Equal;
    StatementParams params;
    params.p = p;
    return finish(StatementId::LEMMA_3_2, params,
                  compare_curves("Lambda(y^p x^p y^p) vs Lambda((yxy)^p)", lhs, rhs, rel),
                  {{"x", x}, {"y", y}}, tolerance);
}

/// mu(1 + a) = 1 + mu(a) for positive a, and the 2x2 block factorization:
/// [[a, x], [x*, b]] >= 0 yields a contraction w with x = a^{1/2} w b^{1/2}.
inline CheckResult check_lemma_3_1(const ComplexMatrix& a, const ComplexMatrix& b, const ComplexMatrix& x,
                                   double tolerance = default_tolerance) {
    using namespace detail;
    require_same_size(a, b);
    require_same_size(a, x);
    require_positive(a, "a");
    require_positive(b, "b");
    const std::size_t n = a.size();
    std::vector<CheckMargin> m;
    StepFunction shifted = mu(a);
    for (double& v : shifted.values) v += 1.0;
    append(m, compare_steps("mu(1+a)=1+mu(a)", mu(identity_plus(a)), shifted, Relation::Equal));

    const auto w = contraction_factor(a, b, x);
    m.push_back(make_margin("||w||<=1", n, n, Relation::LessEq, operator_norm(w), 1.0));
    const double scale = (1 + operator_norm(a)) * (1 + operator_norm(b));
    const double residual = operator_norm(psd_power(a, 0.5) * w * psd_power(b, 0.5) - x) / scale;
    m.push_back(make_margin("a^1/2 w b^1/2 = x", n, n, Relation::Equal, residual, 0.0));
    return finish(StatementId::LEMMA_3_1, {}, std::move(m), {{"a", a}, {"b", b}, {"x", x}}, tolerance);
}

/// Reflection identities for a contraction, as exact step-function equalities:
///   mu_s(1-|x|) = 1 - mu^l_{1-s}(|x|),  mu^l_s(1-|x|) = 1 - mu_{1-s}(|x|).
/// With `self_adjoint`, also mu(1-|x|) <= mu(1-x) cell by cell.
inline CheckResult check_contraction_identities(const ComplexMatrix& x, bool self_adjoint,
                                                double tolerance = default_tolerance) {
    using namespace detail;
    require_contraction(x, "x");
    if (self_adjoint && !is_hermitian(x)) throw InvalidStatementParams("LEMMA_4_2: x must be self-adjoint");
    const auto absx = absolute_value(x);
    const auto one_minus_abs = identity_minus(absx);
    std::vector<CheckMargin> m;
    append(m, compare_steps("mu_s(1-|x|)=1-mu^l_{1-s}(|x|)", mu(one_minus_abs),
                            mu_left(absx).reflected().one_minus(), Relation::Equal));
    append(m, compare_steps("mu^l_s(1-|x|)=1-mu_{1-s}(|x|)", mu_left(one_minus_abs),
                            mu(absx).reflected().one_minus(), Relation::Equal));
    if (self_adjoint)
        append(m, compare_steps("mu(1-|x|)<=mu(1-x)", mu(one_minus_abs), mu(identity_minus(x)), Relation::LessEq));
    return finish(self_adjoint ? StatementId::LEMMA_4_2 : StatementId::LEMMA_4_1, {}, std::move(m), {{"x", x}},
                  tolerance);
}

/// Product integrals for contractions x, y and r >= 1, in the form where the
/// right factor enters through |y*| (the form that holds for non-normal y):
///   int_0^t log(1 - mu(|xy|^r)) >= int_0^t log(1 - mu(|x|^r |y*|^r))
/// and its tail form over [1-t, 1]. LEMMA_4_3 uses mu for the first pair and
/// mu^l for the tails; LEMMA_4_5 swaps the flavors and adds the determinant.
inline CheckResult check_product_integral(StatementId id, const ComplexMatrix& x, const ComplexMatrix& y, double r,
                                          double tolerance = default_tolerance, bool exploratory = false,
                                          bool literal = false) {
    using namespace detail;
    if (id != StatementId::LEMMA_4_3 && id != StatementId::LEMMA_4_5)
        throw InvalidStatementParams("check_product_integral: statement must be LEMMA_4_3 or LEMMA_4_5");
    require_same_size(x, y);
    if (!(r >= 1)) throw InvalidStatementParams("r must be >= 1");
    if (literal && !exploratory) throw InvalidStatementParams("literal form is exploratory only");
    require_contraction(x, "x");
    require_contraction(y, "y");
    const std::size_t n = x.size();
    const bool lemma_4_3 = id == StatementId::LEMMA_4_3;

    const auto prod_r = abs_power(x * y, r);
    const auto right_factor = literal ? absolute_value(y) : absolute_value(y.adjoint());
    const auto split = psd_power(absolute_value(x), r) * psd_power(right_factor, r);
    const auto one_minus_prod = identity_minus(prod_r);
    const auto one_minus_split = identity_minus(absolute_value(split));

    auto head = [&](const ComplexMatrix& z) { return one_minus_log_curve(lemma_4_3 ? mu(z) : mu_left(z)); };
    auto tail = [&](const ComplexMatrix& z) { return tail_log_curve(lemma_4_3 ? mu_left(z) : mu(z)); };

    std::vector<CheckMargin> m;
    append(m, compare_curves("int_0^t log(1-mu(|xy|^r)) >= int_0^t log(1-mu(|x|^r|y*|^r))", head(prod_r),
                             head(split), Relation::GreaterEq));
    append(m, compare_curves("int_{1-t}^1 log mu(1-|xy|^r) >= int_{1-t}^1 log mu(1-||x|^r|y*|^r|)",
                             tail(one_minus_prod), tail(one_minus_split), Relation::GreaterEq));
    if (!lemma_4_3) {
        m.push_back(determinant_margin("logDelta(1-|xy|^r) vs logDelta(1-||x|^r|y*|^r|)", n,
                                       literal ? Relation::LessEq : Relation::GreaterEq, log_det(one_minus_prod),
                                       log_det(one_minus_split)));
    }
    StatementParams params;
    params.r = r;
    params.exploratory = exploratory;
    params.literal = literal;
    return finish(id, params, std::move(m), {{"x", x}, {"y", y}}, tolerance);
}

namespace detail {

inline std::vector<std::pair<std::string, ComplexMatrix>> label_tuple(const std::vector<ComplexMatrix>& xs) {
    std::vector<std::pair<std::string, ComplexMatrix>> out;
    for (std::size_t i = 0; i < xs.size(); ++i) out.emplace_back("x" + std::to_string(i + 1), xs[i]);
    return out;
}

inline void require_tuple(const std::vector<ComplexMatrix>& xs, const std::vector<double>& ps, double r) {
    if (xs.size() < 2 || xs.size() != ps.size())
        throw InvalidStatementParams("need m >= 2 matrices and one exponent per matrix");
    require_hoelder(ps);
    if (!(r >= 1)) throw InvalidStatementParams("r must be >= 1");
    for (std::size_t i = 0; i < xs.size(); ++i) {
        require_same_size(xs[0], xs[i]);
        require_contraction(xs[i], "x" + std::to_string(i + 1));
    }
}

/// sum_i (1/p_i) * curve(x_i)
template <typename CurveOf>
LambdaCurve weighted_sum(const std::vector<ComplexMatrix>& xs, const std::vector<double>& ps, CurveOf curve_of) {
    LambdaCurve total = curve_of(0).scaled(1.0 / ps[0]);
    for (std::size_t i = 1; i < xs.size(); ++i) total = total + curve_of(i).scaled(1.0 / ps[i]);
    return total;
}

// Head and tail comparisons of the generalized Hoelder inequality at exponent r.
inline std::vector<CheckMargin> hoelder_curves(const std::vector<ComplexMatrix>& xs, const std::vector<double>& ps,
                                               double r, const std::string& tag) {
    const auto prod_abs = absolute_value(product(xs));
    const auto prod_r = psd_power(prod_abs, r);
    const auto head_rhs = weighted_sum(xs, ps, [&](std::size_t i) {
        return one_minus_log_curve(mu(abs_power(xs[i], r * ps[i])));
    });
    const auto tail_rhs = weighted_sum(xs, ps, [&](std::size_t i) {
        return tail_log_curve(mu_left(identity_minus(abs_power(xs[i], r * ps[i]))));
    });
    std::vector<CheckMargin> m = compare_curves(tag + " int_0^t log(1-mu(|P|)^r) >= sum (1/p_i) int_0^t log(1-mu(|x_i|)^{r p_i})",
                                                one_minus_log_curve(mu(prod_r)), head_rhs, Relation::GreaterEq);
    append(m, compare_curves(tag + " int_{1-t}^1 log mu^l(1-|P|^r) >= sum (1/p_i) int_{1-t}^1 log mu^l(1-|x_i|^{r p_i})",
                             tail_log_curve(mu_left(identity_minus(prod_r))), tail_rhs, Relation::GreaterEq));
    return m;
}

inline CheckMargin hoelder_determinant(const std::vector<ComplexMatrix>& xs, const std::vector<double>& ps, double r,
                                       const std::string& part) {
    const std::size_t n = xs.front().size();
    double rhs = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double l = log_det(identity_minus(abs_power(xs[i], r * ps[i])));
        rhs = (rhs == neg_inf || l == neg_inf) ? neg_inf : rhs + l / ps[i];
    }
    return determinant_margin(part, n, Relation::GreaterEq,
                              log_det(identity_minus(abs_power(product(xs), r))), rhs);
}

} // namespace detail

/// Generalized Hoelder inequality for contractions x_1..x_m, sum 1/p_i = 1, r >= 1.
/// THEOREM_4_6: head and tail integral forms at r.
/// COROLLARY_4_7: the r = 1 forms, plus the self-adjoint product chain when P = P*.
/// REMARK_4_8: the determinant consequences at r and at r = 1.
/// HOLDER_1_4: unnormalized partial products over singular values.
inline CheckResult check_holder_main(StatementId id, const std::vector<ComplexMatrix>& xs,
                                     const std::vector<double>& ps, double r,
                                     double tolerance = default_tolerance) {
    using namespace detail;
    require_tuple(xs, ps, r);
    const std::size_t n = xs.front().size();
    std::vector<CheckMargin> m;
    switch (id) {
    case StatementId::THEOREM_4_6:
        m = hoelder_curves(xs, ps, r, "r");
        break;
    case StatementId::COROLLARY_4_7: {
        if (r != 1.0) throw InvalidStatementParams("COROLLARY_4_7: r must be 1");
        m = hoelder_curves(xs, ps, 1.0, "r=1");
        const auto p = product(xs);
        if ((p - p.adjoint()).frobenius_norm() <= 1e-10 * std::max(1.0, p.frobenius_norm())) {
            const auto ps_herm = p.hermitian_part();
            const auto one_minus_p = identity_minus(ps_herm);
            const auto one_minus_abs = identity_minus(absolute_value(ps_herm));
            const auto tail_rhs = weighted_sum(xs, ps, [&](std::size_t i) {
                return tail_log_curve(mu_left(identity_minus(abs_power(xs[i], ps[i]))));
            });
            const auto tail_mid = tail_log_curve(mu_left(one_minus_abs));
            append(m, compare_curves("selfadjoint int_{1-t}^1 log mu^l(1-P) >= int_{1-t}^1 log mu^l(1-|P|)",
                                     tail_log_curve(mu_left(one_minus_p)), tail_mid, Relation::GreaterEq));
            append(m, compare_curves("selfadjoint int_{1-t}^1 log mu^l(1-|P|) >= sum (1/p_i) int log mu^l(1-|x_i|^p_i)",
                                     tail_mid, tail_rhs, Relation::GreaterEq));
            append(m, compare_steps("selfadjoint mu^l(1-|P|)<=mu^l(1-P)", mu_left(one_minus_abs),
                                    mu_left(one_minus_p), Relation::LessEq));
            append(m, compare_steps("selfadjoint mu(1-|P|)<=mu(1-P)", mu(one_minus_abs), mu(one_minus_p),
                                    Relation::LessEq));
        }
        break;
    }
    case StatementId::REMARK_4_8:
        m.push_back(hoelder_determinant(xs, ps, r, "logDelta(1-|P|^r) >= sum (1/p_i) logDelta(1-|x_i|^{r p_i})"));
        m.push_back(hoelder_determinant(xs, ps, 1.0, "logDelta(1-|P|) >= sum (1/p_i) logDelta(1-|x_i|^{p_i})"));
        break;
    case StatementId::HOLDER_1_4: {
        const auto sp = svd(product(xs)).values;
        std::vector<std::vector<double>> si;
        for (const auto& x : xs) si.push_back(svd(x).values);
        double lhs = 0, rhs = 0;
        for (std::size_t k = 1; k <= n; ++k) {
            const double l = safe_log(detail::one_minus_checked(std::pow(sp[k - 1], r)));
            lhs = (lhs == neg_inf || l == neg_inf) ? neg_inf : lhs + l;
            for (std::size_t i = 0; i < xs.size(); ++i) {
                const double li = safe_log(detail::one_minus_checked(std::pow(si[i][k - 1], r * ps[i])));
                rhs = (rhs == neg_inf || li == neg_inf) ? neg_inf : rhs + li / ps[i];
            }
            m.push_back(make_margin("sum_{j<=k} log(1-s_j(P)^r) >= sum_j sum_i (1/p_i) log(1-s_j(x_i)^{r p_i})", k, n,
                                    Relation::GreaterEq, lhs, rhs));
        }
        break;
    }
    default:
        throw InvalidStatementParams("check_holder_main: unsupported statement " + std::string(to_string(id)));
    }
    StatementParams params;
    params.r = r;
    params.exponents = ps;
    return finish(id, params, std::move(m), label_tuple(xs), tolerance);
}

namespace detail {

inline const ComplexMatrix& input(const Witness& w, std::string_view label) {
    for (const auto& [name, m] : w.inputs)
        if (name == label) return m;
    throw InvalidStatementParams("witness for " + std::string(to_string(w.statement)) + " lacks input '" +
                                 std::string(label) + "'");
}

inline std::vector<ComplexMatrix> tuple_inputs(const Witness& w) {
    std::vector<ComplexMatrix> xs;
    for (std::size_t i = 1;; ++i) {
        auto it = std::find_if(w.inputs.begin(), w.inputs.end(),
                               [&](const auto& p) { return p.first == "x" + std::to_string(i); });
        if (it == w.inputs.end()) break;
        xs.push_back(it->second);
    }
    return xs;
}

} // namespace detail

/// Evaluates a witness with its recorded statement and parameters.
inline CheckResult evaluate(const Witness& w, double tolerance = default_tolerance) {
    using detail::input;
    const auto& p = w.params;
    auto need_f = [&]() -> const ScalarFunction& {
        if (!p.f) throw InvalidStatementParams(std::string(to_string(w.statement)) + " needs parameter f");
        return *p.f;
    };
    CheckResult r;
    switch (w.statement) {
    case StatementId::MU_AXIOMS_2:
        r = check_mu_axioms(input(w, "x"), input(w, "y"), input(w, "u"), input(w, "v"), need_f(), p.alpha, tolerance);
        break;
    case StatementId::ROTFELD_1_1:
        r = check_rotfeld(input(w, "x"), input(w, "y"), p.rho, p.p, tolerance, p.exploratory);
        break;
    case StatementId::GARG_AUJLA_1_2:
        r = check_concave_perturbation(input(w, "x"), input(w, "y"), need_f(), tolerance);
        break;
    case StatementId::POWER_1_3:
        r = check_power_partial_products(input(w, "x"), input(w, "y"), p.r, tolerance, p.exploratory);
        break;
    case StatementId::THEOREM_3_3:
        r = check_power_bound(input(w, "x"), input(w, "y"), p.r, tolerance, p.exploratory);
        break;
    case StatementId::NEGATIVE_CONTROL:
        r = check_power_bound(input(w, "x"), input(w, "y"), p.r, tolerance, p.exploratory, true);
        break;
    case StatementId::LEMMA_3_1:
        r = check_lemma_3_1(input(w, "a"), input(w, "b"), input(w, "x"), tolerance);
        break;
    case StatementId::LEMMA_3_2:
        r = check_lemma_3_2(input(w, "x"), input(w, "y"), p.p, tolerance);
        break;
    case StatementId::LEMMA_4_1:
        r = check_contraction_identities(input(w, "x"), false, tolerance);
        break;
    case StatementId::LEMMA_4_2:
        r = check_contraction_identities(input(w, "x"), true, tolerance);
        break;
    case StatementId::LEMMA_4_3:
    case StatementId::LEMMA_4_5:
        r = check_product_integral(w.statement, input(w, "x"), input(w, "y"), p.r, tolerance, p.exploratory,
                                   p.literal);
        break;
    case StatementId::HOLDER_1_4:
    case StatementId::THEOREM_4_6:
    case StatementId::COROLLARY_4_7:
    case StatementId::REMARK_4_8:
        r = check_holder_main(w.statement, detail::tuple_inputs(w), p.exponents, p.r, tolerance);
        break;
    }
    // keep the caller's parameter record (exploratory flags, f) on the result
    r.params = p;
    return r;
}

/// One row of the machine-readable statement catalog.
struct CatalogEntry {
    StatementId id;
    std::string formula;
    std::string parameters;
    std::string hypotheses;
};

/// Human-readable location derived from the identifier: LEMMA_3_1 -> "Lemma 3.1".
inline std::string statement_location(StatementId id) {
    const std::string name(to_string(id));
    if (id == StatementId::NEGATIVE_CONTROL) return "harness";
    const auto digit = name.find_first_of("0123456789");
    std::string number = name.substr(digit);
    std::replace(number.begin(), number.end(), '_', '.');
    const std::string kind = name.substr(0, digit - 1);
    if (kind == "LEMMA") return "Lemma " + number;
    if (kind == "THEOREM") return "Theorem " + number;
    if (kind == "COROLLARY") return "Corollary " + number;
    if (kind == "REMARK") return "Remark " + number;
    if (kind == "MU_AXIOMS") return "Section " + number;
    return "Eq. " + number;
}

inline std::vector<CatalogEntry> statement_catalog() {
    using S = StatementId;
    return {
        {S::ROTFELD_1_1, "Delta(1+rho|x+y|^p) <= Delta(1+rho|x|^p) Delta(1+rho|y|^p)", "rho>0, p in (0,1]", "x, y arbitrary"},
        {S::GARG_AUJLA_1_2, "Lambda_t(1+f(|x+y|)) <= Lambda_t(1+f(|x|)) Lambda_t(1+f(|y|))", "f", "f nonnegative concave, f(0)=0"},
        {S::POWER_1_3, "prod_{j<=k} s_j(|x+y|^r) <= prod_{j<=k} s_j(1+|x|^r) s_j(1+|y|^r)", "r in [1,2]", "x, y arbitrary"},
        {S::HOLDER_1_4, "prod_{j<=k} (1-s_j(P)^r) >= prod_{j<=k} prod_i (1-s_j(x_i)^{r p_i})^{1/p_i}", "r>=1, p_1..p_m", "contractions, sum 1/p_i = 1"},
        {S::MU_AXIOMS_2, "mu(x*x)=mu(xx*), mu(uxv)<=|u|mu(x)|v|, mu(f(x))=f(mu(x)), Lambda(x^a)=Lambda(x)^a, Lambda(xy)<=Lambda(x)Lambda(y)", "f, alpha>0", "f increasing, f(0)>=0"},
        {S::LEMMA_3_1, "mu(1+a)=1+mu(a); [[a,x],[x*,b]]>=0 iff x=a^1/2 w b^1/2, |w|<=1", "", "a, b positive"},
        {S::LEMMA_3_2, "Lambda(y^p x^p y^p) <= Lambda((yxy)^p) for p<=1, >= for p>=1", "p>0", "x, y positive"},
        {S::THEOREM_3_3, "Lambda_t(|x+y|^r) <= Lambda_t(1+|x|^r) Lambda_t(1+|y|^r); Delta form", "r in [1,2]", "x, y arbitrary"},
        {S::LEMMA_4_1, "mu_s(1-|x|) = 1-mu^l_{1-s}(|x|); mu^l_s(1-|x|) = 1-mu_{1-s}(|x|)", "", "x contraction"},
        {S::LEMMA_4_2, "mu_t(1-|x|) <= mu_t(1-x)", "", "x self-adjoint contraction"},
        {S::LEMMA_4_3, "int_0^t log(1-mu_s(|xy|^r)) >= int_0^t log(1-mu_s(|x|^r|y*|^r)); tail form with mu^l", "r>=1", "x, y contractions"},
        {S::LEMMA_4_5, "mu^l head form, mu tail form, Delta(1-|xy|^r) >= Delta(1-||x|^r|y*|^r|)", "r>=1", "x, y contractions"},
        {S::THEOREM_4_6, "int_0^t log(1-mu_s(|P|)^r) >= sum (1/p_i) int_0^t log(1-mu_s(|x_i|)^{r p_i}); tail form with mu^l", "r>=1, p_1..p_m", "contractions, sum 1/p_i = 1"},
        {S::COROLLARY_4_7, "r=1 case; if P=P*, int log mu^l(1-P) >= int log mu^l(1-|P|) >= sum ...", "p_1..p_m", "contractions, sum 1/p_i = 1"},
        {S::REMARK_4_8, "Delta(1-|P|^r) >= prod_i Delta(1-|x_i|^{r p_i})^{1/p_i}, and at r=1", "r>=1, p_1..p_m", "contractions, sum 1/p_i = 1"},
        {S::NEGATIVE_CONTROL, "THEOREM_3_3 with the relation reversed (expected to fail)", "r>0", "x, y arbitrary"},
    };
}

} // namespace logmajor
