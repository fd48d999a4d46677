#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "errors.hpp"
#include "inequalities.hpp"
#include "linalg.hpp"
#include "mu.hpp"
#include "oracles.hpp"
#include "sampler.hpp"
#include "serialize.hpp"
#include "witness.hpp"

namespace logmajor {

inline constexpr std::string_view version = "1.0.0";
inline constexpr std::uint64_t default_seed = 42;

struct SuiteConfig {
    std::vector<StatementId> statements; // empty: every statement except the negative control
    std::vector<std::size_t> dims;       // empty: default dims plus an n = 1 smoke cell
    std::size_t trials = 200;
    std::uint64_t seed = default_seed;
    double tolerance = default_tolerance;
    bool exploratory = false;
    std::filesystem::path out = "logmajor-out";
    unsigned threads = 0; // 0: hardware concurrency

    void validate() const {
        if (trials < 1) throw ConfigError("trials must be >= 1");
        for (auto n : dims)
            if (n < 1 || n > 256) throw ConfigError("dims must lie in 1..256, got " + std::to_string(n));
        if (!(tolerance > 0) || !std::isfinite(tolerance)) throw ConfigError("tolerance must be positive");
    }
};

inline const std::vector<std::size_t>& default_dims() {
    static const std::vector<std::size_t> dims{2, 3, 4, 8, 16};
    return dims;
}

namespace detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split_list(std::string_view s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        const auto comma = s.find(',', start);
        auto item = trim(s.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (!item.empty()) out.push_back(std::move(item));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

template <typename T>
T parse_number(std::string_view text, std::string_view what) {
    T v{};
    const auto s = trim(text);
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw ConfigError(std::string(what) + ": cannot parse '" + s + "'");
    return v;
}

} // namespace detail

inline std::vector<StatementId> parse_statement_list(std::string_view text) {
    std::vector<StatementId> out;
    for (const auto& name : detail::split_list(text)) {
        auto id = parse_statement(name);
        if (!id) throw ConfigError("unknown statement '" + name + "'");
        out.push_back(*id);
    }
    return out;
}

inline std::vector<std::size_t> parse_dims(std::string_view text) {
    std::vector<std::size_t> out;
    for (const auto& item : detail::split_list(text)) out.push_back(detail::parse_number<std::size_t>(item, "dims"));
    if (out.empty()) throw ConfigError("dims list is empty");
    return out;
}

inline bool parse_bool(std::string_view text, std::string_view what) {
    const auto s = detail::trim(text);
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw ConfigError(std::string(what) + ": expected true or false, got '" + s + "'");
}

/// Flat config grammar: one `key = value` per line; blank lines and `#` comments ignored.
/// Keys: statements, dims, trials, seed, tolerance, exploratory, out, threads.
/// Returns the config and whether the file set the seed.
inline std::pair<SuiteConfig, bool> parse_config(std::string_view text, SuiteConfig base = {}) {
    bool seed_set = false;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        if (detail::trim(line).empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
        const auto key = detail::trim(line.substr(0, eq));
        const auto value = detail::trim(line.substr(eq + 1));
        if (key == "statements") base.statements = parse_statement_list(value);
        else if (key == "dims") base.dims = parse_dims(value);
        else if (key == "trials") base.trials = detail::parse_number<std::size_t>(value, "trials");
        else if (key == "seed") {
            base.seed = detail::parse_number<std::uint64_t>(value, "seed");
            seed_set = true;
        } else if (key == "tolerance") base.tolerance = detail::parse_number<double>(value, "tolerance");
        else if (key == "exploratory") base.exploratory = parse_bool(value, "exploratory");
        else if (key == "out") base.out = value;
        else if (key == "threads") base.threads = detail::parse_number<unsigned>(value, "threads");
        else throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    return {base, seed_set};
}

/// Seed of last resort from LOGMAJOR_SEED, else the built-in default.
inline std::uint64_t environment_seed() {
    if (const char* env = std::getenv("LOGMAJOR_SEED"); env && *env)
        return detail::parse_number<std::uint64_t>(env, "LOGMAJOR_SEED");
    return default_seed;
}

/// One grid cell: a statement at fixed dimension and parameters.
struct Cell {
    StatementId statement;
    std::size_t n = 1;
    StatementParams params;
    std::string label; // also the sampler purpose tag
    bool exploratory = false;
    bool sampled_exponents = false; // draw a fresh Hoelder tuple per trial
};

namespace detail {

inline std::string format_params_label(StatementId id, const StatementParams& p, std::string_view variant) {
    std::string s;
    auto add = [&](std::string key, double v) { s += "/" + key + "=" + format_double(v); };
    switch (id) {
    case StatementId::MU_AXIOMS_2: add("alpha", p.alpha); break;
    case StatementId::ROTFELD_1_1:
        add("rho", p.rho);
        add("p", p.p);
        break;
    case StatementId::LEMMA_3_2: add("p", p.p); break;
    case StatementId::POWER_1_3:
    case StatementId::THEOREM_3_3:
    case StatementId::NEGATIVE_CONTROL:
    case StatementId::LEMMA_4_3:
    case StatementId::LEMMA_4_5:
        add("r", p.r);
        break;
    case StatementId::HOLDER_1_4:
    case StatementId::THEOREM_4_6:
    case StatementId::COROLLARY_4_7:
    case StatementId::REMARK_4_8:
        if (!p.exponents.empty()) {
            s += "/p=";
            for (std::size_t i = 0; i < p.exponents.size(); ++i) s += (i ? "," : "") + format_double(p.exponents[i]);
        }
        add("r", p.r);
        break;
    default: break;
    }
    if (p.literal) s += "/literal";
    if (!variant.empty()) s += "/" + std::string(variant);
    return s;
}

} // namespace detail

/// Parameter points for one statement, before crossing with dimensions.
inline std::vector<Cell> parameter_points(StatementId id, bool exploratory) {
    std::vector<Cell> out;
    auto add = [&](StatementParams p, bool explore = false, std::string_view variant = {},
                   bool sampled = false) {
        Cell c{id, 0, p, {}, explore, sampled};
        c.params.exploratory = explore;
        c.label = std::string(to_string(id)) + detail::format_params_label(id, c.params, variant);
        out.push_back(std::move(c));
    };
    StatementParams p;
    const std::vector<std::vector<double>> tuples{{2, 2}, {3, 3, 3}, {2, 4, 4}, {4, 4, 4, 4}};
    switch (id) {
    case StatementId::MU_AXIOMS_2:
        for (double a : {0.5, 2.0}) {
            p.alpha = a;
            add(p);
        }
        break;
    case StatementId::ROTFELD_1_1:
        for (double rho : {0.5, 1.0, 2.0})
            for (double q : {0.3, 1.0}) {
                p.rho = rho;
                p.p = q;
                add(p);
            }
        if (exploratory) {
            p.rho = 1;
            p.p = 1.5;
            add(p, true);
        }
        break;
    case StatementId::GARG_AUJLA_1_2:
        add(p);
        break;
    case StatementId::POWER_1_3:
    case StatementId::THEOREM_3_3:
        for (double r : {1.0, 1.25, 1.5, 1.75, 2.0}) {
            p.r = r;
            add(p);
        }
        if (exploratory)
            for (double r : {2.5, 3.0}) {
                p.r = r;
                add(p, true);
            }
        break;
    case StatementId::NEGATIVE_CONTROL:
        p.r = 1;
        add(p);
        break;
    case StatementId::LEMMA_3_1:
    case StatementId::LEMMA_4_1:
    case StatementId::LEMMA_4_2:
        add(p);
        break;
    case StatementId::LEMMA_3_2:
        for (double q : {0.3, 0.7, 1.5, 2.0}) {
            p.p = q;
            add(p);
        }
        break;
    case StatementId::LEMMA_4_3:
    case StatementId::LEMMA_4_5:
        for (double r : {1.0, 1.5, 2.0, 3.0}) {
            p.r = r;
            add(p);
        }
        if (exploratory)
            for (double r : {1.0, 2.0}) {
                p.r = r;
                p.literal = true;
                add(p, true);
                p.literal = false;
            }
        break;
    case StatementId::HOLDER_1_4:
    case StatementId::THEOREM_4_6:
    case StatementId::REMARK_4_8:
        for (const auto& t : tuples)
            for (double r : {1.0, 2.0}) {
                p.exponents = t;
                p.r = r;
                add(p);
            }
        if (id == StatementId::THEOREM_4_6) {
            p.exponents.clear();
            p.r = 1.5;
            add(p, false, "sampled-m3", true);
        }
        break;
    case StatementId::COROLLARY_4_7:
        for (const auto& t : tuples) {
            p.exponents = t;
            p.r = 1;
            add(p);
        }
        break;
    }
    return out;
}

/// Full cell list in canonical order: statements in catalog order, then parameters, then n.
inline std::vector<Cell> build_cells(const SuiteConfig& config) {
    std::vector<StatementId> ids = config.statements;
    if (ids.empty())
        for (auto id : all_statements)
            if (id != StatementId::NEGATIVE_CONTROL) ids.push_back(id);
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    const bool smoke = config.dims.empty();
    const auto& dims = smoke ? default_dims() : config.dims;
    std::vector<Cell> cells;
    for (auto id : ids) {
        const auto points = parameter_points(id, config.exploratory);
        for (std::size_t i = 0; i < points.size(); ++i) {
            std::vector<std::size_t> ns = dims;
            if (smoke && i == 0) ns.insert(ns.begin(), 1);
            for (auto n : ns) {
                Cell c = points[i];
                c.n = n;
                c.label += "/n=" + std::to_string(n);
                cells.push_back(std::move(c));
            }
        }
    }
    return cells;
}

/// Deterministic inputs for trial `trial` of `cell`.
inline Witness generate_witness(const Cell& cell, std::uint64_t master, std::uint64_t trial) {
    const SamplerSeed seed = SamplerSeed::derive(master, trial, cell.label);
    const std::size_t n = cell.n;
    Witness w;
    w.statement = cell.statement;
    w.params = cell.params;
    auto ginibre = [&](const char* tag) { return sample_ginibre(n, seed.child(tag)); };
    auto contraction = [&](const char* tag) { return sample_contraction(n, seed.child(tag)); };
    switch (cell.statement) {
    case StatementId::MU_AXIOMS_2:
        w.params.f = sample_concave(seed.child("f"));
        w.inputs = {{"x", ginibre("x")}, {"y", ginibre("y")}, {"u", ginibre("u")}, {"v", ginibre("v")}};
        break;
    case StatementId::GARG_AUJLA_1_2:
        w.params.f = sample_concave(seed.child("f"));
        w.inputs = {{"x", ginibre("x")}, {"y", ginibre("y")}};
        break;
    case StatementId::ROTFELD_1_1:
    case StatementId::POWER_1_3:
    case StatementId::THEOREM_3_3:
    case StatementId::NEGATIVE_CONTROL:
        w.inputs = {{"x", ginibre("x")}, {"y", ginibre("y")}};
        break;
    case StatementId::LEMMA_3_1: {
        const auto a = sample_positive(n, seed.child("a"));
        const auto b = sample_positive(n, seed.child("b"));
        const auto x = psd_power(a, 0.5) * contraction("w") * psd_power(b, 0.5);
        w.inputs = {{"a", a}, {"b", b}, {"x", x}};
        break;
    }
    case StatementId::LEMMA_3_2:
        w.inputs = {{"x", sample_positive(n, seed.child("x"))}, {"y", sample_positive(n, seed.child("y"))}};
        break;
    case StatementId::LEMMA_4_1: {
        // every 4th trial sits on the boundary: a unitary or a partial isometry
        ComplexMatrix x = contraction("x");
        if (trial % 4 == 3) {
            const auto u = sample_haar_unitary(n, seed.child("u"));
            if ((trial / 4) % 2 == 0) {
                x = u;
            } else {
                std::vector<double> d(n);
                for (std::size_t i = 0; i < n; ++i) d[i] = i % 2 == 0 ? 1.0 : 0.0;
                x = u * ComplexMatrix::diagonal(d) * sample_haar_unitary(n, seed.child("v"));
            }
        }
        w.inputs = {{"x", x}};
        break;
    }
    case StatementId::LEMMA_4_2:
        w.inputs = {{"x", sample_selfadjoint_contraction(n, seed.child("x"))}};
        break;
    case StatementId::LEMMA_4_3:
    case StatementId::LEMMA_4_5:
        w.inputs = {{"x", contraction("x")}, {"y", contraction("y")}};
        break;
    case StatementId::HOLDER_1_4:
    case StatementId::THEOREM_4_6:
    case StatementId::COROLLARY_4_7:
    case StatementId::REMARK_4_8: {
        if (cell.sampled_exponents) w.params.exponents = sample_exponents(3, seed.child("p"));
        const std::size_t m = w.params.exponents.size();
        const bool commuting = cell.statement == StatementId::COROLLARY_4_7 && trial % 2 == 1;
        const auto u = commuting ? sample_haar_unitary(n, seed.child("u")) : ComplexMatrix::identity(n);
        for (std::size_t i = 0; i < m; ++i) {
            const std::string label = "x" + std::to_string(i + 1);
            if (commuting) {
                // commuting self-adjoint tuple: shared eigenbasis, so the product is self-adjoint
                CounterRng rng(seed.child(label));
                std::vector<double> d(n);
                for (auto& v : d) v = rng.uniform(-1.0 + contraction_margin, 1.0 - contraction_margin);
                w.inputs.emplace_back(label, (u * ComplexMatrix::diagonal(d) * u.adjoint()).hermitian_part());
            } else {
                w.inputs.emplace_back(label, sample_contraction(n, seed.child(label)));
            }
        }
        break;
    }
    }
    return w;
}

/// Per-k slack (minimum over all parts at that k); size n.
inline std::vector<double> slack_by_k(const CheckResult& r, std::size_t n) {
    std::vector<double> out(n, pos_inf);
    for (const auto& m : r.margins)
        if (m.k >= 1 && m.k <= n) out[m.k - 1] = std::min(out[m.k - 1], m.slack);
    return out;
}

// ---------------------------------------------------------------- shrinking

using Inputs = std::vector<std::pair<std::string, ComplexMatrix>>;

namespace detail {

inline ComplexMatrix delete_index(const ComplexMatrix& x, std::size_t k) {
    ComplexMatrix y(x.size() - 1);
    for (std::size_t i = 0, a = 0; i < x.size(); ++i) {
        if (i == k) continue;
        for (std::size_t j = 0, b = 0; j < x.size(); ++j) {
            if (j == k) continue;
            y(a, b++) = x(i, j);
        }
        ++a;
    }
    return y;
}

template <typename F>
Inputs map_inputs(const Inputs& in, F f) {
    Inputs out;
    for (const auto& [label, m] : in) out.emplace_back(label, f(m));
    return out;
}

inline bool has_imaginary(const Inputs& in) {
    for (const auto& [label, m] : in)
        for (std::size_t i = 0; i < m.size(); ++i)
            for (std::size_t j = 0; j < m.size(); ++j)
                if (m(i, j).imag() != 0.0) return true;
    return false;
}

inline double round3(double v) { return std::round(v * 1000.0) / 1000.0; }

inline bool is_rounded(const Inputs& in) {
    for (const auto& [label, m] : in)
        for (std::size_t i = 0; i < m.size(); ++i)
            for (std::size_t j = 0; j < m.size(); ++j)
                if (round3(m(i, j).real()) != m(i, j).real() || round3(m(i, j).imag()) != m(i, j).imag())
                    return false;
    return true;
}

} // namespace detail

inline constexpr int shrink_scale_budget = 10;

/// Greedy shrink against an arbitrary "still fails" predicate. Steps, tried in order:
/// delete a row/column pair, zero imaginary parts, round to 3 decimals, scale toward
/// zero, scale toward the identity. Each accepted step strictly decreases
/// (n, scale budget, has imaginary part, unrounded) lexicographically.
inline Inputs shrink_inputs(Inputs inputs, const std::function<bool(const Inputs&)>& still_fails) {
    int budget = shrink_scale_budget;
    auto accept = [&](const Inputs& candidate) {
        try {
            return still_fails(candidate);
        } catch (const Error&) {
            return false; // candidate left the statement's domain
        }
    };
    bool progress = true;
    while (progress) {
        progress = false;
        const std::size_t n = inputs.front().second.size();
        if (n > 1) {
            for (std::size_t k = 0; k < n && !progress; ++k) {
                auto candidate = detail::map_inputs(inputs, [&](const ComplexMatrix& m) { return detail::delete_index(m, k); });
                if (accept(candidate)) {
                    inputs = std::move(candidate);
                    progress = true;
                }
            }
            if (progress) continue;
        }
        if (detail::has_imaginary(inputs)) {
            auto candidate = detail::map_inputs(inputs, [](const ComplexMatrix& m) {
                ComplexMatrix r = m;
                for (std::size_t i = 0; i < r.size(); ++i)
                    for (std::size_t j = 0; j < r.size(); ++j) r(i, j) = r(i, j).real();
                return r;
            });
            if (accept(candidate)) {
                inputs = std::move(candidate);
                progress = true;
                continue;
            }
        }
        if (!detail::is_rounded(inputs)) {
            auto candidate = detail::map_inputs(inputs, [](const ComplexMatrix& m) {
                ComplexMatrix r = m;
                for (std::size_t i = 0; i < r.size(); ++i)
                    for (std::size_t j = 0; j < r.size(); ++j)
                        r(i, j) = Complex(detail::round3(r(i, j).real()), detail::round3(r(i, j).imag()));
                return r;
            });
            if (accept(candidate)) {
                inputs = std::move(candidate);
                progress = true;
                continue;
            }
        }
        if (budget > 0) {
            auto toward_zero = detail::map_inputs(inputs, [](const ComplexMatrix& m) { return m * Complex(0.5); });
            auto toward_identity = detail::map_inputs(inputs, [](const ComplexMatrix& m) {
                ComplexMatrix r = m * Complex(0.5);
                for (std::size_t i = 0; i < r.size(); ++i) r(i, i) += 0.5;
                return r;
            });
            for (auto* candidate : {&toward_zero, &toward_identity}) {
                if (accept(*candidate)) {
                    inputs = std::move(*candidate);
                    --budget;
                    progress = true;
                    break;
                }
            }
        }
    }
    return inputs;
}

/// Shrinks a failing witness for its own statement; returns it unchanged if it passes.
inline Witness shrink(const Witness& witness, double tolerance = default_tolerance) {
    auto fails = [&](const Inputs& in) {
        Witness w = witness;
        w.inputs = in;
        return !evaluate(w, tolerance).pass;
    };
    Witness out = witness;
    if (!fails(witness.inputs)) return out;
    out.inputs = shrink_inputs(witness.inputs, fails);
    return out;
}

// ---------------------------------------------------------------- suite

struct CellSummary {
    Cell cell;
    std::size_t trials = 0;
    std::size_t passed = 0;
    std::size_t failed = 0;
    double worst_slack = pos_inf;
};

struct FailureRecord {
    std::string statement;
    std::string cell;
    std::size_t n = 0;
    SeedOrigin origin;
    double worst_slack = 0;
    bool exploratory = false;
    std::string error; // nonempty when the check threw
    std::optional<WitnessRecord> witness;
    std::optional<WitnessRecord> shrunk;
    double shrunk_worst_slack = 0;
};

struct TrialMargins {
    std::size_t cell = 0;
    std::size_t trial = 0;
    std::vector<double> slack; // per k
};

struct SuiteReport {
    SuiteConfig config;
    std::string kind = "run"; // or "selftest"
    std::vector<CellSummary> cells;
    std::vector<FailureRecord> failures;
    std::vector<TrialMargins> margins;
    double wall_seconds = 0;
    unsigned threads_used = 1;

    /// True iff every non-exploratory cell passed.
    bool all_pass() const {
        for (const auto& c : cells)
            if (!c.cell.exploratory && c.failed > 0) return false;
        return true;
    }
};

inline constexpr std::size_t max_shrunk_per_cell = 3;

namespace detail {

struct TrialOutcome {
    bool pass = false;
    double worst_slack = 0;
    std::string error;
    std::vector<double> slack;
};

template <typename Job>
void parallel_for(std::size_t count, unsigned threads, Job job) {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) job(i);
    };
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
}

inline unsigned resolve_threads(unsigned requested) {
    if (requested > 0) return requested;
    return std::max(1u, std::thread::hardware_concurrency());
}

} // namespace detail

inline SuiteReport run_suite(const SuiteConfig& config) {
    config.validate();
    const auto start = std::chrono::steady_clock::now();
    SuiteReport report;
    report.config = config;
    report.threads_used = detail::resolve_threads(config.threads);
    const auto cells = build_cells(config);

    std::vector<detail::TrialOutcome> outcomes(cells.size() * config.trials);
    detail::parallel_for(outcomes.size(), report.threads_used, [&](std::size_t i) {
        const auto& cell = cells[i / config.trials];
        const std::uint64_t trial = i % config.trials;
        auto& out = outcomes[i];
        try {
            const auto r = evaluate(generate_witness(cell, config.seed, trial), config.tolerance);
            out.pass = r.pass;
            out.worst_slack = r.worst_slack;
            out.slack = slack_by_k(r, cell.n);
        } catch (const std::exception& e) {
            out.pass = false;
            out.worst_slack = neg_inf;
            out.error = e.what();
        }
    });

    for (std::size_t c = 0; c < cells.size(); ++c) {
        CellSummary s{cells[c]};
        s.trials = config.trials;
        std::size_t shrunk = 0;
        for (std::size_t t = 0; t < config.trials; ++t) {
            auto& o = outcomes[c * config.trials + t];
            s.worst_slack = std::min(s.worst_slack, o.worst_slack);
            report.margins.push_back({c, t, std::move(o.slack)});
            if (o.pass) {
                ++s.passed;
                continue;
            }
            ++s.failed;
            FailureRecord f;
            f.statement = std::string(to_string(cells[c].statement));
            f.cell = cells[c].label;
            f.n = cells[c].n;
            f.origin = {config.seed, t, cells[c].label};
            f.worst_slack = o.worst_slack;
            f.exploratory = cells[c].exploratory;
            f.error = o.error;
            if (shrunk < max_shrunk_per_cell) {
                ++shrunk;
                const auto w = generate_witness(cells[c], config.seed, t);
                f.witness = WitnessRecord{w, f.origin};
                if (o.error.empty()) {
                    const auto small = shrink(w, config.tolerance);
                    f.shrunk = WitnessRecord{small, f.origin};
                    f.shrunk_worst_slack = evaluate(small, config.tolerance).worst_slack;
                }
            }
            report.failures.push_back(std::move(f));
        }
        report.cells.push_back(std::move(s));
    }
    report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

// ---------------------------------------------------------------- report files

inline Json to_json(const SuiteConfig& c) {
    Json statements = Json::array();
    for (auto id : c.statements) statements.push_back(std::string(to_string(id)));
    return Json{{"statements", statements}, {"dims", c.dims},       {"trials", c.trials},
                {"seed", c.seed},             {"tolerance", c.tolerance}, {"exploratory", c.exploratory}};
}

inline std::string witness_file_name(const FailureRecord& f, bool shrunk) {
    std::string name = f.cell;
    for (char& ch : name)
        if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '.' && ch != '-' && ch != '_') ch = '_';
    return name + "_trial" + std::to_string(f.origin.trial) + (shrunk ? "_shrunk" : "") + ".txt";
}

inline Json to_json(const SuiteReport& r) {
    Json j;
    j["tool"] = "logmajor";
    j["version"] = std::string(version);
    j["kind"] = r.kind;
    j["config"] = to_json(r.config);

    Json cells = Json::array();
    std::vector<std::string> order;
    Json per_statement = Json::object();
    for (const auto& c : r.cells) {
        const std::string id(to_string(c.cell.statement));
        cells.push_back(Json{{"statement", id},
                             {"cell", c.cell.label},
                             {"n", c.cell.n},
                             {"params", to_json(c.cell.params)},
                             {"exploratory", c.cell.exploratory},
                             {"trials", c.trials},
                             {"pass", c.passed},
                             {"fail", c.failed},
                             {"worstSlack", extended_number(c.worst_slack)}});
        if (!per_statement.contains(id))
            per_statement[id] = Json{{"cells", 0}, {"trials", 0}, {"fail", 0}, {"worstSlack", "inf"}};
        auto& s = per_statement[id];
        s["cells"] = s["cells"].get<std::size_t>() + 1;
        s["trials"] = s["trials"].get<std::size_t>() + c.trials;
        s["fail"] = s["fail"].get<std::size_t>() + c.failed;
        if (!c.cell.exploratory) {
            const auto& w = s["worstSlack"];
            const double current = w.is_string() ? (w.get<std::string>() == "-inf" ? neg_inf : pos_inf) : w.get<double>();
            s["worstSlack"] = extended_number(std::min(current, c.worst_slack));
        }
    }
    j["cells"] = std::move(cells);
    j["statements"] = std::move(per_statement);

    Json failures = Json::array();
    for (const auto& f : r.failures) {
        Json fj{{"statement", f.statement},
                {"cell", f.cell},
                {"n", f.n},
                {"seed", Json{{"master", f.origin.master}, {"trial", f.origin.trial}, {"purpose", f.origin.purpose}}},
                {"worstSlack", extended_number(f.worst_slack)},
                {"exploratory", f.exploratory}};
        if (!f.error.empty()) fj["error"] = f.error;
        if (f.witness) fj["witnessFile"] = "witnesses/" + witness_file_name(f, false);
        if (f.shrunk) {
            fj["shrunkWitnessFile"] = "witnesses/" + witness_file_name(f, true);
            fj["shrunkN"] = f.shrunk->witness.dimension();
            fj["shrunkWorstSlack"] = extended_number(f.shrunk_worst_slack);
        }
        failures.push_back(std::move(fj));
    }
    j["failures"] = std::move(failures);

    std::size_t trials = 0, failed = 0;
    for (const auto& c : r.cells) {
        trials += c.trials;
        failed += c.failed;
    }
    j["summary"] = Json{{"cells", r.cells.size()}, {"trials", trials}, {"failures", failed}, {"pass", r.all_pass()}};
    j["timing"] = Json{{"wallSeconds", r.wall_seconds}, {"threads", r.threads_used}};
    return j;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

inline std::string margins_csv(const SuiteReport& r) {
    std::string out = "statement,cell,n,trial,k,slack\n";
    for (const auto& m : r.margins) {
        const auto& cell = r.cells[m.cell].cell;
        const std::string prefix = std::string(to_string(cell.statement)) + "," + cell.label + "," +
                                   std::to_string(cell.n) + "," + std::to_string(m.trial) + ",";
        for (std::size_t k = 0; k < m.slack.size(); ++k)
            out += prefix + std::to_string(k + 1) + "," + format_double(m.slack[k]) + "\n";
    }
    return out;
}

/// Writes report.json, margins.csv and witnesses/ under `dir`.
inline void write_report(const SuiteReport& r, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir / "witnesses");
    write_file(dir / "report.json", to_json(r).dump(2) + "\n");
    write_file(dir / "margins.csv", margins_csv(r));
    for (const auto& f : r.failures) {
        if (f.witness) write_file(dir / "witnesses" / witness_file_name(f, false), to_text(*f.witness));
        if (f.shrunk) write_file(dir / "witnesses" / witness_file_name(f, true), to_text(*f.shrunk));
    }
}

/// Margins one per line, as printed by `replay`.
inline std::string format_margins(const CheckResult& r) {
    std::ostringstream out;
    out << "statement " << to_string(r.statement) << "\n";
    for (const auto& m : r.margins)
        out << m.part << " k=" << m.k << " t=" << format_double(m.t) << " lhs=" << format_double(m.lhs)
            << " rhs=" << format_double(m.rhs) << " slack=" << format_double(m.slack) << "\n";
    out << "worstSlack " << format_double(r.worst_slack) << "\n" << (r.pass ? "PASS" : "FAIL") << "\n";
    return out.str();
}

/// Re-evaluates a witness file for `statement`.
inline CheckResult replay(StatementId statement, std::string_view witness_text,
                          double tolerance = default_tolerance) {
    auto record = parse_witness(witness_text);
    if (record.witness.statement != statement)
        throw ConfigError("witness is for " + std::string(to_string(record.witness.statement)) + ", not " +
                          std::string(to_string(statement)));
    return evaluate(record.witness, tolerance);
}

/// Golden draws for seed 42, n = 4: one record per sampler.
inline std::string golden_draws() {
    const std::uint64_t master = 42;
    const std::size_t n = 4;
    std::string out = "# golden draws: seed 42, n = 4\n";
    auto record = [&](const char* name, const ComplexMatrix& m) {
        out += "sampler ";
        out += name;
        out += "\n" + to_text(m);
    };
    record("ginibre", sample_ginibre(n, SamplerSeed::derive(master, 0, "golden/ginibre")));
    record("haar_unitary", sample_haar_unitary(n, SamplerSeed::derive(master, 0, "golden/haar_unitary")));
    record("contraction", sample_contraction(n, SamplerSeed::derive(master, 0, "golden/contraction")));
    record("positive", sample_positive(n, SamplerSeed::derive(master, 0, "golden/positive")));
    record("selfadjoint_contraction",
           sample_selfadjoint_contraction(n, SamplerSeed::derive(master, 0, "golden/selfadjoint_contraction")));
    const auto f = sample_concave(SamplerSeed::derive(master, 0, "golden/concave"));
    out += "sampler concave\n" + f.describe() + "\n";
    const auto p = sample_exponents(3, SamplerSeed::derive(master, 0, "golden/exponents"));
    out += "sampler exponents\n";
    for (std::size_t i = 0; i < p.size(); ++i) out += (i ? " " : "") + format_double(p[i]);
    out += "\n";
    return out;
}

// ---------------------------------------------------------------- selftest

namespace detail {

inline double relative_gap(double a, double b) {
    if (a == b) return 0;
    return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

} // namespace detail

/// Oracle-equivalence smoke gate at small dimensions.
inline SuiteReport selftest(std::uint64_t seed = default_seed, std::size_t trials = 50) {
    const auto start = std::chrono::steady_clock::now();
    SuiteReport report;
    report.kind = "selftest";
    report.config.seed = seed;
    report.config.trials = trials;

    auto run_cell = [&](std::string name, std::size_t n, const std::function<double(SamplerSeed, std::size_t)>& gap,
                        double tolerance) {
        Cell cell{StatementId::MU_AXIOMS_2, n, {}, "selftest/" + name + "/n=" + std::to_string(n)};
        CellSummary s{cell};
        s.trials = trials;
        s.worst_slack = pos_inf;
        for (std::size_t t = 0; t < trials; ++t) {
            double slack = neg_inf;
            std::string error;
            try {
                slack = -gap(SamplerSeed::derive(seed, t, cell.label), t);
            } catch (const std::exception& e) {
                error = e.what();
            }
            s.worst_slack = std::min(s.worst_slack, slack);
            if (error.empty() && slack >= -tolerance) {
                ++s.passed;
            } else {
                ++s.failed;
                FailureRecord f;
                f.statement = "SELFTEST";
                f.cell = cell.label;
                f.n = n;
                f.origin = {seed, t, cell.label};
                f.worst_slack = slack;
                f.error = error;
                report.failures.push_back(std::move(f));
            }
        }
        report.cells.push_back(std::move(s));
    };

    for (std::size_t n = 1; n <= 6; ++n)
        run_cell("mu-counting", n, [&](SamplerSeed s, std::size_t) {
            const auto x = sample_ginibre(n, s);
            const auto a = mu(x), b = oracle::mu_by_counting(x);
            const auto al = mu_left(x), bl = oracle::mu_left_by_counting(x);
            double g = 0;
            for (std::size_t k = 0; k < n; ++k)
                g = std::max({g, std::abs(a.values[k] - b.values[k]), std::abs(al.values[k] - bl.values[k])});
            return g;
        }, 1e-10);

    for (std::size_t n : {1, 2, 4, 8}) {
        run_cell("lambda-partial-products", n, [&](SamplerSeed s, std::size_t t) {
            auto x = sample_ginibre(n, s);
            if (t % 5 == 4) // planted zero column
                for (std::size_t i = 0; i < n; ++i) x(i, n - 1) = 0;
            const auto curve = lambda_curve(x);
            const auto sv = svd(x).values;
            double g = 0, prod = 1;
            for (std::size_t k = 1; k <= n; ++k) {
                prod *= sv[k - 1];
                const double expected = prod < log_floor ? 0.0 : std::pow(prod, 1.0 / static_cast<double>(n));
                const double got = curve.at(k) == neg_inf ? 0.0 : std::exp(curve.at(k));
                g = std::max(g, detail::relative_gap(got, expected));
            }
            return g;
        }, 1e-10);
    }

    for (std::size_t n = 1; n <= 4; ++n)
        run_cell("determinant-cofactor", n, [&](SamplerSeed s, std::size_t t) {
            auto x = sample_ginibre(n, s);
            if (t % 5 == 4)
                for (std::size_t i = 0; i < n; ++i) x(i, 0) = 0;
            const double d = fk_determinant(x);
            const double e = oracle::determinant_root(x);
            if (t % 5 == 4) return d == 0.0 ? 0.0 : 1.0;
            return std::abs(d - e) / std::max(e, 1e-300);
        }, 1e-9);

    for (std::size_t n : {2, 3, 5, 8})
        run_cell("contraction-identities", n, [&](SamplerSeed s, std::size_t t) {
            const auto x = t % 4 == 3 ? sample_haar_unitary(n, s) : sample_contraction(n, s);
            return -check_contraction_identities(x, false).worst_slack;
        }, 1e-10);

    run_cell("rearrangement", 1, [&](SamplerSeed s, std::size_t) {
        CounterRng rng(s);
        const std::size_t len = 1 + rng.next_u64() % 32;
        std::vector<double> samples(len);
        for (auto& v : samples) v = rng.gaussian();
        const auto a = rearrange_function(samples);
        const auto b = mu(ComplexMatrix::diagonal(samples));
        return a.values == b.values ? 0.0 : 1.0;
    }, 0.0);

    report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

} // namespace logmajor
