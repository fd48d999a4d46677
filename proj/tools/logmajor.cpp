// logmajor command-line entry point: run, replay, selftest, catalog, golden.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include <logmajor/harness.hpp>

namespace {

using namespace logmajor;

constexpr int exit_pass = 0;
constexpr int exit_fail = 1;
constexpr int exit_usage = 2;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void print_summary(const SuiteReport& r) {
    for (const auto& c : r.cells) {
        if (c.failed == 0) continue;
        std::printf("FAIL %s: %zu/%zu trials failed, worst slack %s%s\n", c.cell.label.c_str(), c.failed, c.trials,
                    format_double(c.worst_slack).c_str(), c.cell.exploratory ? " (exploratory)" : "");
    }
    std::size_t trials = 0, failed = 0;
    for (const auto& c : r.cells) {
        trials += c.trials;
        failed += c.failed;
    }
    std::printf("%s: %zu cells, %zu trials, %zu failures, %.1fs\n", r.all_pass() ? "PASS" : "FAIL", r.cells.size(),
                trials, failed, r.wall_seconds);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"logmajor: logarithmic submajorization and determinant inequality checker"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "sweep statements over the parameter grid");
    std::string config_path, statements, dims, out_dir;
    std::size_t trials = 0;
    std::uint64_t seed = 0;
    double tolerance = 0;
    unsigned threads = 0;
    bool exploratory = false;
    run->add_option("--config", config_path, "flat key = value config file");
    run->add_option("--statements", statements, "comma-separated statement ids");
    run->add_option("--dims", dims, "comma-separated dimensions");
    auto* trials_opt = run->add_option("--trials", trials, "trials per cell");
    auto* seed_opt = run->add_option("--seed", seed, "master seed");
    auto* tol_opt = run->add_option("--tolerance", tolerance, "slack tolerance");
    run->add_flag("--exploratory", exploratory, "add out-of-range and literal-form cells (never affect the verdict)");
    run->add_option("--out", out_dir, "output directory");
    auto* threads_opt = run->add_option("--threads", threads, "worker threads (0: all cores)");

    auto* rep = app.add_subcommand("replay", "re-evaluate a witness file");
    std::string replay_statement, replay_file;
    double replay_tol = default_tolerance;
    rep->add_option("STATEMENT", replay_statement)->required();
    rep->add_option("WITNESS_FILE", replay_file)->required();
    rep->add_option("--tolerance", replay_tol, "slack tolerance");

    auto* self = app.add_subcommand("selftest", "oracle-equivalence smoke gate");
    std::uint64_t self_seed = default_seed;
    self->add_option("--seed", self_seed, "master seed");

    auto* cat = app.add_subcommand("catalog", "print the statement catalog as JSON");
    auto* gold = app.add_subcommand("golden", "print the golden sampler draws");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_pass : exit_usage;
    }

    try {
        if (*run) {
            SuiteConfig config;
            bool seed_from_config = false;
            if (!config_path.empty()) std::tie(config, seed_from_config) = parse_config(read_file(config_path));
            if (!seed_from_config) config.seed = environment_seed();
            if (!statements.empty()) config.statements = parse_statement_list(statements);
            if (!dims.empty()) config.dims = parse_dims(dims);
            if (*trials_opt) config.trials = trials;
            if (*seed_opt) config.seed = seed;
            if (*tol_opt) config.tolerance = tolerance;
            if (exploratory) config.exploratory = true;
            if (!out_dir.empty()) config.out = out_dir;
            if (*threads_opt) config.threads = threads;
            const auto report = run_suite(config);
            write_report(report, config.out);
            print_summary(report);
            std::printf("report written to %s\n", (config.out / "report.json").string().c_str());
            return report.all_pass() ? exit_pass : exit_fail;
        }
        if (*rep) {
            const auto id = parse_statement(replay_statement);
            if (!id) throw ConfigError("unknown statement '" + replay_statement + "'");
            const auto result = replay(*id, read_file(replay_file), replay_tol);
            std::fputs(format_margins(result).c_str(), stdout);
            return result.pass ? exit_pass : exit_fail;
        }
        if (*self) {
            const auto report = selftest(self_seed);
            for (const auto& c : report.cells)
                std::printf("%s %s worst %s\n", c.failed == 0 ? "ok  " : "FAIL", c.cell.label.c_str(),
                            format_double(c.worst_slack).c_str());
            print_summary(report);
            return report.all_pass() ? exit_pass : exit_fail;
        }
        if (*cat) {
            std::puts(catalog_json().dump(2).c_str());
            return exit_pass;
        }
        if (*gold) {
            std::fputs(golden_draws().c_str(), stdout);
            return exit_pass;
        }
    } catch (const ParseError& e) {
        std::fprintf(stderr, "parse error: %s\n", e.what());
        return exit_usage;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return exit_usage;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_usage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_fail;
    }
    return exit_usage;
}
