#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "logmajor/harness.hpp"

using namespace logmajor;
namespace fs = std::filesystem;

namespace {

std::string fixture(const std::string& name) {
    std::ifstream in(std::string(LOGMAJOR_FIXTURES) + "/" + name, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("logmajor-harness-" + name);
    fs::remove_all(dir);
    return dir;
}

int cli(const std::string& args) {
    const std::string cmd = std::string(LOGMAJOR_CLI) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Json without_timing(Json j) {
    j.erase("timing");
    return j;
}

} // namespace

// ---------------------------------------------------------------- config

TEST(Config, ParsesEveryKey) {
    const auto [c, seed_set] = parse_config("# comment\n"
                                            "statements = THEOREM_3_3, LEMMA_4_1\n"
                                            "dims = 2,5\n"
                                            "trials = 7  # inline\n"
                                            "seed = 99\n"
                                            "tolerance = 1e-6\n"
                                            "exploratory = true\n"
                                            "out = somewhere\n"
                                            "threads = 2\n");
    EXPECT_TRUE(seed_set);
    EXPECT_EQ(c.statements, (std::vector<StatementId>{StatementId::THEOREM_3_3, StatementId::LEMMA_4_1}));
    EXPECT_EQ(c.dims, (std::vector<std::size_t>{2, 5}));
    EXPECT_EQ(c.trials, 7u);
    EXPECT_EQ(c.seed, 99u);
    EXPECT_EQ(c.tolerance, 1e-6);
    EXPECT_TRUE(c.exploratory);
    EXPECT_EQ(c.out, fs::path("somewhere"));
    EXPECT_EQ(c.threads, 2u);
}

TEST(Config, UnknownKeyNamesTheLine) {
    try {
        parse_config("trials = 3\nbogus = 1\n");
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("bogus"), std::string::npos);
    }
}

TEST(Config, BadValues) {
    EXPECT_THROW(parse_config("trials = many\n"), ConfigError);
    EXPECT_THROW(parse_config("statements = NOPE\n"), ConfigError);
    EXPECT_THROW(parse_config("exploratory = maybe\n"), ConfigError);
    EXPECT_THROW(parse_config("just a line\n"), ConfigError);
    SuiteConfig c;
    c.dims = {0};
    EXPECT_THROW(c.validate(), ConfigError);
    c.dims = {300};
    EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Config, SeedAbsentFromFile) {
    EXPECT_FALSE(parse_config("trials = 3\n").second);
}

TEST(Config, EnvironmentSeed) {
    ::unsetenv("LOGMAJOR_SEED");
    EXPECT_EQ(environment_seed(), default_seed);
    ::setenv("LOGMAJOR_SEED", "1234", 1);
    EXPECT_EQ(environment_seed(), 1234u);
    ::unsetenv("LOGMAJOR_SEED");
}

TEST(Config, SeedPrecedenceThroughCli) {
    // flag beats file beats environment; the echoed config records the winner
    const auto dir = scratch("seed");
    fs::create_directories(dir);
    {
        std::ofstream(dir / "a.conf") << "statements = LEMMA_4_2\ndims = 2\ntrials = 1\nseed = 7\n";
        std::ofstream(dir / "b.conf") << "statements = LEMMA_4_2\ndims = 2\ntrials = 1\n";
    }
    auto seed_of = [&](const std::string& args, const std::string& env) {
        const auto out = dir / "out";
        fs::remove_all(out);
        const std::string cmd = env + " " + LOGMAJOR_CLI + " run " + args + " --out " + out.string() + " >/dev/null 2>&1";
        EXPECT_EQ(std::system(cmd.c_str()), 0) << cmd;
        std::ifstream in(out / "report.json");
        return Json::parse(in)["config"]["seed"].get<std::uint64_t>();
    };
    const std::string a = "--config " + (dir / "a.conf").string(), b = "--config " + (dir / "b.conf").string();
    EXPECT_EQ(seed_of(a + " --seed 3", "LOGMAJOR_SEED=5"), 3u);
    EXPECT_EQ(seed_of(a, "LOGMAJOR_SEED=5"), 7u);
    EXPECT_EQ(seed_of(b, "LOGMAJOR_SEED=5"), 5u);
    EXPECT_EQ(seed_of(b, "env -u LOGMAJOR_SEED"), 42u);
    fs::remove_all(dir);
}

// ---------------------------------------------------------------- cells

TEST(Cells, DefaultsCoverEveryStatementButTheControl) {
    const auto cells = build_cells(SuiteConfig{});
    std::set<StatementId> seen;
    std::set<std::string> labels;
    for (const auto& c : cells) {
        seen.insert(c.statement);
        EXPECT_TRUE(labels.insert(c.label).second) << "duplicate label " << c.label;
        EXPECT_FALSE(c.exploratory);
    }
    EXPECT_EQ(seen.size(), all_statements.size() - 1);
    EXPECT_EQ(seen.count(StatementId::NEGATIVE_CONTROL), 0u);
}

TEST(Cells, SmokeCellOnlyWithDefaultDims) {
    SuiteConfig c;
    c.statements = {StatementId::THEOREM_3_3};
    const auto defaults = build_cells(c);
    std::size_t smoke = 0;
    for (const auto& cell : defaults) smoke += cell.n == 1;
    EXPECT_EQ(smoke, 1u);
    c.dims = {3};
    for (const auto& cell : build_cells(c)) EXPECT_EQ(cell.n, 3u);
}

TEST(Cells, ExploratoryFlagAddsCells) {
    SuiteConfig c;
    c.statements = {StatementId::THEOREM_3_3, StatementId::LEMMA_4_3};
    c.dims = {2};
    const auto base = build_cells(c);
    c.exploratory = true;
    const auto more = build_cells(c);
    EXPECT_GT(more.size(), base.size());
    std::size_t literal = 0;
    for (const auto& cell : more)
        if (cell.exploratory && cell.params.literal) ++literal;
    EXPECT_GE(literal, 1u);
}

TEST(Cells, WitnessGenerationIsDeterministic) {
    for (const auto& cell : build_cells(SuiteConfig{})) {
        if (cell.n > 4) continue;
        const auto a = to_text(WitnessRecord{generate_witness(cell, 9, 3), {}});
        EXPECT_EQ(a, to_text(WitnessRecord{generate_witness(cell, 9, 3), {}})) << cell.label;
    }
}

// ---------------------------------------------------------------- witness files

TEST(WitnessText, RoundTripEveryCell) {
    SuiteConfig c;
    c.dims = {3};
    for (const auto& cell : build_cells(c)) {
        const WitnessRecord rec{generate_witness(cell, 42, 1), SeedOrigin{42, 1, cell.label}};
        const auto text = to_text(rec);
        const auto back = parse_witness(text);
        EXPECT_EQ(to_text(back), text) << cell.label;
        ASSERT_TRUE(back.origin);
        EXPECT_EQ(back.origin->purpose, cell.label);
        EXPECT_EQ(evaluate(back.witness).worst_slack, evaluate(rec.witness).worst_slack) << cell.label;
    }
}

TEST(WitnessText, MalformedReportsLineAndColumn) {
    try {
        parse_witness(fixture("malformed.txt"));
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 5);
        EXPECT_EQ(e.column(), 7);
    }
}

TEST(WitnessText, StructuralErrors) {
    EXPECT_THROW(parse_witness(""), ParseError);
    EXPECT_THROW(parse_witness("statement THEOREM_3_3\n"), ParseError);
    EXPECT_THROW(parse_witness("statement NOPE\ninput x\n1\n1 0\n"), ParseError);
    EXPECT_THROW(parse_witness("statement THEOREM_3_3\nparam q 1\ninput x\n1\n1 0\n"), ParseError);
    EXPECT_THROW(parse_witness("statement THEOREM_3_3\ninput x\n1\n1 0\ninput y\n2\n1 0 0 0\n0 0 1 0\n"),
                 DimensionMismatch);
}

// ---------------------------------------------------------------- replay

TEST(Replay, PassingFixture) {
    const auto r = replay(StatementId::THEOREM_3_3, fixture("theorem_3_3_pass.txt"));
    EXPECT_TRUE(r.pass);
    EXPECT_NEAR(r.worst_slack, 0.307969448051275, 1e-12);
}

TEST(Replay, NegativeControlMatchesOracle) {
    const auto r = replay(StatementId::NEGATIVE_CONTROL, fixture("negative_control.txt"));
    EXPECT_FALSE(r.pass);
    // x + y = diag(0.5, 0.15); rhs factors 1 + x = diag(1.3, 1.1), 1 + y = diag(1.2, 1.05)
    const long double l1 = std::log(0.5L) / 2, l2 = (std::log(0.5L) + std::log(0.15L)) / 2;
    const long double r1 = (std::log(1.3L) + std::log(1.2L)) / 2;
    const long double r2 = r1 + (std::log(1.1L) + std::log(1.05L)) / 2;
    const double oracle = static_cast<double>(std::min(l1 - r1, l2 - r2));
    EXPECT_NEAR(r.worst_slack, oracle, 1e-12);
}

TEST(Replay, StatementMismatch) {
    EXPECT_THROW(replay(StatementId::LEMMA_4_1, fixture("theorem_3_3_pass.txt")), ConfigError);
}

TEST(Replay, FormatEndsWithVerdict) {
    const auto text = format_margins(replay(StatementId::NEGATIVE_CONTROL, fixture("negative_control.txt")));
    EXPECT_EQ(text.substr(text.size() - 5), "FAIL\n");
    EXPECT_NE(text.find("worstSlack -1.58952666534"), std::string::npos);
}

// ---------------------------------------------------------------- shrinking

TEST(Shrink, PlantedBlockShrinksToItsSupport) {
    ComplexMatrix x(8);
    CounterRng rng(SamplerSeed::derive(1, 0, "noise"));
    for (std::size_t i = 0; i < 8; ++i)
        for (std::size_t j = 0; j < 8; ++j) x(i, j) = Complex(0.01 * rng.gaussian(), 0.01 * rng.gaussian());
    x(3, 3) = x(3, 6) = x(6, 3) = x(6, 6) = Complex(1.0, 0.25);
    const auto big = [](const Inputs& in) { return operator_norm(in.front().second) > 1.5; };
    const Inputs start{{"x", x}};
    ASSERT_TRUE(big(start));
    const auto out = shrink_inputs(start, big);
    EXPECT_LE(out.front().second.size(), 3u);
    EXPECT_TRUE(big(out));
    EXPECT_FALSE(detail::has_imaginary(out));
}

TEST(Shrink, ScalarWitnessOnlyGetsSimpler) {
    Witness w;
    w.statement = StatementId::NEGATIVE_CONTROL;
    w.params.r = 1;
    w.inputs = {{"x", ComplexMatrix::diagonal({0.3})}, {"y", ComplexMatrix::diagonal({0.2})}};
    ASSERT_FALSE(evaluate(w).pass);
    const auto s = shrink(w);
    EXPECT_EQ(s.dimension(), 1u);
    EXPECT_FALSE(evaluate(s).pass);
}

TEST(Shrink, PassingWitnessUnchanged) {
    const auto rec = parse_witness(fixture("theorem_3_3_pass.txt"));
    EXPECT_EQ(to_text(WitnessRecord{shrink(rec.witness), {}}), to_text(WitnessRecord{rec.witness, {}}));
}

TEST(Shrink, ThrowingCandidatesAreRejected) {
    const Inputs start{{"x", ComplexMatrix::identity(4)}};
    const auto out = shrink_inputs(start, [](const Inputs& in) -> bool {
        if (in.front().second.size() < 4) throw NotContraction("out of domain");
        return true;
    });
    EXPECT_EQ(out.front().second.size(), 4u);
}

// ---------------------------------------------------------------- suite

TEST(Suite, SmallRunPasses) {
    SuiteConfig c;
    c.statements = {StatementId::THEOREM_3_3, StatementId::LEMMA_4_1, StatementId::THEOREM_4_6};
    c.dims = {2, 3};
    c.trials = 5;
    c.threads = 2;
    const auto r = run_suite(c);
    EXPECT_TRUE(r.all_pass());
    EXPECT_TRUE(r.failures.empty());
    for (const auto& cell : r.cells) EXPECT_EQ(cell.passed, 5u);
}

TEST(Suite, DeterministicAcrossThreadCounts) {
    SuiteConfig c;
    c.statements = {StatementId::ROTFELD_1_1, StatementId::LEMMA_3_2, StatementId::NEGATIVE_CONTROL};
    c.dims = {2, 4};
    c.trials = 6;
    c.threads = 1;
    const auto a = to_json(run_suite(c));
    c.threads = 3;
    const auto b = to_json(run_suite(c));
    EXPECT_EQ(without_timing(a).dump(), without_timing(b).dump());
    EXPECT_EQ(b["timing"]["threads"], 3);
}

TEST(Suite, NegativeControlWritesWitnesses) {
    SuiteConfig c;
    c.statements = {StatementId::NEGATIVE_CONTROL};
    c.dims = {3};
    c.trials = 5;
    const auto r = run_suite(c);
    EXPECT_FALSE(r.all_pass());
    ASSERT_FALSE(r.failures.empty());
    const auto dir = scratch("negative");
    write_report(r, dir);
    std::ifstream in(dir / "report.json");
    const auto j = Json::parse(in);
    EXPECT_FALSE(j["summary"]["pass"].get<bool>());
    std::size_t with_files = 0;
    for (const auto& f : j["failures"]) {
        if (!f.contains("witnessFile")) continue;
        ++with_files;
        std::ifstream w(dir / f["witnessFile"].get<std::string>());
        std::ostringstream s;
        s << w.rdbuf();
        const auto back = replay(StatementId::NEGATIVE_CONTROL, s.str());
        EXPECT_FALSE(back.pass);
        ASSERT_TRUE(f.contains("shrunkWitnessFile"));
        EXPECT_TRUE(fs::exists(dir / f["shrunkWitnessFile"].get<std::string>()));
        EXPECT_LE(f["shrunkN"].get<std::size_t>(), 3u);
    }
    EXPECT_GE(with_files, 1u);
    EXPECT_LE(with_files, max_shrunk_per_cell);
    EXPECT_TRUE(fs::exists(dir / "margins.csv"));
    fs::remove_all(dir);
}

TEST(Suite, ExploratoryFailuresDoNotFailTheRun) {
    SuiteConfig c;
    c.statements = {StatementId::LEMMA_4_3};
    c.dims = {2};
    c.trials = 20;
    c.exploratory = true;
    const auto r = run_suite(c);
    EXPECT_TRUE(r.all_pass());
    bool exploratory_failure = false;
    for (const auto& f : r.failures) {
        EXPECT_TRUE(f.exploratory);
        exploratory_failure = true;
    }
    EXPECT_TRUE(exploratory_failure);
}

TEST(Suite, MarginsCsvHasOneRowPerK) {
    SuiteConfig c;
    c.statements = {StatementId::LEMMA_4_2};
    c.dims = {3};
    c.trials = 2;
    const auto r = run_suite(c);
    const auto csv = margins_csv(r);
    std::size_t rows = 0;
    for (char ch : csv) rows += ch == '\n';
    EXPECT_EQ(rows, 1 + r.cells.size() * 2 * 3);
}

TEST(Selftest, Passes) {
    const auto r = selftest(default_seed, 20);
    EXPECT_TRUE(r.all_pass());
    EXPECT_EQ(to_json(r)["kind"], "selftest");
}

// ---------------------------------------------------------------- command line

TEST(Cli, ExitCodes) {
    const std::string fx = std::string(LOGMAJOR_FIXTURES) + "/";
    EXPECT_EQ(cli("replay THEOREM_3_3 " + fx + "theorem_3_3_pass.txt"), 0);
    EXPECT_EQ(cli("replay NEGATIVE_CONTROL " + fx + "negative_control.txt"), 1);
    EXPECT_EQ(cli("replay THEOREM_3_3 " + fx + "malformed.txt"), 2);
    EXPECT_EQ(cli("replay LEMMA_4_1 " + fx + "theorem_3_3_pass.txt"), 2);
    EXPECT_EQ(cli("replay NOPE " + fx + "theorem_3_3_pass.txt"), 2);
    EXPECT_EQ(cli("replay THEOREM_3_3 /nonexistent/file"), 2);
    EXPECT_EQ(cli("frobnicate"), 2);
    EXPECT_EQ(cli(""), 2);
    EXPECT_EQ(cli("catalog"), 0);
}

TEST(Cli, RunVerdicts) {
    const auto dir = scratch("cli");
    EXPECT_EQ(cli("run --statements NEGATIVE_CONTROL --dims 2 --trials 3 --out " + dir.string()), 1);
    EXPECT_TRUE(fs::exists(dir / "report.json"));
    EXPECT_EQ(cli("run --statements LEMMA_4_2 --dims 2 --trials 3 --out " + dir.string()), 0);
    EXPECT_EQ(cli("run --dims 0 --out " + dir.string()), 2);
    fs::remove_all(dir);
}
