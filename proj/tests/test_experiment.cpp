#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mecsc/experiment.hpp"

using namespace mecsc;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::filesystem::path temp_file(const char* name) { return std::filesystem::temp_directory_path() / name; }

}  // namespace

TEST(Config, EmptyTextGivesDefaults) {
    const ExperimentConfig c = parse_config_text("");
    const SystemConfig d;
    EXPECT_EQ(c.system.bandwidth_total, 10e6);
    EXPECT_EQ(c.system.num_subcarriers, 50u);
    EXPECT_EQ(c.system.tx_power, 0.1);
    EXPECT_EQ(c.system.num_sbs, 4u);
    EXPECT_EQ(c.system.num_users, 30u);
    EXPECT_EQ(c.system.mec_capacity, 200e9);
    EXPECT_EQ(c.system.local_capacity, 1.4e9);
    EXPECT_EQ(c.system.overhead_slope, d.overhead_slope);
    EXPECT_EQ(c.fit.p, 100.0);
    EXPECT_EQ(c.fit.q, 80.0);
    EXPECT_EQ(c.fit.r, 0.6);
    ASSERT_EQ(c.catalog.size(), 3u);
    EXPECT_EQ(c.solver.max_outer, 10u);
}

TEST(Config, NoiseInDbm) {
    const ExperimentConfig c = parse_config_text("noise_power_dbm = -100\n");
    EXPECT_NEAR(c.system.noise_power, 1e-13, 1e-25);
}

TEST(Config, CommentsAndWhitespace) {
    const ExperimentConfig c = parse_config_text("# comment\n\n  num_users =  12  # trailing\nbandwidth_hz=5e7\n");
    EXPECT_EQ(c.system.num_users, 12u);
    EXPECT_EQ(c.system.bandwidth_total, 5e7);
}

TEST(Config, TaskCatalog) {
    const ExperimentConfig c = parse_config_text("tasks = 0.030:80, 0.050:92\n");
    ASSERT_EQ(c.catalog.size(), 2u);
    EXPECT_EQ(c.catalog[0].delay_limit, 0.030);
    EXPECT_EQ(c.catalog[1].accuracy_limit, 92.0);
}

TEST(Config, NegativeUserCountNamesKey) {
    try {
        parse_config_text("num_users = -5\n");
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.key(), "num_users");
    }
}

TEST(Config, OutOfRangeValueNamesKey) {
    try {
        parse_config_text("fit_r = 1.5\n");
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.key(), "fit_r");
    }
}

TEST(Config, MalformedLineReportsLineNumber) {
    try {
        parse_config_text("num_users = 10\nthis line has no equals sign\n");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
    }
}

TEST(Config, UnknownKeyRejected) {
    try {
        parse_config_text("\n\nnum_user = 10\n");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
    }
}

TEST(Config, BadNumberRejected) { EXPECT_THROW(parse_config_text("bandwidth_hz = ten\n"), ParseError); }

TEST(Config, MissingFileIsIoError) { EXPECT_THROW(parse_config("/nonexistent/dir/x.cfg"), IoError); }

TEST(Csv, HeaderPlusOneLinePerRow) {
    const std::vector<ResultRow> rows{{"sweep-users", "proposed", 10, 10e6, 1, 123.5, 4, 1.0}};
    const auto path = temp_file("mecsc_one_row.csv");
    emit_csv(rows, path.string());
    const std::string text = slurp(path);
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 2);
    EXPECT_EQ(text.substr(0, kCsvHeader.size()), kCsvHeader);
    std::filesystem::remove(path);
}

TEST(Csv, EmptyRowsRejected) { EXPECT_THROW(emit_csv({}, temp_file("mecsc_empty.csv").string()), DomainError); }

TEST(Csv, UnwritablePathIsIoError) {
    const std::vector<ResultRow> rows{{"x", "ac", 1, 1, 1, 1, 1, 1}};
    EXPECT_THROW(emit_csv(rows, "/nonexistent/dir/out.csv"), IoError);
}

TEST(Csv, RoundTripIsExact) {
    const std::vector<ResultRow> rows{{"sweep-capacity", "wcr", 150, 50e6, 17, 0.1 + 0.2, 7, 29.0 / 30.0},
                                      {"sweep-capacity", "ac", 150, 50e6, 18, -1.0 / 3.0, 3, 1.0}};
    EXPECT_EQ(parse_csv(format_csv(rows)), rows);
}

TEST(Csv, InfeasibleUtilityRoundTripsAsNan) {
    const std::vector<ResultRow> rows{{"sweep-users", "ac", 10, 10e6, 1, std::nan(""), 0, 0.9}};
    const auto back = parse_csv(format_csv(rows));
    ASSERT_EQ(back.size(), 1u);
    EXPECT_TRUE(std::isnan(back[0].utility));
}

TEST(Experiment, RepeatedRunsAreByteIdentical) {
    ExperimentSpec spec;
    spec.kind = ExperimentKind::sweep_users;
    spec.values = {6, 12};
    spec.bandwidths = {10e6};
    spec.num_seeds = 3;
    spec.threads = 3;
    const ExperimentConfig cfg = parse_config_text("");
    const auto a = temp_file("mecsc_rep_a.csv");
    const auto b = temp_file("mecsc_rep_b.csv");
    emit_csv(run_experiment(spec, cfg), a.string());
    spec.threads = 1;
    emit_csv(run_experiment(spec, cfg), b.string());
    EXPECT_EQ(slurp(a), slurp(b));
    std::filesystem::remove(a);
    std::filesystem::remove(b);
}

TEST(Experiment, SeedsAreIsolated) {
    ExperimentSpec spec;
    spec.kind = ExperimentKind::sweep_capacity;
    spec.values = {100};
    spec.bandwidths = {10e6};
    spec.schemes = {Scheme::proposed};
    spec.num_seeds = 2;
    spec.first_seed = 4;
    const ExperimentConfig cfg = parse_config_text("num_users = 10\n");
    const auto both = run_experiment(spec, cfg);
    spec.num_seeds = 1;
    spec.first_seed = 5;
    const auto only = run_experiment(spec, cfg);
    ASSERT_EQ(both.size(), 2u);
    ASSERT_EQ(only.size(), 1u);
    EXPECT_EQ(both[1], only[0]);
}

TEST(Experiment, RowCountAndOrder) {
    ExperimentSpec spec;
    spec.kind = ExperimentKind::sweep_users;
    spec.values = {5, 8};
    spec.num_seeds = 2;
    const auto rows = run_experiment(spec, parse_config_text(""));
    // default bandwidths 10 and 50 MHz, three schemes
    ASSERT_EQ(rows.size(), 2u * 2u * 2u * 3u);
    EXPECT_EQ(rows.front().bandwidth, 10e6);
    EXPECT_EQ(rows.back().bandwidth, 50e6);
}

TEST(Experiment, ConvergenceRowsPerIteration) {
    ExperimentSpec spec;
    spec.kind = ExperimentKind::convergence;
    spec.num_seeds = 1;
    spec.schemes = {Scheme::proposed};
    const auto rows = run_experiment(spec, parse_config_text(""));
    ASSERT_GE(rows.size(), 2u);
    for (std::size_t i = 0; i < rows.size(); ++i) EXPECT_EQ(rows[i].sweep_value, static_cast<double>(i));
}

TEST(Experiment, InfeasibleSeedsBecomeNanRows) {
    ExperimentSpec spec;
    spec.kind = ExperimentKind::sweep_users;
    spec.values = {10};
    spec.bandwidths = {10e6};
    spec.num_seeds = 1;
    spec.schemes = {Scheme::proposed};
    const auto rows = run_experiment(spec, parse_config_text("tasks = 0.0001:85\n"));
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_TRUE(std::isnan(rows[0].utility));
    EXPECT_LT(rows[0].feasible_fraction, 1.0);
}

TEST(Experiment, NonIncreasingSweepRejected) {
    ExperimentSpec spec;
    spec.kind = ExperimentKind::sweep_users;
    spec.values = {20, 10};
    EXPECT_THROW(run_experiment(spec, parse_config_text("")), ConfigError);
}

TEST(Summary, MeanOverFeasibleSeeds) {
    const std::vector<ResultRow> rows{{"sweep-users", "ac", 10, 10e6, 1, 2.0, 1, 1.0},
                                      {"sweep-users", "ac", 10, 10e6, 2, 4.0, 1, 1.0},
                                      {"sweep-users", "ac", 10, 10e6, 3, std::nan(""), 0, 0.5}};
    const auto s = summarize(rows);
    ASSERT_EQ(s.size(), 1u);
    EXPECT_EQ(s[0].mean_utility, 3.0);
    EXPECT_EQ(s[0].feasible_seeds, 2u);
    EXPECT_EQ(s[0].seeds, 3u);
}
