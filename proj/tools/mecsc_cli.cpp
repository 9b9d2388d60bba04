// Command-line front end: single runs and the seeded experiment sweeps.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mecsc/mecsc.hpp"

namespace {

struct CommonOptions {
    std::string config;
    std::uint64_t seed = 1;
    std::size_t seeds = 20;
    std::string out;
    std::vector<std::string> schemes{"proposed", "ac", "wcr"};
    std::vector<double> values;
    std::vector<double> bandwidths_mhz;
    std::size_t threads = 0;
};

mecsc::ExperimentConfig load(const CommonOptions& o) {
    if (o.config.empty()) return mecsc::parse_config_text("");
    return mecsc::parse_config(o.config);
}

std::vector<mecsc::Scheme> schemes_of(const CommonOptions& o) {
    std::vector<mecsc::Scheme> out;
    for (const auto& s : o.schemes) out.push_back(mecsc::parse_scheme(s));
    return out;
}

void add_common(CLI::App* cmd, CommonOptions& o, bool sweep) {
    cmd->add_option("--config", o.config, "key = value config file (defaults when omitted)");
    cmd->add_option("--seed", o.seed, sweep ? "first seed" : "scenario seed");
    cmd->add_option("--out", o.out, "output CSV path");
    cmd->add_option("--schemes", o.schemes, "comma-separated subset of proposed,ac,wcr")->delimiter(',');
    if (!sweep) return;
    cmd->add_option("--seeds", o.seeds, "seeds per cell")->check(CLI::PositiveNumber);
    cmd->add_option("--threads", o.threads, "worker threads (0 = all cores)");
}

int run_single(const CommonOptions& o, const std::string& scenario_out, const std::string& report_out) {
    mecsc::ExperimentConfig cfg = load(o);
    cfg.system.rng_seed = o.seed;
    const mecsc::Problem p = mecsc::generate_problem(cfg.system, cfg.fit, cfg.catalog);
    if (!scenario_out.empty()) mecsc::write_scenario_csv(p.scenario, scenario_out);

    std::vector<mecsc::RunTrace> traces;
    std::vector<std::uint64_t> seeds;
    for (mecsc::Scheme s : schemes_of(o)) {
        traces.push_back(mecsc::run_scheme(s, p, cfg.solver));
        seeds.push_back(o.seed);
        const auto& t = traces.back();
        int offloaders = 0;
        for (int x : t.decision.offload) offloaders += x;
        std::printf("%-9s utility %.6f  iterations %zu  converged %s  offloaders %d/%zu  feasible %s\n",
                    std::string(mecsc::to_string(s)).c_str(), t.utility(), t.iterations, t.converged ? "yes" : "no",
                    offloaders, p.num_users(), t.report.feasible() ? "yes" : "no");
        if (!report_out.empty() && s == mecsc::Scheme::proposed) mecsc::write_report_csv(t.report, report_out);
    }
    if (!o.out.empty()) mecsc::write_trace_csv(traces, seeds, o.out);
    return 0;
}

int run_sweep(const CommonOptions& o, mecsc::ExperimentKind kind) {
    const mecsc::ExperimentConfig cfg = load(o);
    mecsc::ExperimentSpec spec;
    spec.kind = kind;
    spec.values = o.values;
    for (double mhz : o.bandwidths_mhz) spec.bandwidths.push_back(mhz * 1e6);
    spec.num_seeds = o.seeds;
    spec.first_seed = o.seed;
    spec.schemes = schemes_of(o);
    spec.output = o.out;
    spec.threads = o.threads;

    const auto rows = mecsc::run_experiment(spec, cfg);
    if (!o.out.empty()) mecsc::emit_csv(rows, o.out);

    std::size_t feasible = 0;
    for (const auto& r : rows) feasible += std::isfinite(r.utility) ? 1 : 0;
    for (const auto& s : mecsc::summarize(rows))
        std::printf("%-14s %-9s value %-8g bandwidth %-6g MHz  mean utility %.6f  (%zu/%zu seeds)\n",
                    s.experiment.c_str(), s.scheme.c_str(), s.sweep_value, s.bandwidth / 1e6, s.mean_utility,
                    s.feasible_seeds, s.seeds);
    if (feasible == 0) {
        std::fprintf(stderr, "error: every seed was infeasible\n");
        return 3;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Offloading and semantic compression for MEC systems"};
    app.require_subcommand(1);

    CommonOptions run_o, conv_o, users_o, cap_o;
    std::string scenario_out, report_out;

    auto* run = app.add_subcommand("run", "solve one seeded scenario and write the per-iteration trace");
    add_common(run, run_o, false);
    run->add_option("--scenario-out", scenario_out, "write the scenario (one row per user) to CSV");
    run->add_option("--report-out", report_out, "write the constraint report of the proposed scheme to CSV");

    auto* conv = app.add_subcommand("convergence", "per-iteration utility of each scheme");
    add_common(conv, conv_o, true);

    auto* users = app.add_subcommand("sweep-users", "utility versus total number of users");
    add_common(users, users_o, true);
    users->add_option("--values", users_o.values, "user counts")->delimiter(',');
    users->add_option("--bandwidths", users_o.bandwidths_mhz, "bandwidths in MHz")->delimiter(',');

    auto* cap = app.add_subcommand("sweep-capacity", "utility versus MEC capacity per SBS");
    add_common(cap, cap_o, true);
    cap->add_option("--values", cap_o.values, "capacities in Gigacycles/s")->delimiter(',');
    cap->add_option("--bandwidths", cap_o.bandwidths_mhz, "bandwidths in MHz")->delimiter(',');

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) return run_single(run_o, scenario_out, report_out);
        if (*conv) return run_sweep(conv_o, mecsc::ExperimentKind::convergence);
        if (*users) return run_sweep(users_o, mecsc::ExperimentKind::sweep_users);
        if (*cap) return run_sweep(cap_o, mecsc::ExperimentKind::sweep_capacity);
    } catch (const mecsc::ParseError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const mecsc::ConfigError& e) {
        std::fprintf(stderr, "invalid value: %s\n", e.what());
        return 2;
    } catch (const mecsc::InfeasibleRun& e) {
        std::fprintf(stderr, "infeasible: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
