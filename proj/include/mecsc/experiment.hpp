#pragma once

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "mecsc/config.hpp"
#include "mecsc/errors.hpp"
#include "mecsc/orchestrator.hpp"
#include "mecsc/taskmodel.hpp"

namespace mecsc {

struct ExperimentConfig {
    SystemConfig system;
    FitParams fit;
    TaskCatalog catalog = default_catalog();
    SolverConfig solver;
};

// ---------------------------------------------------------------------------
// Config file: `key = value` lines, '#' starts a comment.
// ---------------------------------------------------------------------------

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline double parse_number(std::string_view text, std::size_t line) {
    text = trim(text);
    double v = 0.0;
    const auto* end = text.data() + text.size();
    const auto res = std::from_chars(text.data(), end, v);
    if (text.empty() || res.ec != std::errc() || res.ptr != end)
        throw ParseError(line, "not a number: '" + std::string(text) + "'");
    return v;
}

inline std::size_t parse_count(std::string_view key, std::string_view text, std::size_t line) {
    const double v = parse_number(text, line);
    if (v != std::floor(v)) throw ParseError(line, std::string(key) + " must be an integer");
    if (v < 0.0 || v > 1e15) throw ConfigError(std::string(key), std::string(key) + ": must be a non-negative integer");
    return static_cast<std::size_t>(v);
}

/// "0.020:85, 0.040:90" -> catalog
inline TaskCatalog parse_tasks(std::string_view text, std::size_t line) {
    TaskCatalog out;
    while (!text.empty()) {
        const auto comma = text.find(',');
        const std::string_view item = trim(text.substr(0, comma));
        text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
        const auto colon = item.find(':');
        if (colon == std::string_view::npos) throw ParseError(line, "task entry must be delay_s:accuracy_pct");
        out.push_back({parse_number(item.substr(0, colon), line), parse_number(item.substr(colon + 1), line)});
    }
    return out;
}

}  // namespace detail

/// Parses config text. Unknown keys and malformed lines are rejected, absent
/// keys keep their defaults, and the result is validated.
inline ExperimentConfig parse_config_text(std::string_view text) {
    ExperimentConfig c;
    std::map<std::string, std::size_t, std::less<>> seen;
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError(line_no, "expected 'key = value'");
        const std::string key(detail::trim(line.substr(0, eq)));
        const std::string_view val = detail::trim(line.substr(eq + 1));
        if (key.empty() || val.empty()) throw ParseError(line_no, "expected 'key = value'");
        if (!seen.emplace(key, line_no).second) throw ParseError(line_no, "duplicate key '" + key + "'");

        auto num = [&] { return detail::parse_number(val, line_no); };
        auto count = [&] { return detail::parse_count(key, val, line_no); };
        SystemConfig& s = c.system;
        if (key == "bandwidth_hz") s.bandwidth_total = num();
        else if (key == "num_subcarriers") s.num_subcarriers = count();
        else if (key == "tx_power_w") s.tx_power = num();
        else if (key == "noise_power_dbm") s.noise_power = dbm_to_watt(num());
        else if (key == "carrier_freq_hz") s.carrier_freq = num();
        else if (key == "area_side_m") s.area_side = num();
        else if (key == "num_sbs") s.num_sbs = count();
        else if (key == "num_users") s.num_users = count();
        else if (key == "mec_capacity_hz") s.mec_capacity = num();
        else if (key == "local_capacity_hz") s.local_capacity = num();
        else if (key == "utility_weight") s.utility_weight = num();
        else if (key == "overhead_slope") s.overhead_slope = num();
        else if (key == "overhead_intercept") s.overhead_intercept = num();
        else if (key == "volume_min") s.volume_min = num();
        else if (key == "volume_max") s.volume_max = num();
        else if (key == "bits_per_unit") s.bits_per_unit = num();
        else if (key == "rng_seed") s.rng_seed = count();
        else if (key == "fit_p") c.fit.p = num();
        else if (key == "fit_q") c.fit.q = num();
        else if (key == "fit_r") c.fit.r = num();
        else if (key == "tasks") c.catalog = detail::parse_tasks(val, line_no);
        else if (key == "outer_tol") c.solver.outer_tol = num();
        else if (key == "inner_tol") c.solver.inner_tol = num();
        else if (key == "max_outer") c.solver.max_outer = count();
        else if (key == "max_inner") c.solver.max_inner = count();
        else throw ParseError(line_no, "unknown key '" + key + "'");
    }
    validate(c.system);
    validate(c.fit);
    validate(c.catalog, c.fit);
    validate(c.solver);
    return c;
}

inline ExperimentConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

enum class ExperimentKind { convergence, sweep_users, sweep_capacity };

inline std::string_view to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::convergence: return "convergence";
        case ExperimentKind::sweep_users: return "sweep-users";
        case ExperimentKind::sweep_capacity: return "sweep-capacity";
    }
    return "?";
}

struct ExperimentSpec {
    ExperimentKind kind = ExperimentKind::convergence;
    std::vector<double> values;      // U, or F_k in Gigacycles/s
    std::vector<double> bandwidths;  // Hz; empty: 10 and 50 MHz for sweeps, config value otherwise
    std::size_t num_seeds = 20;
    std::uint64_t first_seed = 1;
    std::vector<Scheme> schemes{Scheme::proposed, Scheme::ac, Scheme::wcr};
    std::string output;
    std::size_t threads = 0;  // 0: hardware concurrency
};

inline std::vector<double> default_sweep_values(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::sweep_users: return {10, 20, 30, 40, 50};
        case ExperimentKind::sweep_capacity: return {50, 100, 150, 200, 250, 300, 350, 400};
        case ExperimentKind::convergence: return {};
    }
    return {};
}

inline void validate(const ExperimentSpec& spec) {
    detail::require(spec.num_seeds >= 1, "seeds", "must be >= 1");
    detail::require(!spec.schemes.empty(), "schemes", "no scheme selected");
    for (std::size_t i = 1; i < spec.values.size(); ++i)
        detail::require(spec.values[i] > spec.values[i - 1], "values", "sweep values must be strictly increasing");
    for (double v : spec.values) detail::require(detail::positive(v), "values", "sweep values must be > 0");
    for (double b : spec.bandwidths) detail::require(detail::positive(b), "bandwidths", "must be > 0");
}

struct ResultRow {
    std::string experiment;
    std::string scheme;
    double sweep_value = 0.0;
    double bandwidth = 0.0;
    std::uint64_t seed = 0;
    double utility = 0.0;  // NaN for infeasible seeds
    std::size_t iterations = 0;
    double feasible_fraction = 0.0;

    bool operator==(const ResultRow&) const = default;
};

namespace detail {

struct Cell {
    double value;
    double bandwidth;
    std::uint64_t seed;
};

inline std::vector<ResultRow> run_cell(const ExperimentSpec& spec, const ExperimentConfig& base, const Cell& cell) {
    ExperimentConfig cfg = base;
    cfg.system.bandwidth_total = cell.bandwidth;
    cfg.system.rng_seed = cell.seed;
    if (spec.kind == ExperimentKind::sweep_users) cfg.system.num_users = static_cast<std::size_t>(cell.value);
    if (spec.kind == ExperimentKind::sweep_capacity) cfg.system.mec_capacity = cell.value * 1e9;
    const std::string exp(to_string(spec.kind));

    std::vector<ResultRow> rows;
    std::optional<Problem> problem;
    try {
        problem = generate_problem(cfg.system, cfg.fit, cfg.catalog);
    } catch (const ScenarioInfeasible&) {
        for (Scheme s : spec.schemes)
            rows.push_back({exp, std::string(to_string(s)), cell.value, cell.bandwidth, cell.seed,
                            std::numeric_limits<double>::quiet_NaN(), 0, 0.0});
        return rows;
    }
    const double U = static_cast<double>(problem->num_users());
    for (Scheme s : spec.schemes) {
        const std::string name(to_string(s));
        try {
            const RunTrace tr = run_scheme(s, *problem, cfg.solver);
            const double ok = static_cast<double>(std::count_if(tr.report.users.begin(), tr.report.users.end(),
                                                                [](const UserResidual& r) { return r.ok(); }));
            if (spec.kind == ExperimentKind::convergence) {
                for (std::size_t q = 0; q < tr.outer_objectives.size(); ++q)
                    rows.push_back({exp, name, static_cast<double>(q), cell.bandwidth, cell.seed, tr.outer_objectives[q],
                                    tr.iterations, ok / U});
            } else {
                rows.push_back({exp, name, cell.value, cell.bandwidth, cell.seed, tr.utility(), tr.iterations, ok / U});
            }
        } catch (const InfeasibleRun& e) {
            rows.push_back({exp, name, cell.value, cell.bandwidth, cell.seed, std::numeric_limits<double>::quiet_NaN(), 0,
                            1.0 - static_cast<double>(e.users().size()) / U});
        }
    }
    return rows;
}

}  // namespace detail

/// Runs every (bandwidth, sweep value, seed) cell, in parallel, and returns
/// rows in a fixed order independent of scheduling.
inline std::vector<ResultRow> run_experiment(ExperimentSpec spec, const ExperimentConfig& cfg) {
    if (spec.values.empty()) spec.values = default_sweep_values(spec.kind);
    if (spec.bandwidths.empty()) {
        if (spec.kind == ExperimentKind::convergence) spec.bandwidths = {cfg.system.bandwidth_total};
        else spec.bandwidths = {10e6, 50e6};
    }
    validate(spec);
    if (spec.kind == ExperimentKind::convergence) spec.values = {0.0};  // one cell per seed

    std::vector<detail::Cell> cells;
    for (double bw : spec.bandwidths)
        for (double v : spec.values)
            for (std::size_t i = 0; i < spec.num_seeds; ++i) cells.push_back({v, bw, spec.first_seed + i});

    std::vector<std::vector<ResultRow>> out(cells.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < cells.size(); i = next++) out[i] = detail::run_cell(spec, cfg, cells[i]);
    };
    std::size_t n_threads = spec.threads ? spec.threads : std::max(1u, std::thread::hardware_concurrency());
    n_threads = std::min(n_threads, cells.size());
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    std::vector<ResultRow> rows;
    for (auto& cell_rows : out) rows.insert(rows.end(), cell_rows.begin(), cell_rows.end());
    return rows;
}

struct SummaryRow {
    std::string experiment;
    std::string scheme;
    double sweep_value;
    double bandwidth;
    double mean_utility;
    std::size_t feasible_seeds;
    std::size_t seeds;
};

/// Seed-mean utility per (scheme, sweep value, bandwidth), over feasible seeds.
inline std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows) {
    std::vector<SummaryRow> out;
    for (const ResultRow& r : rows) {
        auto it = std::find_if(out.begin(), out.end(), [&](const SummaryRow& s) {
            return s.experiment == r.experiment && s.scheme == r.scheme && s.sweep_value == r.sweep_value &&
                   s.bandwidth == r.bandwidth;
        });
        if (it == out.end()) {
            out.push_back({r.experiment, r.scheme, r.sweep_value, r.bandwidth, 0.0, 0, 0});
            it = out.end() - 1;
        }
        ++it->seeds;
        if (std::isfinite(r.utility)) {
            it->mean_utility += r.utility;
            ++it->feasible_seeds;
        }
    }
    for (auto& s : out)
        s.mean_utility = s.feasible_seeds ? s.mean_utility / static_cast<double>(s.feasible_seeds)
                                          : std::numeric_limits<double>::quiet_NaN();
    return out;
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

inline constexpr std::string_view kCsvHeader =
    "experiment,scheme,sweep_value,bandwidth,seed,utility,iterations,feasible_fraction";

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string format_csv(const std::vector<ResultRow>& rows) {
    std::string out(kCsvHeader);
    out += '\n';
    for (const ResultRow& r : rows) {
        out += r.experiment + ',' + r.scheme + ',' + format_double(r.sweep_value) + ',' + format_double(r.bandwidth) +
               ',' + std::to_string(r.seed) + ',' + format_double(r.utility) + ',' + std::to_string(r.iterations) + ',' +
               format_double(r.feasible_fraction) + '\n';
    }
    return out;
}

inline std::vector<ResultRow> parse_csv(std::string_view text) {
    std::vector<ResultRow> rows;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        const std::string line(text.substr(0, nl));
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        if (++line_no == 1 || line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
        if (f.size() != 8) throw ParseError(line_no, "expected 8 CSV fields");
        ResultRow r;
        r.experiment = f[0];
        r.scheme = f[1];
        r.sweep_value = std::strtod(f[2].c_str(), nullptr);
        r.bandwidth = std::strtod(f[3].c_str(), nullptr);
        r.seed = std::stoull(f[4]);
        r.utility = std::strtod(f[5].c_str(), nullptr);
        r.iterations = std::stoull(f[6]);
        r.feasible_fraction = std::strtod(f[7].c_str(), nullptr);
        rows.push_back(std::move(r));
    }
    return rows;
}

/// Writes to a sibling temp file, then renames over `path`.
inline void emit_csv(const std::vector<ResultRow>& rows, const std::string& path) {
    if (rows.empty()) throw DomainError("emit_csv: no rows");
    const std::filesystem::path target(path);
    std::filesystem::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string());
        out << format_csv(rows);
        if (!out) throw IoError("write failed: " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, target, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError("cannot replace " + path);
    }
}

}  // namespace mecsc
