#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "mecsc/errors.hpp"

namespace mecsc {

inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watt_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }

/// Physical and model constants of one simulated system.
///
/// Units: Hz, W, m, cycles/s. Data volumes are counted in abstract
/// data-units; `bits_per_unit` converts them for the radio link and
/// `overhead_slope` converts them into CPU cycles.
struct SystemConfig {
    double bandwidth_total = 10e6;
    std::size_t num_subcarriers = 50;
    double tx_power = 0.1;
    double noise_power = 1e-13;  // -100 dBm
    double carrier_freq = 3.5e9;
    double area_side = 200.0;
    std::size_t num_sbs = 4;
    std::size_t num_users = 30;
    double mec_capacity = 200e9;
    double local_capacity = 1.4e9;
    double utility_weight = 1.0;
    // Calibrated so every user can compute locally within the tightest
    // deadline (T^L in 4.3..18.6 ms); see README for the calibration check.
    double overhead_slope = 2.5e4;    // cycles per data-unit
    double overhead_intercept = 1e6;  // cycles
    double volume_min = 200.0;
    double volume_max = 1000.0;
    double bits_per_unit = 32.0;
    std::uint64_t rng_seed = 1;

    double subcarrier_bandwidth() const {
        return bandwidth_total / static_cast<double>(num_subcarriers);
    }
};

/// Power-law accuracy fit y(alpha) = p - q * alpha^-r, y in percent.
struct FitParams {
    double p = 100.0;
    double q = 80.0;
    double r = 0.6;
};

struct TaskType {
    double delay_limit;     // s
    double accuracy_limit;  // percent
};

using TaskCatalog = std::vector<TaskType>;

inline TaskCatalog default_catalog() {
    return {{0.020, 85.0}, {0.040, 90.0}, {0.060, 95.0}};
}

struct SolverConfig {
    double outer_tol = 1e-3;
    double inner_tol = 1e-4;
    std::size_t max_outer = 10;
    std::size_t max_inner = 20;
};

namespace detail {
inline void require(bool ok, const char* key, const std::string& msg) {
    if (!ok) throw ConfigError(key, std::string(key) + ": " + msg);
}
inline bool positive(double v) { return std::isfinite(v) && v > 0.0; }
}  // namespace detail

inline void validate(const SystemConfig& c) {
    using detail::positive;
    using detail::require;
    require(positive(c.bandwidth_total), "bandwidth_hz", "must be > 0");
    require(c.num_subcarriers >= 1, "num_subcarriers", "must be >= 1");
    require(positive(c.tx_power), "tx_power_w", "must be > 0");
    require(positive(c.noise_power), "noise_power_dbm", "must be finite");
    require(positive(c.carrier_freq), "carrier_freq_hz", "must be > 0");
    require(positive(c.area_side), "area_side_m", "must be > 0");
    require(c.num_sbs >= 1, "num_sbs", "must be >= 1");
    require(c.num_users >= 1, "num_users", "must be >= 1");
    require(positive(c.mec_capacity), "mec_capacity_hz", "must be > 0");
    require(positive(c.local_capacity), "local_capacity_hz", "must be > 0");
    require(positive(c.utility_weight), "utility_weight", "must be > 0");
    require(positive(c.overhead_slope), "overhead_slope", "must be > 0");
    require(std::isfinite(c.overhead_intercept) && c.overhead_intercept >= 0.0, "overhead_intercept", "must be >= 0");
    require(positive(c.volume_min), "volume_min", "must be > 0");
    require(positive(c.volume_max), "volume_max", "must be > 0");
    require(c.volume_min <= c.volume_max, "volume_max", "must be >= volume_min");
    require(positive(c.bits_per_unit), "bits_per_unit", "must be > 0");
}

inline void validate(const FitParams& f) {
    detail::require(detail::positive(f.p), "fit_p", "must be > 0");
    detail::require(detail::positive(f.q), "fit_q", "must be > 0");
    detail::require(std::isfinite(f.r) && f.r >= 0.0 && f.r <= 1.0, "fit_r", "must lie in [0, 1]");
}

inline void validate(const TaskCatalog& catalog, const FitParams& fit) {
    detail::require(!catalog.empty(), "tasks", "catalog is empty");
    for (const auto& t : catalog) {
        detail::require(detail::positive(t.delay_limit), "tasks", "delay limit must be > 0");
        detail::require(t.accuracy_limit > 0.0 && t.accuracy_limit < fit.p, "tasks",
                        "accuracy limit must lie in (0, p)");
    }
}

inline void validate(const SolverConfig& s) {
    detail::require(detail::positive(s.outer_tol), "outer_tol", "must be > 0");
    detail::require(detail::positive(s.inner_tol), "inner_tol", "must be > 0");
    detail::require(s.max_outer >= 1, "max_outer", "must be >= 1");
    detail::require(s.max_inner >= 1, "max_inner", "must be >= 1");
}

}  // namespace mecsc
