#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "mecsc/config.hpp"
#include "mecsc/errors.hpp"
#include "mecsc/random.hpp"

namespace mecsc {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

inline double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

// ---------------------------------------------------------------------------
// UMi street-canyon propagation (3GPP TR 36.814), no shadowing.
// ---------------------------------------------------------------------------

/// Path loss in dB. Distances below 1 m are clamped to 1 m.
inline double pathloss_db(double distance_m, double carrier_hz, bool los) {
    const double d = std::max(distance_m, 1.0);
    const double f_ghz = carrier_hz / 1e9;
    if (los) return 22.0 * std::log10(d) + 28.0 + 20.0 * std::log10(f_ghz);
    return 36.7 * std::log10(d) + 22.7 + 26.0 * std::log10(f_ghz);
}

inline double los_probability(double distance_m) {
    const double e = std::exp(-distance_m / 36.0);
    return std::min(18.0 / distance_m, 1.0) * (1.0 - e) + e;
}

inline double db_to_linear_gain(double pathloss) { return std::pow(10.0, -pathloss / 10.0); }

/// Shannon rate of one subcarrier.
inline double subcarrier_rate(double subcarrier_bw, double rx_power, double interference,
                              double noise) {
    return subcarrier_bw * std::log2(1.0 + rx_power / (interference + noise));
}

// ---------------------------------------------------------------------------

struct Geometry {
    std::vector<Point> sbs_positions;
    std::vector<Point> user_positions;
    std::vector<std::size_t> association;  // user -> SBS
};

/// Immutable radio snapshot of one drop.
struct Scenario {
    std::vector<Point> sbs_positions;
    std::vector<Point> user_positions;
    std::vector<std::size_t> association;
    std::vector<std::size_t> subcarrier;  // one subcarrier per user
    std::vector<double> link_gains;       // [user * num_sbs + sbs], linear
    std::vector<double> interference;     // W, per user
    std::vector<double> rates;            // bits/s, per user

    std::size_t num_users() const { return user_positions.size(); }
    std::size_t num_sbs() const { return sbs_positions.size(); }
    double gain(std::size_t user, std::size_t sbs) const {
        return link_gains[user * num_sbs() + sbs];
    }
    /// Gain of the user's own uplink.
    double serving_gain(std::size_t user) const { return gain(user, association[user]); }
};

/// SBS sites at the centers of a near-square grid of cells over the area.
inline std::vector<Point> sbs_sites(const SystemConfig& cfg) {
    const auto cols = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(cfg.num_sbs))));
    const std::size_t rows = (cfg.num_sbs + cols - 1) / cols;
    const double w = cfg.area_side / static_cast<double>(cols);
    const double h = cfg.area_side / static_cast<double>(rows);
    std::vector<Point> out;
    out.reserve(cfg.num_sbs);
    for (std::size_t i = 0; i < cols && out.size() < cfg.num_sbs; ++i)
        for (std::size_t j = 0; j < rows && out.size() < cfg.num_sbs; ++j)
            out.push_back({(static_cast<double>(i) + 0.5) * w, (static_cast<double>(j) + 0.5) * h});
    return out;
}

inline std::size_t nearest_sbs(Point user, const std::vector<Point>& sbs) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < sbs.size(); ++k) {
        const double d = distance(user, sbs[k]);
        if (d < best_d) {
            best_d = d;
            best = k;
        }
    }
    return best;
}

inline Geometry generate_topology(const SystemConfig& cfg) {
    Geometry g;
    g.sbs_positions = sbs_sites(cfg);
    Rng rng(cfg.rng_seed, Rng::Stream::geometry);
    g.user_positions.reserve(cfg.num_users);
    g.association.reserve(cfg.num_users);
    for (std::size_t u = 0; u < cfg.num_users; ++u) {
        const double x = rng.uniform(0.0, cfg.area_side);
        const double y = rng.uniform(0.0, cfg.area_side);
        g.user_positions.push_back({x, y});
        g.association.push_back(nearest_sbs({x, y}, g.sbs_positions));
    }
    return g;
}

/// Round-robin subcarrier indices per SBS in user order.
inline std::vector<std::size_t> assign_subcarriers(const std::vector<std::size_t>& association,
                                                   std::size_t num_sbs, std::size_t num_subcarriers) {
    std::vector<std::size_t> next(num_sbs, 0);
    std::vector<std::size_t> out(association.size());
    for (std::size_t u = 0; u < association.size(); ++u) {
        std::size_t& slot = next[association[u]];
        if (slot >= num_subcarriers)
            throw ScenarioInfeasible("SBS " + std::to_string(association[u]) + " has more users than the " +
                                     std::to_string(num_subcarriers) + " available subcarriers");
        out[u] = slot++;
    }
    return out;
}

/// Co-channel interference at the user's serving SBS: every user of another
/// SBS on the same subcarrier transmits at full power. The cross gain from
/// the interferer to the victim's SBS is used.
inline double co_channel_interference(std::size_t user, const Scenario& s, double tx_power) {
    double total = 0.0;
    const std::size_t k = s.association[user];
    for (std::size_t v = 0; v < s.num_users(); ++v) {
        if (s.association[v] == k || s.subcarrier[v] != s.subcarrier[user]) continue;
        total += tx_power * s.gain(v, k);
    }
    return total;
}

inline double uplink_rate(std::size_t user, const Scenario& s, const SystemConfig& cfg) {
    return subcarrier_rate(cfg.subcarrier_bandwidth(), cfg.tx_power * s.serving_gain(user),
                           co_channel_interference(user, s, cfg.tx_power), cfg.noise_power);
}

/// Builds the full scenario from (cfg, cfg.rng_seed). Pure and deterministic.
inline Scenario generate_scenario(const SystemConfig& cfg) {
    validate(cfg);
    Geometry g = generate_topology(cfg);
    Scenario s;
    s.sbs_positions = std::move(g.sbs_positions);
    s.user_positions = std::move(g.user_positions);
    s.association = std::move(g.association);
    s.subcarrier = assign_subcarriers(s.association, cfg.num_sbs, cfg.num_subcarriers);

    // LoS state drawn once per (user, SBS) link
    Rng rng(cfg.rng_seed, Rng::Stream::links);
    const std::size_t U = s.num_users();
    const std::size_t K = s.num_sbs();
    s.link_gains.resize(U * K);
    for (std::size_t u = 0; u < U; ++u) {
        for (std::size_t k = 0; k < K; ++k) {
            const double d = std::max(distance(s.user_positions[u], s.sbs_positions[k]), 1.0);
            const bool los = rng.bernoulli(los_probability(d));
            s.link_gains[u * K + k] = db_to_linear_gain(pathloss_db(d, cfg.carrier_freq, los));
        }
    }
    s.interference.resize(U);
    s.rates.resize(U);
    for (std::size_t u = 0; u < U; ++u) {
        s.interference[u] = co_channel_interference(u, s, cfg.tx_power);
        s.rates[u] = subcarrier_rate(cfg.subcarrier_bandwidth(), cfg.tx_power * s.serving_gain(u),
                                     s.interference[u], cfg.noise_power);
    }
    return s;
}

/// Debug dump, one row per user.
inline void write_scenario_csv(const Scenario& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path);
    out.precision(17);
    out << "user,x,y,sbs,subcarrier,gain,interference,rate\n";
    for (std::size_t u = 0; u < s.num_users(); ++u) {
        out << u << ',' << s.user_positions[u].x << ',' << s.user_positions[u].y << ','
            << s.association[u] << ',' << s.subcarrier[u] << ',' << s.serving_gain(u) << ','
            << s.interference[u] << ',' << s.rates[u] << '\n';
    }
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace mecsc
