#include "slicesim/radio.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace slicesim {

double db_to_linear(double db) { return std::pow(10.0, 0.1 * db); }

double linear_to_db(double x) { return 10.0 * std::log10(x); }

double antenna_gain_db(double theta_rad, const RadioParams& p) {
    double theta = std::fabs(std::remainder(theta_rad, 2.0 * std::numbers::pi));
    double ratio = theta / p.beamwidth_3db_rad;
    return p.max_gain_db - std::min(12.0 * ratio * ratio, p.max_attenuation_db);
}

double path_loss_db(double distance_m, const RadioParams& p) {
    if (distance_m < 0.0) throw std::invalid_argument("path_loss_db: negative distance");
    double d = std::max(distance_m, p.min_distance_m);
    return p.pathloss_coef_log_d * std::log10(d) + p.pathloss_const_db +
           p.pathloss_coef_log_fc * std::log10(p.carrier_hz / 1.0e9);
}

double thermal_noise_dbm(const RadioParams& p) {
    return p.noise_density_dbm_hz + 10.0 * std::log10(p.bandwidth_hz);
}

double capacity_from_sinr(double sinr_linear, const RadioParams& p) {
    return p.bandwidth_hz * std::log2(1.0 + sinr_linear);
}

namespace {

double link_power_mw(const CellGeom& c, Vec2 pos, const Grid& grid, const RadioParams& rp,
                     RandomStream& rng) {
    Vec2 d = grid.wrapped_displacement(c.bs_pos, pos);
    double theta = angle_of(d) - c.boresight_rad;
    double rx_dbm = rp.tx_power_dbm + antenna_gain_db(theta, rp) - path_loss_db(norm(d), rp);
    if (rp.shadow_sigma_db > 0.0) rx_dbm += rng.normal(0.0, rp.shadow_sigma_db);
    return dbm_to_mw(rx_dbm);
}

}  // namespace

double capacity_at(Vec2 pos, int cell_id, const Grid& grid, const RadioParams& params,
                   RandomStream& rng) {
    const CellGeom& serving = grid.cell(cell_id);
    double signal_mw = link_power_mw(serving, pos, grid, params, rng);
    double interference_mw = 0.0;
    for (int nid : serving.cochannel) {
        interference_mw += link_power_mw(grid.cell(nid), pos, grid, params, rng);
    }
    double noise_mw = dbm_to_mw(thermal_noise_dbm(params));
    return capacity_from_sinr(signal_mw / (noise_mw + interference_mw), params);
}

Vec2 uniform_point_in_cell(int cell_id, const Grid& grid, RandomStream& rng) {
    const CellGeom& c = grid.cell(cell_id);
    auto v = grid.cell_vertices(cell_id);
    int k = rng.uniform_int(6);
    double a = rng.uniform01();
    double b = rng.uniform01();
    if (a + b > 1.0) {
        a = 1.0 - a;
        b = 1.0 - b;
    }
    return c.center + a * (v[k] - c.center) + b * (v[(k + 1) % 6] - c.center);
}

CapacityStats compute_capacity_stats(const std::vector<double>& samples) {
    if (samples.size() < 2) {
        throw std::invalid_argument("compute_capacity_stats: need at least 2 samples");
    }
    CapacityStats st;
    st.sample_count = static_cast<long long>(samples.size());
    double sum = 0.0;
    for (double c : samples) sum += c;
    st.mean_bps = sum / static_cast<double>(samples.size());

    std::vector<double> sorted(samples);
    std::size_t hi = sorted.size() / 2;
    std::nth_element(sorted.begin(), sorted.begin() + hi, sorted.end());
    double upper = sorted[hi];
    if (sorted.size() % 2 == 1) {
        st.median_bps = upper;
    } else {
        st.median_bps = 0.5 * (*std::max_element(sorted.begin(), sorted.begin() + hi) + upper);
    }

    // Welford on ln(c); exactly 0 for constant inputs.
    double m = 0.0, m2 = 0.0;
    long long n = 0;
    for (double c : samples) {
        double l = std::log(c);
        ++n;
        double delta = l - m;
        m += delta / static_cast<double>(n);
        m2 += delta * (l - m);
    }
    st.var_log_c = m2 / static_cast<double>(n - 1);
    return st;
}

CapacityStats estimate_capacity_stats(int cell_id, const Grid& grid, const RadioParams& params,
                                      int n_samples, RandomStream& rng) {
    if (n_samples < 2) throw std::invalid_argument("estimate_capacity_stats: need n_samples >= 2");
    std::vector<double> samples;
    samples.reserve(n_samples);
    for (int i = 0; i < n_samples; ++i) {
        Vec2 pos = uniform_point_in_cell(cell_id, grid, rng);
        samples.push_back(capacity_at(pos, cell_id, grid, params, rng));
    }
    return compute_capacity_stats(samples);
}

}  // namespace slicesim
