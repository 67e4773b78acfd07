#pragma once

#include <vector>

#include "slicesim/grid.hpp"
#include "slicesim/random.hpp"
#include "slicesim/vec2.hpp"

namespace slicesim {

struct RadioParams {
    double tx_power_dbm = 41.0;
    double max_gain_db = 17.0;
    double beamwidth_3db_rad = 1.2217304763960306;  // 70 degrees
    double max_attenuation_db = 20.0;
    double bandwidth_hz = 1.0e7;
    double carrier_hz = 2.5e9;
    double noise_density_dbm_hz = -174.0;
    double shadow_sigma_db = 4.0;
    double min_distance_m = 10.0;
    // Log-distance urban-micro line-of-sight coefficients:
    // PL = a*log10(d) + b + c*log10(fc/1 GHz) dB.
    double pathloss_coef_log_d = 22.0;
    double pathloss_const_db = 28.0;
    double pathloss_coef_log_fc = 20.0;
};

struct CapacityStats {
    double mean_bps = 0.0;
    double median_bps = 0.0;
    double var_log_c = 0.0;  // sample variance of ln(capacity), dimensionless
    long long sample_count = 0;
};

double db_to_linear(double db);
double linear_to_db(double x);
inline double dbm_to_mw(double dbm) { return db_to_linear(dbm); }
inline double mw_to_dbm(double mw) { return linear_to_db(mw); }

// Sector pattern G = Gmax - min{12 (theta/theta3dB)^2, Am}; theta folded
// into [0, pi].
double antenna_gain_db(double theta_rad, const RadioParams& p);

// Log-distance loss at effective distance max(d, min_distance_m).
double path_loss_db(double distance_m, const RadioParams& p);

double thermal_noise_dbm(const RadioParams& p);

double capacity_from_sinr(double sinr_linear, const RadioParams& p);

// Shannon capacity at p inside the given cell: serving link plus the six
// co-channel interferers, one fresh shadow-fading draw per link.
double capacity_at(Vec2 pos, int cell_id, const Grid& grid, const RadioParams& params,
                   RandomStream& rng);

Vec2 uniform_point_in_cell(int cell_id, const Grid& grid, RandomStream& rng);

// Mean, median and variance-of-log of a capacity sample set; n >= 2.
CapacityStats compute_capacity_stats(const std::vector<double>& samples);

// Monte-Carlo capacity statistics over positions uniform in the cell.
CapacityStats estimate_capacity_stats(int cell_id, const Grid& grid, const RadioParams& params,
                                      int n_samples, RandomStream& rng);

}  // namespace slicesim
