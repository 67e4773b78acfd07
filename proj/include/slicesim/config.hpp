#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "slicesim/logit.hpp"
#include "slicesim/radio.hpp"

namespace slicesim {

// Full experiment description. Serialized as a flat JSON object with exactly
// these field names; unknown keys are rejected so sweep typos cannot pass
// silently. Every field has a reference default, so {} is a valid document.
struct ScenarioConfig {
    // geometry and radio
    double isd_m = 200.0;
    RadioParams radio;

    // mobility
    double speed_kmh = 3.0;
    double t_pause_max_s = 120.0;
    double t_walk_max_s = 120.0;
    double d_update_m = 20.0;   // travel distance between capacity measurements
    double t_update_s = 24.0;   // EMA refresh period

    // subscription behavior
    double mu = 2.0;
    double nu = 1.0;
    double price = 1.0;
    double r0_bps = 5.0e5;
    double lambda_ema = 0.1;
    double t_subscription_s = 240.0;

    // population and tenants
    int users_per_cell = 250;
    int n_slices = 4;
    std::vector<double> shares;   // empty selects the triangular rule i/k, k = S(S+1)/2
    std::vector<double> weights;  // per-cell tenant weights; empty selects shares/57

    // experiment control
    int replications = 5;
    double duration_s = 1.0e5;  // total virtual time, including warm-up
    double warmup_s = 0.0;      // estimators and capacity samples discard [0, warmup)
    std::uint64_t master_seed = 1;
    std::string capacity_stat_source = "subscription";  // or "montecarlo"
    int capstats_samples = 100000;
    int audit_every_events = 0;  // 0 disables counter audits
    int threads = 0;             // 0 means one worker per hardware thread
    std::vector<double> case_e_lambda_ts_grid = {12.0, 24.0, 36.0, 48.0, 56.0, 72.0};

    double speed_mps() const { return speed_kmh / 3.6; }
    ChoiceParams choice_params() const { return {mu, nu, price, r0_bps}; }
    std::vector<double> effective_shares() const;
    SliceWeights effective_weights() const;
    int total_users() const;
};

// Throws std::invalid_argument with a field-specific message on any
// violated constraint.
void validate_config(const ScenarioConfig& cfg);

std::string config_to_json(const ScenarioConfig& cfg);
ScenarioConfig config_from_json(const std::string& text);
ScenarioConfig load_config(const std::string& path);
void save_config(const ScenarioConfig& cfg, const std::string& path);

}  // namespace slicesim
