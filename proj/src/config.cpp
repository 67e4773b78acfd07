#include "slicesim/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "slicesim/grid.hpp"

namespace slicesim {

using nlohmann::json;

std::vector<double> ScenarioConfig::effective_shares() const {
    if (!shares.empty()) return shares;
    std::vector<double> out(n_slices);
    double k = n_slices * (n_slices + 1) / 2.0;
    for (int i = 0; i < n_slices; ++i) out[i] = (i + 1) / k;
    return out;
}

SliceWeights ScenarioConfig::effective_weights() const {
    if (!weights.empty()) return weights;
    SliceWeights w = effective_shares();
    for (double& x : w) x /= kNumCells;
    return w;
}

int ScenarioConfig::total_users() const { return users_per_cell * kNumCells; }

void validate_config(const ScenarioConfig& cfg) {
    auto fail = [](const std::string& msg) { throw std::invalid_argument("config: " + msg); };
    if (!(cfg.isd_m > 0.0)) fail("isd_m must be positive");
    if (!(cfg.radio.bandwidth_hz > 0.0)) fail("bandwidth_hz must be positive");
    if (!(cfg.radio.carrier_hz > 0.0)) fail("carrier_hz must be positive");
    if (cfg.radio.shadow_sigma_db < 0.0) fail("shadow_sigma_db must be non-negative");
    if (!(cfg.radio.min_distance_m > 0.0)) fail("min_distance_m must be positive");
    if (!(cfg.speed_kmh > 0.0)) fail("speed_kmh must be positive");
    if (cfg.t_pause_max_s < 0.0) fail("t_pause_max_s must be non-negative");
    if (cfg.t_walk_max_s < 0.0) fail("t_walk_max_s must be non-negative");
    if (!(cfg.t_pause_max_s + cfg.t_walk_max_s > 0.0)) {
        fail("t_pause_max_s and t_walk_max_s cannot both be zero");
    }
    if (!(cfg.d_update_m > 0.0)) fail("d_update_m must be positive");
    if (!(cfg.t_update_s > 0.0)) fail("t_update_s must be positive");
    if (!(cfg.mu > 0.0)) fail("mu must be positive");
    if (!(cfg.nu > 0.0)) fail("nu must be positive");
    if (!(cfg.price > 0.0)) fail("price must be positive");
    if (cfg.r0_bps < 0.0) fail("r0_bps must be non-negative");
    if (!(cfg.lambda_ema > 0.0 && cfg.lambda_ema < 1.0)) fail("lambda_ema must be in (0,1)");
    if (!(cfg.t_subscription_s > 0.0)) fail("t_subscription_s must be positive");
    if (cfg.users_per_cell < 1) fail("users_per_cell must be >= 1");
    if (cfg.n_slices < 1 || cfg.n_slices > 64) fail("n_slices must be in [1,64]");
    if (cfg.replications < 1) fail("replications must be >= 1");
    if (!(cfg.duration_s > 0.0)) fail("duration_s must be positive");
    if (cfg.warmup_s < 0.0) fail("warmup_s must be non-negative");
    if (!(cfg.duration_s > cfg.warmup_s)) fail("duration_s must exceed warmup_s");
    if (cfg.capacity_stat_source != "subscription" && cfg.capacity_stat_source != "montecarlo") {
        fail("capacity_stat_source must be 'subscription' or 'montecarlo'");
    }
    if (cfg.capstats_samples < 2) fail("capstats_samples must be >= 2");
    if (cfg.audit_every_events < 0) fail("audit_every_events must be non-negative");
    if (cfg.threads < 0) fail("threads must be non-negative");
    if (cfg.case_e_lambda_ts_grid.empty()) fail("case_e_lambda_ts_grid cannot be empty");
    for (double v : cfg.case_e_lambda_ts_grid) {
        if (!(v > 0.0)) fail("case_e_lambda_ts_grid entries must be positive");
    }

    if (!cfg.shares.empty()) {
        if (static_cast<int>(cfg.shares.size()) != cfg.n_slices) {
            fail("shares must have n_slices entries");
        }
        double total = 0.0;
        for (double s : cfg.shares) {
            if (!(s > 0.0)) fail("shares must be positive");
            total += s;
        }
        if (std::fabs(total - 1.0) > 1e-9) fail("shares must sum to 1");
    }
    if (!cfg.weights.empty()) {
        if (static_cast<int>(cfg.weights.size()) != cfg.n_slices) {
            fail("weights must have n_slices entries");
        }
        auto shares = cfg.effective_shares();
        for (int i = 0; i < cfg.n_slices; ++i) {
            if (!(cfg.weights[i] > 0.0)) fail("weights must be positive");
            if (std::fabs(cfg.weights[i] * kNumCells - shares[i]) > 1e-9) {
                fail("weights must sum to the tenant share across the 57 cells");
            }
        }
    }
}

namespace {

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "isd_m", "tx_power_dbm", "max_gain_db", "beamwidth_3db_rad", "max_attenuation_db",
        "bandwidth_hz", "carrier_hz", "noise_density_dbm_hz", "shadow_sigma_db", "min_distance_m",
        "pathloss_coef_log_d", "pathloss_const_db", "pathloss_coef_log_fc",
        "speed_kmh", "t_pause_max_s", "t_walk_max_s", "d_update_m", "t_update_s",
        "mu", "nu", "price", "r0_bps", "lambda_ema", "t_subscription_s",
        "users_per_cell", "n_slices", "shares", "weights",
        "replications", "duration_s", "warmup_s", "master_seed", "capacity_stat_source",
        "capstats_samples", "audit_every_events", "threads", "case_e_lambda_ts_grid",
    };
    return keys;
}

}  // namespace

std::string config_to_json(const ScenarioConfig& c) {
    json j;
    j["isd_m"] = c.isd_m;
    j["tx_power_dbm"] = c.radio.tx_power_dbm;
    j["max_gain_db"] = c.radio.max_gain_db;
    j["beamwidth_3db_rad"] = c.radio.beamwidth_3db_rad;
    j["max_attenuation_db"] = c.radio.max_attenuation_db;
    j["bandwidth_hz"] = c.radio.bandwidth_hz;
    j["carrier_hz"] = c.radio.carrier_hz;
    j["noise_density_dbm_hz"] = c.radio.noise_density_dbm_hz;
    j["shadow_sigma_db"] = c.radio.shadow_sigma_db;
    j["min_distance_m"] = c.radio.min_distance_m;
    j["pathloss_coef_log_d"] = c.radio.pathloss_coef_log_d;
    j["pathloss_const_db"] = c.radio.pathloss_const_db;
    j["pathloss_coef_log_fc"] = c.radio.pathloss_coef_log_fc;
    j["speed_kmh"] = c.speed_kmh;
    j["t_pause_max_s"] = c.t_pause_max_s;
    j["t_walk_max_s"] = c.t_walk_max_s;
    j["d_update_m"] = c.d_update_m;
    j["t_update_s"] = c.t_update_s;
    j["mu"] = c.mu;
    j["nu"] = c.nu;
    j["price"] = c.price;
    j["r0_bps"] = c.r0_bps;
    j["lambda_ema"] = c.lambda_ema;
    j["t_subscription_s"] = c.t_subscription_s;
    j["users_per_cell"] = c.users_per_cell;
    j["n_slices"] = c.n_slices;
    j["shares"] = c.shares;
    j["weights"] = c.weights;
    j["replications"] = c.replications;
    j["duration_s"] = c.duration_s;
    j["warmup_s"] = c.warmup_s;
    j["master_seed"] = c.master_seed;
    j["capacity_stat_source"] = c.capacity_stat_source;
    j["capstats_samples"] = c.capstats_samples;
    j["audit_every_events"] = c.audit_every_events;
    j["threads"] = c.threads;
    j["case_e_lambda_ts_grid"] = c.case_e_lambda_ts_grid;
    return j.dump(2) + "\n";
}

ScenarioConfig config_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw std::invalid_argument("config: document must be a JSON object");
    for (const auto& item : j.items()) {
        if (!known_keys().count(item.key())) {
            throw std::invalid_argument("config: unknown field '" + item.key() + "'");
        }
    }
    ScenarioConfig c;
    auto get = [&](const char* key, auto& field) {
        if (j.contains(key)) j.at(key).get_to(field);
    };
    get("isd_m", c.isd_m);
    get("tx_power_dbm", c.radio.tx_power_dbm);
    get("max_gain_db", c.radio.max_gain_db);
    get("beamwidth_3db_rad", c.radio.beamwidth_3db_rad);
    get("max_attenuation_db", c.radio.max_attenuation_db);
    get("bandwidth_hz", c.radio.bandwidth_hz);
    get("carrier_hz", c.radio.carrier_hz);
    get("noise_density_dbm_hz", c.radio.noise_density_dbm_hz);
    get("shadow_sigma_db", c.radio.shadow_sigma_db);
    get("min_distance_m", c.radio.min_distance_m);
    get("pathloss_coef_log_d", c.radio.pathloss_coef_log_d);
    get("pathloss_const_db", c.radio.pathloss_const_db);
    get("pathloss_coef_log_fc", c.radio.pathloss_coef_log_fc);
    get("speed_kmh", c.speed_kmh);
    get("t_pause_max_s", c.t_pause_max_s);
    get("t_walk_max_s", c.t_walk_max_s);
    get("d_update_m", c.d_update_m);
    get("t_update_s", c.t_update_s);
    get("mu", c.mu);
    get("nu", c.nu);
    get("price", c.price);
    get("r0_bps", c.r0_bps);
    get("lambda_ema", c.lambda_ema);
    get("t_subscription_s", c.t_subscription_s);
    get("users_per_cell", c.users_per_cell);
    get("n_slices", c.n_slices);
    get("shares", c.shares);
    get("weights", c.weights);
    get("replications", c.replications);
    get("duration_s", c.duration_s);
    get("warmup_s", c.warmup_s);
    get("master_seed", c.master_seed);
    get("capacity_stat_source", c.capacity_stat_source);
    get("capstats_samples", c.capstats_samples);
    get("audit_every_events", c.audit_every_events);
    get("threads", c.threads);
    get("case_e_lambda_ts_grid", c.case_e_lambda_ts_grid);
    validate_config(c);
    return c;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return config_from_json(ss.str());
}

void save_config(const ScenarioConfig& cfg, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("config: cannot write " + path);
    out << config_to_json(cfg);
}

}  // namespace slicesim
