#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "slicesim/analytic.hpp"
#include "slicesim/config.hpp"
#include "slicesim/radio.hpp"
#include "slicesim/sim.hpp"

namespace slicesim {

// |simulated - analytic| / simulated
double relative_error(double simulated, double analytic);

struct Interval {
    double mean = 0.0;
    double halfwidth = 0.0;
};

// Two-sided Student-t interval on the replication mean.
Interval confidence_interval(const std::vector<double>& values, double level = 0.99);

// One replication reduced to the grid-level aggregates the comparison needs:
// occupancy-weighted sigma and rho over all cells, mean per-cell population,
// and capacity statistics pooled over every cell's samples.
struct RepSummary {
    std::uint64_t seed = 0;
    double sigma_hat = 0.0;
    std::vector<double> rho_hat;
    double n_bar = 0.0;
    CapacityStats stats;
};

RepSummary summarize_replication(const SimResult& res);

// Static alternative to subscription-time samples: capacities at uniform
// positions over the whole grid.
CapacityStats montecarlo_capacity_stats(const ScenarioConfig& cfg, int n_samples,
                                        std::uint64_t seed,
                                        const CapacityModel* capacity_override = nullptr);

struct ExperimentResult {
    ScenarioConfig config;
    std::vector<double> sigma_hat_reps;  // one entry per replication, in seed order
    double sigma_hat = 0.0;              // replication mean
    double sigma_ci99 = 0.0;             // CI half-width, 0 with a single replication
    std::vector<double> rho_hat;         // replication mean, per tenant

    double sigma_mean_c = 0.0;    // analytic, mean-capacity indicator
    double sigma_median_c = 0.0;  // analytic, median-capacity indicator
    double sigma_mod_beta = 0.0;  // analytic, variance-corrected sensitivity
    double err_mean_c = 0.0;
    double err_median_c = 0.0;
    double err_mod_beta = 0.0;

    std::vector<double> rho_beta;      // analytic shares at the base sensitivity
    std::vector<double> rho_mod_beta;  // analytic shares at the corrected sensitivity
    double rho_err = 0.0;              // mean over tenants vs rho_beta
    double rho_err_mod_beta = 0.0;

    double beta_base = 0.0;
    double beta_modified = 0.0;  // replication mean
    double var_log_c = 0.0;      // replication mean of the pooled value
};

// Runs cfg.replications seeded replications (seed k = derive_seed(master, k))
// and compares against the analytic indicators built from the pooled capacity
// statistics. cfg.capacity_stat_source picks the statistics source.
ExperimentResult run_replicated(const ScenarioConfig& cfg,
                                const CapacityModel* capacity_override = nullptr);

// Applies one swept parameter. Supported names: users_per_cell, n_slices,
// r0_bps, lambda_ema, lambda_ts (rescales t_subscription_s at fixed lambda).
ScenarioConfig with_param(const ScenarioConfig& base, const std::string& param, double value);

struct CasePoint {
    std::string param;
    double value = 0.0;
    ScenarioConfig config;
};

// The five sweep grids, case a through e, derived from the base config.
std::vector<CasePoint> case_points(char case_id, const ScenarioConfig& base);

struct ComparisonRow {
    std::string case_id;
    std::string param;
    double param_value = 0.0;
    int reps = 0;
    std::uint64_t master_seed = 0;
    double sigma_hat = 0.0;
    double sigma_ci99 = 0.0;
    double sigma_mean_c = 0.0;
    double err_mean_c = 0.0;
    double sigma_median_c = 0.0;
    double err_median_c = 0.0;
    double sigma_mod_beta = 0.0;
    double err_mod_beta = 0.0;
    double rho_err = 0.0;
    double rho_err_mod_beta = 0.0;
};

ComparisonRow to_row(const ExperimentResult& r, const std::string& case_id,
                     const std::string& param, double value);

// Runs every point of one case; replication count, seeds and worker count come
// from the base config. Points x replications execute on a bounded pool,
// aggregation is deterministic.
std::vector<ComparisonRow> run_case(char case_id, const ScenarioConfig& base,
                                    const CapacityModel* capacity_override = nullptr);

// Same machinery over an explicit grid of one parameter.
std::vector<ComparisonRow> run_sweep(const std::string& param, const std::vector<double>& values,
                                     const ScenarioConfig& base,
                                     const CapacityModel* capacity_override = nullptr);

extern const char* const kComparisonHeader;

void write_comparison_csv(const std::vector<ComparisonRow>& rows, std::ostream& out);
std::vector<ComparisonRow> read_comparison_csv(std::istream& in);
void write_comparison_json(const std::vector<ComparisonRow>& rows, std::ostream& out);

void write_capacity_stats_csv(const std::vector<CapacityStats>& stats, std::uint64_t seed,
                              std::ostream& out);
std::vector<CapacityStats> read_capacity_stats_csv(std::istream& in);

}  // namespace slicesim
