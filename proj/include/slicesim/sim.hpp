#pragma once

#include <cstdint>
#include <memory>
#include <ostream>
#include <vector>

#include "slicesim/config.hpp"
#include "slicesim/grid.hpp"
#include "slicesim/random.hpp"
#include "slicesim/vec2.hpp"

namespace slicesim {

// Streaming time average over [0, t_now] given the previous fold at t_prev;
// times are measured from the estimator origin. t_now = 0 returns count.
double update_time_average(double avg, double t_prev, double t_now, double count);

// Capacity source seen by users. The production model runs the full radio
// chain; tests substitute fixed-value models.
class CapacityModel {
public:
    virtual ~CapacityModel() = default;
    virtual double sample(int cell_id, Vec2 pos, RandomStream& rng) const = 0;
};

class RadioCapacityModel : public CapacityModel {
public:
    RadioCapacityModel(const Grid& grid, const RadioParams& params)
        : grid_(grid), params_(params) {}
    double sample(int cell_id, Vec2 pos, RandomStream& rng) const override;

private:
    const Grid& grid_;
    RadioParams params_;
};

class ConstantCapacityModel : public CapacityModel {
public:
    explicit ConstantCapacityModel(double bps) : bps_(bps) {}
    double sample(int, Vec2, RandomStream&) const override { return bps_; }

private:
    double bps_;
};

struct SimResult {
    int n_slices = 0;
    std::uint64_t seed = 0;
    double virtual_time = 0.0;  // length of the measured window (duration - warmup)

    // Per cell (index = cell id - 1): time-averaged occupancy by option,
    // option 0 being "not subscribed".
    std::vector<std::vector<double>> n_hat_by_option;
    std::vector<double> n_hat;      // row sums of the above
    std::vector<double> sigma_hat;  // (n_hat - n_hat_0)/n_hat, 0 for never-visited cells
    std::vector<std::vector<double>> rho_hat;

    // Capacity estimates recorded at subscription decisions in the measured
    // window, per cell.
    std::vector<std::vector<float>> capacity_samples;

    // Diagnostics.
    std::uint64_t events_processed = 0;
    std::uint64_t stale_events_skipped = 0;
    std::uint64_t handovers = 0;
    std::uint64_t subscription_decisions = 0;
    std::uint64_t option_changes = 0;
    std::uint64_t outside_choices = 0;  // decisions that picked no-subscription
    std::uint64_t audits_passed = 0;
};

// Event-driven execution of one replication; deterministic per (config,
// seed). An optional event log receives one line per processed event (use on
// small runs only). A custom capacity model overrides the radio chain.
SimResult run_simulation(const ScenarioConfig& cfg, std::uint64_t seed,
                         const CapacityModel* capacity_override = nullptr,
                         std::ostream* event_log = nullptr);

}  // namespace slicesim
