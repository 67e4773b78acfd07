#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "slicesim/grid.hpp"
#include "slicesim/radio.hpp"
#include "slicesim/random.hpp"
#include "slicesim/stats.hpp"

using namespace slicesim;

namespace {

const Grid& grid200() {
    static Grid g(200.0);
    return g;
}

// Straight-line recomputation of the deterministic link budget (no shadowing).
double reference_capacity(Vec2 pos, int cell_id, const Grid& g, const RadioParams& rp) {
    auto rx_mw = [&](const CellGeom& c) {
        Vec2 d = g.wrapped_displacement(c.bs_pos, pos);
        double dist = std::max(norm(d), rp.min_distance_m);
        double theta = std::fabs(std::remainder(angle_of(d) - c.boresight_rad,
                                                2.0 * std::numbers::pi));
        double att = std::min(12.0 * (theta / rp.beamwidth_3db_rad) * (theta / rp.beamwidth_3db_rad),
                              rp.max_attenuation_db);
        double pl = rp.pathloss_coef_log_d * std::log10(dist) + rp.pathloss_const_db +
                    rp.pathloss_coef_log_fc * std::log10(rp.carrier_hz / 1.0e9);
        return std::pow(10.0, 0.1 * (rp.tx_power_dbm + rp.max_gain_db - att - pl));
    };
    const CellGeom& serving = g.cell(cell_id);
    double signal = rx_mw(serving);
    double interference = 0.0;
    for (int nid : serving.cochannel) interference += rx_mw(g.cell(nid));
    double noise = std::pow(10.0, 0.1 * (rp.noise_density_dbm_hz + 10.0 * std::log10(rp.bandwidth_hz)));
    return rp.bandwidth_hz * std::log2(1.0 + signal / (noise + interference));
}

}  // namespace

TEST_CASE("decibel conversions") {
    CHECK(db_to_linear(0.0) == 1.0);
    CHECK(db_to_linear(10.0) == doctest::Approx(10.0).epsilon(1e-14));
    CHECK(db_to_linear(-30.0) == doctest::Approx(1e-3).epsilon(1e-14));
    CHECK(linear_to_db(100.0) == doctest::Approx(20.0).epsilon(1e-14));
    RandomStream rng(5);
    for (int i = 0; i < 100; ++i) {
        double x = rng.uniform(-80.0, 80.0);
        CHECK(linear_to_db(db_to_linear(x)) == doctest::Approx(x).epsilon(1e-12));
    }
}

TEST_CASE("sector antenna pattern") {
    RadioParams rp;
    CHECK(antenna_gain_db(0.0, rp) == rp.max_gain_db);
    CHECK(antenna_gain_db(rp.beamwidth_3db_rad / 2.0, rp) ==
          doctest::Approx(rp.max_gain_db - 3.0).epsilon(1e-13));
    CHECK(antenna_gain_db(rp.beamwidth_3db_rad, rp) ==
          doctest::Approx(rp.max_gain_db - 12.0).epsilon(1e-13));
    CHECK(antenna_gain_db(std::numbers::pi, rp) ==
          doctest::Approx(rp.max_gain_db - rp.max_attenuation_db).epsilon(1e-13));
    for (double th : {0.2, 0.9, 2.4}) {
        CHECK(antenna_gain_db(th, rp) == antenna_gain_db(-th, rp));
        CHECK(antenna_gain_db(th, rp) ==
              doctest::Approx(antenna_gain_db(th + 2.0 * std::numbers::pi, rp)).epsilon(1e-12));
    }
}

TEST_CASE("log-distance path loss") {
    RadioParams rp;
    CHECK(path_loss_db(10.0, rp) == doctest::Approx(57.9588001734).epsilon(1e-10));
    CHECK(path_loss_db(200.0, rp) == doctest::Approx(86.581460078).epsilon(1e-10));
    CHECK(path_loss_db(3.0, rp) == path_loss_db(10.0, rp));
    CHECK(path_loss_db(400.0, rp) > path_loss_db(200.0, rp));
    CHECK_THROWS_AS(path_loss_db(-1.0, rp), std::invalid_argument);
}

TEST_CASE("thermal noise and Shannon mapping") {
    RadioParams rp;
    CHECK(thermal_noise_dbm(rp) == doctest::Approx(-104.0).epsilon(1e-14));
    CHECK(capacity_from_sinr(1.0, rp) == doctest::Approx(1.0e7).epsilon(1e-14));
    CHECK(capacity_from_sinr(3.0, rp) == doctest::Approx(2.0e7).epsilon(1e-14));
    CHECK(capacity_from_sinr(0.0, rp) == 0.0);
}

TEST_CASE("capacity matches an independent link-budget recomputation") {
    const Grid& g = grid200();
    RadioParams rp;
    rp.shadow_sigma_db = 0.0;
    RandomStream rng(31);
    for (int i = 0; i < 300; ++i) {
        int id = 1 + rng.uniform_int(57);
        Vec2 pos = uniform_point_in_cell(id, g, rng);
        double got = capacity_at(pos, id, g, rp, rng);
        double want = reference_capacity(pos, id, g, rp);
        CHECK(got == doctest::Approx(want).epsilon(1e-12));
        CHECK(got > 0.0);
        CHECK(std::isfinite(got));
    }
}

TEST_CASE("shadowing is reproducible per seed") {
    const Grid& g = grid200();
    RadioParams rp;
    Vec2 pos = g.cell(7).center + Vec2{12.0, -9.0};
    RandomStream a(1234), b(1234), c(99);
    double ca = capacity_at(pos, 7, g, rp, a);
    double cb = capacity_at(pos, 7, g, rp, b);
    double cc = capacity_at(pos, 7, g, rp, c);
    CHECK(ca == cb);
    CHECK(ca != cc);
}

TEST_CASE("batch capacity statistics") {
    CapacityStats st = compute_capacity_stats({1.0e6, 2.0e6, 4.0e6});
    CHECK(st.mean_bps == doctest::Approx(7.0e6 / 3.0).epsilon(1e-14));
    CHECK(st.median_bps == 2.0e6);
    double ln2 = std::log(2.0);
    CHECK(st.var_log_c == doctest::Approx(ln2 * ln2).epsilon(1e-12));
    CHECK(st.sample_count == 3);

    CapacityStats even = compute_capacity_stats({4.0e6, 1.0e6, 3.0e6, 2.0e6});
    CHECK(even.median_bps == doctest::Approx(2.5e6).epsilon(1e-14));

    CapacityStats flat = compute_capacity_stats({5.0e6, 5.0e6, 5.0e6, 5.0e6});
    CHECK(flat.var_log_c == 0.0);

    CHECK_THROWS_AS(compute_capacity_stats({1.0e6}), std::invalid_argument);
}

TEST_CASE("variance of log agrees with the two-pass formula") {
    RandomStream rng(8);
    std::vector<double> samples;
    std::vector<double> logs;
    for (int i = 0; i < 500; ++i) {
        double c = std::exp(rng.uniform(10.0, 18.0));
        samples.push_back(c);
        logs.push_back(std::log(c));
    }
    CapacityStats st = compute_capacity_stats(samples);
    CHECK(st.var_log_c == doctest::Approx(sample_variance(logs)).epsilon(1e-11));
}

TEST_CASE("monte-carlo cell statistics are deterministic and right-skewed") {
    const Grid& g = grid200();
    RadioParams rp;
    RandomStream a(77), b(77);
    CapacityStats sa = estimate_capacity_stats(1, g, rp, 5000, a);
    CapacityStats sb = estimate_capacity_stats(1, g, rp, 5000, b);
    CHECK(sa.mean_bps == sb.mean_bps);
    CHECK(sa.median_bps == sb.median_bps);
    CHECK(sa.var_log_c == sb.var_log_c);
    CHECK(sa.sample_count == 5000);
    CHECK(sa.mean_bps > sa.median_bps);
    CHECK(sa.var_log_c > 0.3);
    CHECK(sa.var_log_c < 0.8);
    CHECK_THROWS_AS(estimate_capacity_stats(1, g, rp, 1, a), std::invalid_argument);
}
