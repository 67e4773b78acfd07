#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "slicesim/analytic.hpp"
#include "slicesim/config.hpp"
#include "slicesim/csv.hpp"
#include "slicesim/grid.hpp"
#include "slicesim/harness.hpp"
#include "slicesim/radio.hpp"
#include "slicesim/random.hpp"
#include "slicesim/sim.hpp"

namespace fs = std::filesystem;
using namespace slicesim;

namespace {

std::ofstream open_out(const std::string& path) {
    fs::path dir = fs::path(path).parent_path();
    if (!dir.empty()) fs::create_directories(dir);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    return in;
}

void cmd_grid_dump(double isd, const std::string& out_path, const std::string& verts_path) {
    Grid grid(isd);
    auto out = open_out(out_path);
    out << "cell_id,cluster_id,bs_x,bs_y,boresight_rad,freq\n";
    for (int id = 1; id <= kNumCells; ++id) {
        const CellGeom& c = grid.cell(id);
        out << id << ',' << c.cluster_id << ',' << format_double(c.bs_pos.x) << ','
            << format_double(c.bs_pos.y) << ',' << format_double(c.boresight_rad) << ',' << c.freq
            << '\n';
    }
    if (!verts_path.empty()) {
        auto vout = open_out(verts_path);
        vout << "cell_id,corner,x,y\n";
        for (int id = 1; id <= kNumCells; ++id) {
            auto vs = grid.cell_vertices(id);
            for (int k = 0; k < 6; ++k) {
                vout << id << ',' << k << ',' << format_double(vs[k].x) << ','
                     << format_double(vs[k].y) << '\n';
            }
        }
    }
    std::cout << "wrote " << out_path << '\n';
}

void cmd_capstats(const std::string& cfg_path, int samples, std::int64_t seed,
                  const std::string& out_path) {
    ScenarioConfig cfg = load_config(cfg_path);
    validate_config(cfg);
    int n = samples > 0 ? samples : cfg.capstats_samples;
    std::uint64_t s = seed >= 0 ? static_cast<std::uint64_t>(seed) : cfg.master_seed;
    Grid grid(cfg.isd_m);
    RandomStream rng(s);
    std::vector<CapacityStats> stats;
    stats.reserve(kNumCells);
    for (int id = 1; id <= kNumCells; ++id) {
        stats.push_back(estimate_capacity_stats(id, grid, cfg.radio, n, rng));
    }
    auto out = open_out(out_path);
    write_capacity_stats_csv(stats, s, out);
    std::cout << "wrote " << out_path << '\n';
}

void write_sim_csv(const SimResult& res, std::ostream& out) {
    out << "cell_id,sigma_hat";
    for (int i = 1; i <= res.n_slices; ++i) out << ",rho_hat_" << i;
    out << ",n_hat,seed,virtual_time\n";
    for (std::size_t j = 0; j < res.n_hat.size(); ++j) {
        out << (j + 1) << ',' << format_double(res.sigma_hat[j]);
        for (int i = 0; i < res.n_slices; ++i) out << ',' << format_double(res.rho_hat[j][i]);
        out << ',' << format_double(res.n_hat[j]) << ',' << res.seed << ','
            << format_double(res.virtual_time) << '\n';
    }
}

void cmd_simulate(const std::string& cfg_path, std::int64_t seed, const std::string& out_path,
                  const std::string& samples_out, const std::string& event_log) {
    ScenarioConfig cfg = load_config(cfg_path);
    std::uint64_t s = seed >= 0 ? static_cast<std::uint64_t>(seed) : cfg.master_seed;
    std::ofstream log;
    std::ostream* logp = nullptr;
    if (!event_log.empty()) {
        log = open_out(event_log);
        log << "time,event,user,cell,option\n";
        logp = &log;
    }
    SimResult res = run_simulation(cfg, s, nullptr, logp);
    auto out = open_out(out_path);
    write_sim_csv(res, out);
    if (!samples_out.empty()) {
        std::vector<CapacityStats> stats;
        stats.reserve(res.capacity_samples.size());
        for (std::size_t j = 0; j < res.capacity_samples.size(); ++j) {
            const auto& cs = res.capacity_samples[j];
            if (cs.size() < 2) {
                throw std::runtime_error("cell " + std::to_string(j + 1) +
                                         " recorded fewer than 2 capacity samples");
            }
            stats.push_back(compute_capacity_stats(std::vector<double>(cs.begin(), cs.end())));
        }
        auto sout = open_out(samples_out);
        write_capacity_stats_csv(stats, s, sout);
    }
    std::cout << "wrote " << out_path << " events=" << res.events_processed
              << " handovers=" << res.handovers << " decisions=" << res.subscription_decisions
              << '\n';
}

std::vector<double> read_n_hat(const std::string& sim_path) {
    auto in = open_in(sim_path);
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("sim csv: empty input");
    auto header = split_csv_line(line);
    int col = -1;
    for (std::size_t k = 0; k < header.size(); ++k) {
        if (header[k] == "n_hat") col = static_cast<int>(k);
    }
    if (col < 0) throw std::invalid_argument("sim csv: no n_hat column");
    std::vector<double> n_hat;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto f = split_csv_line(line);
        if (static_cast<int>(f.size()) <= col) {
            throw std::invalid_argument("sim csv: bad row: " + line);
        }
        n_hat.push_back(parse_double(f[col]));
    }
    return n_hat;
}

void write_indicators(const IndicatorSet& set, int n_slices, std::ostream& out, bool header) {
    if (header) {
        out << "cell_id,variant,sigma";
        for (int i = 1; i <= n_slices; ++i) out << ",rho_" << i;
        out << ",beta_used,gamma_used\n";
    }
    for (const CellIndicators& c : set.cells) {
        out << c.cell_id << ',' << variant_name(set.variant) << ',' << format_double(c.sigma);
        for (double x : c.rho) out << ',' << format_double(x);
        out << ',' << format_double(c.beta_used) << ',' << format_double(c.gamma_used) << '\n';
    }
}

void cmd_analytic(const std::string& cfg_path, const std::string& stats_path,
                  const std::string& variant, const std::string& sim_path,
                  const std::string& out_path) {
    ScenarioConfig cfg = load_config(cfg_path);
    validate_config(cfg);
    auto in = open_in(stats_path);
    std::vector<CapacityStats> stats = read_capacity_stats_csv(in);
    std::vector<double> n_hat(stats.size(), static_cast<double>(cfg.users_per_cell));
    if (!sim_path.empty()) {
        n_hat = read_n_hat(sim_path);
        if (n_hat.size() != stats.size()) {
            throw std::invalid_argument("sim csv and stats csv disagree on the cell count");
        }
    }
    std::vector<IndicatorVariant> variants;
    if (variant == "all") {
        variants = {IndicatorVariant::MeanCapacity, IndicatorVariant::MedianCapacity,
                    IndicatorVariant::ModifiedBeta};
    } else {
        variants = {variant_from_name(variant)};
    }
    auto out = open_out(out_path);
    bool header = true;
    for (IndicatorVariant v : variants) {
        IndicatorSet set =
            compute_indicators(stats, n_hat, cfg.effective_weights(), cfg.choice_params(), v);
        write_indicators(set, cfg.n_slices, out, header);
        header = false;
    }
    std::cout << "wrote " << out_path << '\n';
}

void write_rows(const std::vector<ComparisonRow>& rows, const std::string& out_dir,
                const std::string& stem, const std::string& format) {
    fs::create_directories(out_dir);
    std::string path = out_dir + "/" + stem + "." + format;
    auto out = open_out(path);
    if (format == "csv") {
        write_comparison_csv(rows, out);
    } else {
        write_comparison_json(rows, out);
    }
    std::cout << "wrote " << path << '\n';
}

void cmd_compare(const std::string& case_id, const std::string& cfg_path,
                 const std::string& out_dir, int reps, std::int64_t seed,
                 const std::string& format) {
    ScenarioConfig base = load_config(cfg_path);
    if (reps > 0) base.replications = reps;
    if (seed >= 0) base.master_seed = static_cast<std::uint64_t>(seed);
    auto rows = run_case(case_id[0], base);
    write_rows(rows, out_dir, "case_" + case_id, format);
}

void cmd_sweep(const std::string& param, const std::vector<double>& values,
               const std::string& cfg_path, const std::string& out_dir, int reps,
               std::int64_t seed, const std::string& format) {
    ScenarioConfig base = load_config(cfg_path);
    if (reps > 0) base.replications = reps;
    if (seed >= 0) base.master_seed = static_cast<std::uint64_t>(seed);
    auto rows = run_sweep(param, values, base);
    write_rows(rows, out_dir, "sweep_" + param, format);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sliced-network subscription simulator"};
    app.require_subcommand(1);

    auto* gd = app.add_subcommand("grid-dump", "write cell geometry as CSV");
    double gd_isd = 200.0;
    std::string gd_out = "grid.csv";
    std::string gd_verts;
    gd->add_option("--isd", gd_isd, "inter-site distance in meters");
    gd->add_option("--out", gd_out, "output CSV path");
    gd->add_option("--vertices", gd_verts, "also write cell corners to this path");
    gd->callback([&] { cmd_grid_dump(gd_isd, gd_out, gd_verts); });

    auto* cs = app.add_subcommand("capstats", "per-cell capacity statistics from static sampling");
    std::string cs_cfg;
    int cs_samples = 0;
    std::int64_t cs_seed = -1;
    std::string cs_out = "capstats.csv";
    cs->add_option("--config", cs_cfg, "scenario config JSON")->required();
    cs->add_option("--samples", cs_samples, "samples per cell (default from config)");
    cs->add_option("--seed", cs_seed, "RNG seed (default from config)");
    cs->add_option("--out", cs_out, "output CSV path");
    cs->callback([&] { cmd_capstats(cs_cfg, cs_samples, cs_seed, cs_out); });

    auto* sim = app.add_subcommand("simulate", "run one replication");
    std::string sim_cfg;
    std::int64_t sim_seed = -1;
    std::string sim_out = "simulate.csv";
    std::string sim_samples_out;
    std::string sim_log;
    sim->add_option("--config", sim_cfg, "scenario config JSON")->required();
    sim->add_option("--seed", sim_seed, "RNG seed (default from config)");
    sim->add_option("--out", sim_out, "per-cell results CSV");
    sim->add_option("--samples-out", sim_samples_out,
                    "also write capacity statistics pooled from subscription decisions");
    sim->add_option("--event-log", sim_log, "write one line per event (small runs only)");
    sim->callback([&] { cmd_simulate(sim_cfg, sim_seed, sim_out, sim_samples_out, sim_log); });

    auto* an = app.add_subcommand("analytic", "equilibrium indicators from capacity statistics");
    std::string an_cfg;
    std::string an_stats;
    std::string an_variant = "all";
    std::string an_sim;
    std::string an_out = "analytic.csv";
    an->add_option("--config", an_cfg, "scenario config JSON")->required();
    an->add_option("--stats", an_stats, "capacity statistics CSV")->required();
    an->add_option("--variant", an_variant, "indicator variant")
        ->check(CLI::IsMember({"mean", "median", "modified", "all"}));
    an->add_option("--sim", an_sim, "simulate CSV supplying per-cell populations");
    an->add_option("--out", an_out, "output CSV path");
    an->callback([&] { cmd_analytic(an_cfg, an_stats, an_variant, an_sim, an_out); });

    auto* cmp = app.add_subcommand("compare", "simulation vs analytic over one sweep case");
    std::string cmp_case;
    std::string cmp_cfg;
    std::string cmp_out = "out";
    int cmp_reps = 0;
    std::int64_t cmp_seed = -1;
    std::string cmp_format = "csv";
    cmp->add_option("--case", cmp_case, "sweep case")
        ->required()
        ->check(CLI::IsMember({"a", "b", "c", "d", "e"}));
    cmp->add_option("--config", cmp_cfg, "scenario config JSON")->required();
    cmp->add_option("--out", cmp_out, "output directory");
    cmp->add_option("--reps", cmp_reps, "replications per point (default from config)");
    cmp->add_option("--seed", cmp_seed, "master seed (default from config)");
    cmp->add_option("--format", cmp_format, "output format")
        ->check(CLI::IsMember({"csv", "json"}));
    cmp->callback(
        [&] { cmd_compare(cmp_case, cmp_cfg, cmp_out, cmp_reps, cmp_seed, cmp_format); });

    auto* sw = app.add_subcommand("sweep", "simulation vs analytic over an explicit grid");
    std::string sw_param;
    std::vector<double> sw_values;
    std::string sw_cfg;
    std::string sw_out = "out";
    int sw_reps = 0;
    std::int64_t sw_seed = -1;
    std::string sw_format = "csv";
    sw->add_option("--param", sw_param, "swept parameter")
        ->required()
        ->check(CLI::IsMember({"users_per_cell", "n_slices", "r0_bps", "lambda_ema", "lambda_ts"}));
    sw->add_option("--values", sw_values, "comma-separated grid")->required()->delimiter(',');
    sw->add_option("--config", sw_cfg, "scenario config JSON")->required();
    sw->add_option("--out", sw_out, "output directory");
    sw->add_option("--reps", sw_reps, "replications per point (default from config)");
    sw->add_option("--seed", sw_seed, "master seed (default from config)");
    sw->add_option("--format", sw_format, "output format")->check(CLI::IsMember({"csv", "json"}));
    sw->callback(
        [&] { cmd_sweep(sw_param, sw_values, sw_cfg, sw_out, sw_reps, sw_seed, sw_format); });

    auto* ic = app.add_subcommand("init-config", "write the default scenario config");
    std::string ic_out = "config.json";
    ic->add_option("--out", ic_out, "output path");
    ic->callback([&] {
        fs::path dir = fs::path(ic_out).parent_path();
        if (!dir.empty()) fs::create_directories(dir);
        save_config(ScenarioConfig{}, ic_out);
        std::cout << "wrote " << ic_out << '\n';
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
