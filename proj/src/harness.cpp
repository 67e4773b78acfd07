#include "slicesim/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <istream>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "slicesim/csv.hpp"
#include "slicesim/grid.hpp"
#include "slicesim/random.hpp"
#include "slicesim/stats.hpp"

namespace slicesim {

using nlohmann::json;

double relative_error(double simulated, double analytic) {
    if (!(simulated > 0.0)) {
        throw std::domain_error("relative_error: simulated value must be positive");
    }
    return std::abs(simulated - analytic) / simulated;
}

Interval confidence_interval(const std::vector<double>& values, double level) {
    if (values.size() < 2) {
        throw std::invalid_argument("confidence_interval: need at least 2 replications");
    }
    if (!(level > 0.0 && level < 1.0)) {
        throw std::invalid_argument("confidence_interval: level must be in (0,1)");
    }
    int n = static_cast<int>(values.size());
    double m = mean(values);
    double s = std::sqrt(sample_variance(values));
    double t = student_t_quantile(0.5 * (1.0 + level), n - 1);
    return {m, t * s / std::sqrt(static_cast<double>(n))};
}

RepSummary summarize_replication(const SimResult& res) {
    RepSummary s;
    s.seed = res.seed;
    int n_cells = static_cast<int>(res.n_hat.size());
    double tot = 0.0;
    double inside = 0.0;
    std::vector<double> per_tenant(res.n_slices, 0.0);
    for (int j = 0; j < n_cells; ++j) {
        tot += res.n_hat[j];
        inside += res.n_hat[j] - res.n_hat_by_option[j][0];
        for (int i = 0; i < res.n_slices; ++i) per_tenant[i] += res.n_hat_by_option[j][i + 1];
    }
    s.sigma_hat = tot > 0.0 ? inside / tot : 0.0;
    s.rho_hat.assign(res.n_slices, 0.0);
    if (inside > 0.0) {
        for (int i = 0; i < res.n_slices; ++i) s.rho_hat[i] = per_tenant[i] / inside;
    }
    s.n_bar = n_cells > 0 ? tot / n_cells : 0.0;
    std::vector<double> pooled;
    for (const auto& cell_samples : res.capacity_samples) {
        pooled.insert(pooled.end(), cell_samples.begin(), cell_samples.end());
    }
    s.stats = compute_capacity_stats(pooled);
    return s;
}

CapacityStats montecarlo_capacity_stats(const ScenarioConfig& cfg, int n_samples,
                                        std::uint64_t seed,
                                        const CapacityModel* capacity_override) {
    if (n_samples < 2) {
        throw std::invalid_argument("montecarlo_capacity_stats: need at least 2 samples");
    }
    Grid grid(cfg.isd_m);
    RadioCapacityModel radio(grid, cfg.radio);
    const CapacityModel* model = capacity_override ? capacity_override : &radio;
    RandomStream rng(seed);
    std::vector<double> samples;
    samples.reserve(n_samples);
    for (int k = 0; k < n_samples; ++k) {
        int cell_id = 1 + rng.uniform_int(kNumCells);
        Vec2 pos = uniform_point_in_cell(cell_id, grid, rng);
        samples.push_back(model->sample(cell_id, pos, rng));
    }
    return compute_capacity_stats(samples);
}

namespace {

struct Job {
    const ScenarioConfig* cfg;
    int rep;
    RepSummary* slot;
};

void run_one(const Job& job, const CapacityModel* capacity_override) {
    std::uint64_t seed = derive_seed(job.cfg->master_seed, static_cast<std::uint64_t>(job.rep));
    SimResult res = run_simulation(*job.cfg, seed, capacity_override);
    RepSummary s = summarize_replication(res);
    if (job.cfg->capacity_stat_source == "montecarlo") {
        s.stats = montecarlo_capacity_stats(*job.cfg, job.cfg->capstats_samples,
                                            derive_seed(seed, 77), capacity_override);
    }
    *job.slot = std::move(s);
}

void run_jobs(const std::vector<Job>& jobs, int threads, const CapacityModel* capacity_override) {
    int n_workers = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    if (n_workers < 1) n_workers = 1;
    n_workers = std::min<int>(n_workers, static_cast<int>(jobs.size()));
    if (n_workers <= 1) {
        for (const Job& job : jobs) run_one(job, capacity_override);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex err_mutex;
    std::exception_ptr first_error;
    auto worker = [&] {
        for (;;) {
            std::size_t k = next.fetch_add(1);
            if (k >= jobs.size()) return;
            try {
                run_one(jobs[k], capacity_override);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

ExperimentResult aggregate(const ScenarioConfig& cfg, const std::vector<RepSummary>& reps) {
    ExperimentResult r;
    r.config = cfg;
    int n_reps = static_cast<int>(reps.size());
    SliceWeights weights = cfg.effective_weights();
    int S = cfg.n_slices;
    bool r0_zero = cfg.r0_bps <= 0.0;
    r.beta_base = beta_sensitivity(cfg.mu, cfg.nu);
    r.rho_beta = rho(weights, r.beta_base);

    r.rho_hat.assign(S, 0.0);
    r.rho_mod_beta.assign(S, 0.0);
    double sigma_mean_acc = 0.0;
    double sigma_median_acc = 0.0;
    double sigma_mod_acc = 0.0;
    for (const RepSummary& s : reps) {
        r.sigma_hat_reps.push_back(s.sigma_hat);
        for (int i = 0; i < S; ++i) r.rho_hat[i] += s.rho_hat[i] / n_reps;
        double g_mean = 0.0;
        double g_median = 0.0;
        if (!r0_zero) {
            g_mean = normalized_capacity(s.stats.mean_bps, s.n_bar, cfg.price, cfg.r0_bps);
            g_median = normalized_capacity(s.stats.median_bps, s.n_bar, cfg.price, cfg.r0_bps);
        }
        double beta_mod = modified_beta(cfg.mu, cfg.nu, decimal_log_variance(s.stats.var_log_c));
        sigma_mean_acc += solve_sigma({weights, r.beta_base, g_mean, r0_zero}).sigma;
        sigma_median_acc += solve_sigma({weights, r.beta_base, g_median, r0_zero}).sigma;
        sigma_mod_acc += solve_sigma({weights, beta_mod, g_mean, r0_zero}).sigma;
        std::vector<double> rho_mod = rho(weights, beta_mod);
        for (int i = 0; i < S; ++i) r.rho_mod_beta[i] += rho_mod[i] / n_reps;
        r.beta_modified += beta_mod / n_reps;
        r.var_log_c += s.stats.var_log_c / n_reps;
    }
    r.sigma_hat = mean(r.sigma_hat_reps);
    r.sigma_ci99 = n_reps >= 2 ? confidence_interval(r.sigma_hat_reps, 0.99).halfwidth : 0.0;
    r.sigma_mean_c = sigma_mean_acc / n_reps;
    r.sigma_median_c = sigma_median_acc / n_reps;
    r.sigma_mod_beta = sigma_mod_acc / n_reps;
    r.err_mean_c = relative_error(r.sigma_hat, r.sigma_mean_c);
    r.err_median_c = relative_error(r.sigma_hat, r.sigma_median_c);
    r.err_mod_beta = relative_error(r.sigma_hat, r.sigma_mod_beta);
    for (int i = 0; i < S; ++i) {
        r.rho_err += relative_error(r.rho_hat[i], r.rho_beta[i]) / S;
        r.rho_err_mod_beta += relative_error(r.rho_hat[i], r.rho_mod_beta[i]) / S;
    }
    return r;
}

}  // namespace

ExperimentResult run_replicated(const ScenarioConfig& cfg,
                                const CapacityModel* capacity_override) {
    validate_config(cfg);
    std::vector<RepSummary> reps(cfg.replications);
    std::vector<Job> jobs;
    jobs.reserve(cfg.replications);
    for (int k = 0; k < cfg.replications; ++k) jobs.push_back({&cfg, k, &reps[k]});
    run_jobs(jobs, cfg.threads, capacity_override);
    return aggregate(cfg, reps);
}

ScenarioConfig with_param(const ScenarioConfig& base, const std::string& param, double value) {
    ScenarioConfig cfg = base;
    if (param == "users_per_cell") {
        cfg.users_per_cell = static_cast<int>(std::llround(value));
    } else if (param == "n_slices") {
        cfg.n_slices = static_cast<int>(std::llround(value));
        cfg.shares.clear();
        cfg.weights.clear();
    } else if (param == "r0_bps") {
        cfg.r0_bps = value;
    } else if (param == "lambda_ema") {
        cfg.lambda_ema = value;
    } else if (param == "lambda_ts") {
        if (!(base.lambda_ema > 0.0)) {
            throw std::invalid_argument("with_param: lambda_ts needs a positive lambda_ema");
        }
        cfg.t_subscription_s = value / base.lambda_ema;
    } else {
        throw std::invalid_argument("with_param: unknown parameter '" + param + "'");
    }
    return cfg;
}

std::vector<CasePoint> case_points(char case_id, const ScenarioConfig& base) {
    std::vector<CasePoint> pts;
    switch (case_id) {
        case 'a':
            for (double v : {100.0, 150.0, 200.0, 250.0, 300.0, 350.0}) {
                pts.push_back({"users_per_cell", v, with_param(base, "users_per_cell", v)});
            }
            break;
        case 'b':
            for (double v : {2.0, 3.0, 4.0, 5.0, 6.0, 7.0}) {
                pts.push_back({"n_slices", v, with_param(base, "n_slices", v)});
            }
            break;
        case 'c':
            for (double v : {2.0e5, 3.0e5, 4.0e5, 5.0e5, 6.0e5, 7.0e5}) {
                pts.push_back({"r0_bps", v, with_param(base, "r0_bps", v)});
            }
            break;
        case 'd':
            for (double v : {0.10, 0.15, 0.20, 0.25, 0.30, 0.35}) {
                ScenarioConfig cfg = base;
                cfg.lambda_ema = v;
                cfg.t_subscription_s = 24.0 / v;  // lambda * t_s held at 24 s
                pts.push_back({"lambda_ema", v, std::move(cfg)});
            }
            break;
        case 'e':
            for (double v : base.case_e_lambda_ts_grid) {
                pts.push_back({"lambda_ts", v, with_param(base, "lambda_ts", v)});
            }
            break;
        default:
            throw std::invalid_argument(std::string("case_points: unknown case id '") + case_id +
                                        "'");
    }
    return pts;
}

ComparisonRow to_row(const ExperimentResult& r, const std::string& case_id,
                     const std::string& param, double value) {
    ComparisonRow row;
    row.case_id = case_id;
    row.param = param;
    row.param_value = value;
    row.reps = static_cast<int>(r.sigma_hat_reps.size());
    row.master_seed = r.config.master_seed;
    row.sigma_hat = r.sigma_hat;
    row.sigma_ci99 = r.sigma_ci99;
    row.sigma_mean_c = r.sigma_mean_c;
    row.err_mean_c = r.err_mean_c;
    row.sigma_median_c = r.sigma_median_c;
    row.err_median_c = r.err_median_c;
    row.sigma_mod_beta = r.sigma_mod_beta;
    row.err_mod_beta = r.err_mod_beta;
    row.rho_err = r.rho_err;
    row.rho_err_mod_beta = r.rho_err_mod_beta;
    return row;
}

namespace {

std::vector<ComparisonRow> run_points(const std::string& case_label, std::vector<CasePoint> pts,
                                      const ScenarioConfig& base,
                                      const CapacityModel* capacity_override) {
    std::uint64_t case_seed = derive_seed(base.master_seed,
                                          static_cast<std::uint64_t>(case_label[0]));
    for (std::size_t i = 0; i < pts.size(); ++i) {
        pts[i].config.master_seed = derive_seed(case_seed, i);
        validate_config(pts[i].config);
    }
    std::vector<std::vector<RepSummary>> slots(pts.size());
    std::vector<Job> jobs;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        slots[i].resize(pts[i].config.replications);
        for (int k = 0; k < pts[i].config.replications; ++k) {
            jobs.push_back({&pts[i].config, k, &slots[i][k]});
        }
    }
    run_jobs(jobs, base.threads, capacity_override);
    std::vector<ComparisonRow> rows;
    rows.reserve(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        ExperimentResult r = aggregate(pts[i].config, slots[i]);
        rows.push_back(to_row(r, case_label, pts[i].param, pts[i].value));
    }
    return rows;
}

}  // namespace

std::vector<ComparisonRow> run_case(char case_id, const ScenarioConfig& base,
                                    const CapacityModel* capacity_override) {
    return run_points(std::string(1, case_id), case_points(case_id, base), base,
                      capacity_override);
}

std::vector<ComparisonRow> run_sweep(const std::string& param, const std::vector<double>& values,
                                     const ScenarioConfig& base,
                                     const CapacityModel* capacity_override) {
    if (values.empty()) throw std::invalid_argument("run_sweep: empty value grid");
    std::vector<CasePoint> pts;
    pts.reserve(values.size());
    for (double v : values) pts.push_back({param, v, with_param(base, param, v)});
    return run_points("sweep", std::move(pts), base, capacity_override);
}

const char* const kComparisonHeader =
    "case,param,param_value,reps,master_seed,sigma_hat,sigma_ci99,sigma_mean_c,err_mean_c,"
    "sigma_median_c,err_median_c,sigma_mod_beta,err_mod_beta,rho_err,rho_err_mod_beta";

void write_comparison_csv(const std::vector<ComparisonRow>& rows, std::ostream& out) {
    out << kComparisonHeader << '\n';
    for (const ComparisonRow& r : rows) {
        out << r.case_id << ',' << r.param << ',' << format_double(r.param_value) << ',' << r.reps
            << ',' << r.master_seed << ',' << format_double(r.sigma_hat) << ','
            << format_double(r.sigma_ci99) << ',' << format_double(r.sigma_mean_c) << ','
            << format_double(r.err_mean_c) << ',' << format_double(r.sigma_median_c) << ','
            << format_double(r.err_median_c) << ',' << format_double(r.sigma_mod_beta) << ','
            << format_double(r.err_mod_beta) << ',' << format_double(r.rho_err) << ','
            << format_double(r.rho_err_mod_beta) << '\n';
    }
}

std::vector<ComparisonRow> read_comparison_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("comparison csv: empty input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kComparisonHeader) throw std::invalid_argument("comparison csv: bad header");
    std::vector<ComparisonRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto f = split_csv_line(line);
        if (f.size() != 15) throw std::invalid_argument("comparison csv: bad row: " + line);
        ComparisonRow r;
        r.case_id = f[0];
        r.param = f[1];
        r.param_value = parse_double(f[2]);
        r.reps = std::stoi(f[3]);
        r.master_seed = std::stoull(f[4]);
        r.sigma_hat = parse_double(f[5]);
        r.sigma_ci99 = parse_double(f[6]);
        r.sigma_mean_c = parse_double(f[7]);
        r.err_mean_c = parse_double(f[8]);
        r.sigma_median_c = parse_double(f[9]);
        r.err_median_c = parse_double(f[10]);
        r.sigma_mod_beta = parse_double(f[11]);
        r.err_mod_beta = parse_double(f[12]);
        r.rho_err = parse_double(f[13]);
        r.rho_err_mod_beta = parse_double(f[14]);
        rows.push_back(std::move(r));
    }
    return rows;
}

void write_comparison_json(const std::vector<ComparisonRow>& rows, std::ostream& out) {
    json arr = json::array();
    for (const ComparisonRow& r : rows) {
        arr.push_back({{"case", r.case_id},
                       {"param", r.param},
                       {"param_value", r.param_value},
                       {"reps", r.reps},
                       {"master_seed", r.master_seed},
                       {"sigma_hat", r.sigma_hat},
                       {"sigma_ci99", r.sigma_ci99},
                       {"sigma_mean_c", r.sigma_mean_c},
                       {"err_mean_c", r.err_mean_c},
                       {"sigma_median_c", r.sigma_median_c},
                       {"err_median_c", r.err_median_c},
                       {"sigma_mod_beta", r.sigma_mod_beta},
                       {"err_mod_beta", r.err_mod_beta},
                       {"rho_err", r.rho_err},
                       {"rho_err_mod_beta", r.rho_err_mod_beta}});
    }
    out << arr.dump(2) << '\n';
}

void write_capacity_stats_csv(const std::vector<CapacityStats>& stats, std::uint64_t seed,
                              std::ostream& out) {
    out << "cell_id,mean_bps,median_bps,var_log_c,n_samples,seed\n";
    for (std::size_t j = 0; j < stats.size(); ++j) {
        out << (j + 1) << ',' << format_double(stats[j].mean_bps) << ','
            << format_double(stats[j].median_bps) << ',' << format_double(stats[j].var_log_c)
            << ',' << stats[j].sample_count << ',' << seed << '\n';
    }
}

std::vector<CapacityStats> read_capacity_stats_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("capacity csv: empty input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "cell_id,mean_bps,median_bps,var_log_c,n_samples,seed") {
        throw std::invalid_argument("capacity csv: bad header");
    }
    std::vector<CapacityStats> stats;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto f = split_csv_line(line);
        if (f.size() != 6) throw std::invalid_argument("capacity csv: bad row: " + line);
        int cell_id = std::stoi(f[0]);
        if (cell_id != static_cast<int>(stats.size()) + 1) {
            throw std::invalid_argument("capacity csv: cell ids must be 1..N in order");
        }
        CapacityStats s;
        s.mean_bps = parse_double(f[1]);
        s.median_bps = parse_double(f[2]);
        s.var_log_c = parse_double(f[3]);
        s.sample_count = std::stoll(f[4]);
        stats.push_back(s);
    }
    return stats;
}

}  // namespace slicesim
