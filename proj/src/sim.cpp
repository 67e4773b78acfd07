#include "slicesim/sim.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "slicesim/logit.hpp"
#include "slicesim/radio.hpp"

namespace slicesim {

double update_time_average(double avg, double t_prev, double t_now, double count) {
    if (t_prev < 0.0 || t_now < t_prev) {
        throw std::invalid_argument("update_time_average: need 0 <= t_prev <= t_now");
    }
    if (t_now <= 0.0) return count;
    return (t_prev * avg + (t_now - t_prev) * count) / t_now;
}

double RadioCapacityModel::sample(int cell_id, Vec2 pos, RandomStream& rng) const {
    return capacity_at(pos, cell_id, grid_, params_, rng);
}

namespace {

// Tie order at equal times: estimator reset, then mobility, then measurement,
// then the EMA refresh, then subscription decisions.
enum EventKind : std::uint8_t {
    kWarmupReset = 0,
    kPhaseEnd = 1,
    kHandover = 2,
    kMeasure = 3,
    kEma = 4,
    kSubscribe = 5,
};

constexpr int kEventKinds = 6;
constexpr double kBoundaryNudgeM = 1e-6;

const char* const kEventNames[kEventKinds] = {"warmup_reset", "phase_end", "handover",
                                              "measure",      "ema",       "subscribe"};

struct Event {
    double t;
    std::uint32_t user;
    std::uint8_t kind;
    std::uint32_t seq;
};

struct LaterFirst {
    bool operator()(const Event& a, const Event& b) const {
        if (a.t != b.t) return a.t > b.t;
        if (a.kind != b.kind) return a.kind > b.kind;
        return a.user > b.user;
    }
};

struct User {
    Vec2 seg_pos;  // position at seg_t; frozen while paused
    double seg_t = 0.0;
    Vec2 dir{1.0, 0.0};
    double phase_end = 0.0;
    Vec2 last_measure_pos;
    double c_hat = 0.0;
    double c_last = 0.0;
    int cell = 0;
    int option = 0;  // 0 = not subscribed, 1..S = tenant
    bool moving = false;
    std::array<std::uint32_t, kEventKinds> seq{};  // stale-event fences
};

struct CellState {
    std::vector<long> counts;  // by option, index 0 = not subscribed
    std::vector<double> avgs;  // streaming time averages of counts
    double t_last = 0.0;
};

class Engine {
public:
    Engine(const ScenarioConfig& cfg, std::uint64_t seed, const CapacityModel* model,
           std::ostream* log)
        : cfg_(cfg),
          grid_(cfg.isd_m),
          radio_model_(grid_, cfg.radio),
          model_(model ? model : &radio_model_),
          rng_(seed),
          seed_(seed),
          log_(log) {
        choice_ = cfg.choice_params();
        weights_ = cfg.effective_weights();
        double sum_w = 0.0;
        for (double w : weights_) sum_w += w;
        frac_.reserve(weights_.size());
        for (double w : weights_) frac_.push_back(w / sum_w);
        S_ = cfg.n_slices;
        v_ = cfg.speed_mps();
        t_end_ = cfg.duration_s;
        warmup_ = cfg.warmup_s;
        d2_ = cfg.d_update_m * cfg.d_update_m;
        audit_every_ = cfg.audit_every_events;
    }

    SimResult run() {
        init();
        while (!pq_.empty()) {
            Event e = pq_.top();
            if (e.t > t_end_) break;
            pq_.pop();
            if (e.kind != kWarmupReset && users_[e.user].seq[e.kind] != e.seq) {
                ++stale_;
                continue;
            }
            now_ = e.t;
            dispatch(e);
            ++processed_;
            if (audit_every_ > 0 && processed_ % audit_every_ == 0) audit();
            if (log_) write_log(e);
        }
        now_ = t_end_;
        for (auto& cs : cells_) fold(cs, t_end_);
        return finalize();
    }

private:
    void init() {
        std::size_t n = static_cast<std::size_t>(kNumCells) * cfg_.users_per_cell;
        n_users_ = static_cast<std::uint32_t>(n);
        users_.resize(n);
        kappa_.resize(n * (S_ + 1));
        cells_.assign(kNumCells, CellState{std::vector<long>(S_ + 1, 0),
                                           std::vector<double>(S_ + 1, 0.0), 0.0});
        samples_.assign(kNumCells, {});
        std::uint32_t u = 0;
        for (int cell_id = 1; cell_id <= kNumCells; ++cell_id) {
            for (int k = 0; k < cfg_.users_per_cell; ++k, ++u) {
                User& usr = users_[u];
                usr.cell = cell_id;
                usr.seg_pos = uniform_point_in_cell(cell_id, grid_, rng_);
                usr.seg_t = 0.0;
                double* kap = &kappa_[static_cast<std::size_t>(u) * (S_ + 1)];
                for (int j = 0; j <= S_; ++j) kap[j] = draw_gumbel(cfg_.nu, rng_);
                usr.c_last = model_->sample(cell_id, usr.seg_pos, rng_);
                usr.c_hat = usr.c_last;
                usr.last_measure_pos = usr.seg_pos;
                ++cells_[cell_id - 1].counts[0];
                usr.phase_end = rng_.uniform(0.0, cfg_.t_pause_max_s);
                push_event(kPhaseEnd, u, usr.phase_end);
                push_event(kEma, u, cfg_.t_update_s);
                push_event(kSubscribe, u, rng_.uniform(0.0, cfg_.t_subscription_s));
            }
        }
        if (warmup_ > 0.0) pq_.push(Event{warmup_, 0, kWarmupReset, 0});
        // opening decision round in shuffled order
        std::vector<std::uint32_t> order(n_users_);
        for (std::uint32_t i = 0; i < n_users_; ++i) order[i] = i;
        for (std::uint32_t i = n_users_; i > 1; --i) {
            int j = rng_.uniform_int(static_cast<int>(i));
            std::swap(order[i - 1], order[j]);
        }
        now_ = 0.0;
        for (std::uint32_t x : order) decide(x);
    }

    void dispatch(const Event& e) {
        switch (e.kind) {
            case kWarmupReset: reset_estimators(); break;
            case kPhaseEnd: on_phase_end(e.user); break;
            case kHandover: on_handover(e.user); break;
            case kMeasure: on_measure(e.user); break;
            case kEma: on_ema(e.user); break;
            case kSubscribe: on_subscribe(e.user); break;
            default: throw std::logic_error("unknown event kind");
        }
    }

    void push_event(EventKind k, std::uint32_t u, double t) {
        pq_.push(Event{t, u, static_cast<std::uint8_t>(k), ++users_[u].seq[k]});
    }

    // Bumping the fence orphans any queued event of this kind.
    void cancel(EventKind k, std::uint32_t u) { ++users_[u].seq[k]; }

    Vec2 position_at(const User& usr, double t) const {
        if (!usr.moving) return usr.seg_pos;
        return usr.seg_pos + (v_ * (t - usr.seg_t)) * usr.dir;
    }

    void on_phase_end(std::uint32_t u) {
        User& usr = users_[u];
        usr.seg_pos = position_at(usr, now_);
        usr.seg_t = now_;
        cancel(kHandover, u);
        cancel(kMeasure, u);
        bool walk_next = !usr.moving;
        // a zero-length phase kind collapses into the other one
        if (walk_next && cfg_.t_walk_max_s <= 0.0) walk_next = false;
        if (!walk_next && cfg_.t_pause_max_s <= 0.0) walk_next = true;
        if (walk_next) {
            enter_walk(u);
        } else {
            enter_pause(u);
        }
    }

    void enter_pause(std::uint32_t u) {
        User& usr = users_[u];
        usr.moving = false;
        usr.phase_end = now_ + rng_.uniform(0.0, cfg_.t_pause_max_s);
        push_event(kPhaseEnd, u, usr.phase_end);
    }

    void enter_walk(std::uint32_t u) {
        User& usr = users_[u];
        usr.moving = true;
        usr.dir = unit_from_angle(rng_.uniform(0.0, 2.0 * std::numbers::pi));
        usr.phase_end = now_ + rng_.uniform(0.0, cfg_.t_walk_max_s);
        push_event(kPhaseEnd, u, usr.phase_end);
        schedule_exit(u);
        schedule_measure(u);
    }

    void schedule_exit(std::uint32_t u) {
        User& usr = users_[u];
        if (!usr.moving) return;
        double tau = grid_.exit_time(usr.cell, position_at(usr, now_), usr.dir, v_);
        double t_x = now_ + tau;
        if (t_x < usr.phase_end) push_event(kHandover, u, t_x);
    }

    void schedule_measure(std::uint32_t u) {
        User& usr = users_[u];
        if (!usr.moving) return;
        Vec2 rel = position_at(usr, now_) - usr.last_measure_pos;
        double proj = dot(rel, usr.dir);
        double perp2 = std::max(norm2(rel) - proj * proj, 0.0);
        double delta = std::sqrt(std::max(d2_ - perp2, 0.0)) - proj;
        double t_m = now_ + std::max(delta, 0.0) / v_;
        if (t_m <= usr.phase_end) push_event(kMeasure, u, t_m);
    }

    void on_handover(std::uint32_t u) {
        User& usr = users_[u];
        Vec2 pos = grid_.wrap(position_at(usr, now_) + kBoundaryNudgeM * usr.dir);
        usr.seg_pos = pos;
        usr.seg_t = now_;
        int to = grid_.locate_cell(pos);
        if (to == usr.cell) {  // grazed a corner without leaving
            schedule_exit(u);
            schedule_measure(u);
            return;
        }
        CellState& from = cells_[usr.cell - 1];
        CellState& dest = cells_[to - 1];
        fold(from, now_);
        fold(dest, now_);
        --from.counts[usr.option];
        ++dest.counts[usr.option];
        usr.cell = to;
        ++handovers_;
        usr.c_last = model_->sample(to, pos, rng_);
        usr.c_hat = usr.c_last;
        usr.last_measure_pos = pos;
        decide(u);
        schedule_exit(u);
        schedule_measure(u);
    }

    void on_measure(std::uint32_t u) {
        User& usr = users_[u];
        Vec2 pos = position_at(usr, now_);
        usr.c_last = model_->sample(usr.cell, pos, rng_);
        usr.last_measure_pos = pos;
        schedule_measure(u);
    }

    void on_ema(std::uint32_t u) {
        User& usr = users_[u];
        usr.c_hat = ema_update(usr.c_hat, usr.c_last, cfg_.lambda_ema);
        push_event(kEma, u, now_ + cfg_.t_update_s);
    }

    void on_subscribe(std::uint32_t u) {
        decide(u);
        push_event(kSubscribe, u, now_ + cfg_.t_subscription_s);
    }

    void decide(std::uint32_t u) {
        ++decisions_;
        User& usr = users_[u];
        CellState& cs = cells_[usr.cell - 1];
        if (now_ >= warmup_) {
            samples_[usr.cell - 1].push_back(static_cast<float>(usr.c_hat));
        }
        const double* kap = &kappa_[static_cast<std::size_t>(u) * (S_ + 1)];
        int best = -1;
        double best_v = -std::numeric_limits<double>::infinity();
        if (choice_.r0_bps > 0.0) {
            best = 0;
            best_v = choice_.mu * std::log(choice_.r0_bps) + kap[0];
        }
        for (int i = 0; i < S_; ++i) {
            // rate the user would get, counting itself among the subscribers
            long nsub = cs.counts[i + 1] + (usr.option == i + 1 ? 0L : 1L);
            double r = frac_[i] * usr.c_hat / static_cast<double>(nsub);
            double v = choice_.mu * std::log(r / choice_.price) + kap[i + 1];
            if (v > best_v) {
                best_v = v;
                best = i + 1;
            }
        }
        if (best == 0) ++outside_;
        if (best != usr.option) {
            fold(cs, now_);
            --cs.counts[usr.option];
            ++cs.counts[best];
            usr.option = best;
            ++option_changes_;
        }
    }

    void fold(CellState& cs, double t) {
        double tp = cs.t_last - t0_;
        double tn = t - t0_;
        if (tn <= tp) return;
        for (int k = 0; k <= S_; ++k) {
            cs.avgs[k] = update_time_average(cs.avgs[k], tp, tn, static_cast<double>(cs.counts[k]));
        }
        cs.t_last = t;
    }

    void reset_estimators() {
        t0_ = warmup_;
        for (auto& cs : cells_) {
            cs.t_last = warmup_;
            for (int k = 0; k <= S_; ++k) cs.avgs[k] = static_cast<double>(cs.counts[k]);
        }
    }

    void audit() const {
        std::vector<std::vector<long>> seen(kNumCells, std::vector<long>(S_ + 1, 0));
        for (std::uint32_t u = 0; u < n_users_; ++u) {
            const User& usr = users_[u];
            ++seen[usr.cell - 1][usr.option];
            if (grid_.boundary_excess(usr.cell, position_at(usr, now_)) > 1e-6) {
                throw std::logic_error("audit: user " + std::to_string(u) +
                                       " outside cell " + std::to_string(usr.cell) + " at t=" +
                                       std::to_string(now_));
            }
        }
        long total = 0;
        for (int c = 0; c < kNumCells; ++c) {
            for (int k = 0; k <= S_; ++k) {
                total += seen[c][k];
                if (seen[c][k] != cells_[c].counts[k]) {
                    throw std::logic_error("audit: count drift in cell " + std::to_string(c + 1) +
                                           " option " + std::to_string(k) + " at t=" +
                                           std::to_string(now_));
                }
            }
        }
        if (total != static_cast<long>(n_users_)) {
            throw std::logic_error("audit: population changed at t=" + std::to_string(now_));
        }
        ++audits_;
    }

    void write_log(const Event& e) {
        (*log_) << now_ << ',' << kEventNames[e.kind] << ',';
        if (e.kind == kWarmupReset) {
            (*log_) << "-1,-1,-1\n";
        } else {
            const User& usr = users_[e.user];
            (*log_) << e.user << ',' << usr.cell << ',' << usr.option << '\n';
        }
    }

    SimResult finalize() {
        SimResult r;
        r.n_slices = S_;
        r.seed = seed_;
        r.virtual_time = t_end_ - t0_;
        r.n_hat_by_option.reserve(kNumCells);
        r.n_hat.reserve(kNumCells);
        r.sigma_hat.reserve(kNumCells);
        r.rho_hat.reserve(kNumCells);
        for (const auto& cs : cells_) {
            double tot = 0.0;
            for (double a : cs.avgs) tot += a;
            double inside = tot - cs.avgs[0];
            r.n_hat_by_option.push_back(cs.avgs);
            r.n_hat.push_back(tot);
            r.sigma_hat.push_back(tot > 0.0 ? inside / tot : 0.0);
            std::vector<double> rho(S_, 0.0);
            if (inside > 0.0) {
                for (int i = 0; i < S_; ++i) rho[i] = cs.avgs[i + 1] / inside;
            }
            r.rho_hat.push_back(std::move(rho));
        }
        r.capacity_samples = std::move(samples_);
        r.events_processed = processed_;
        r.stale_events_skipped = stale_;
        r.handovers = handovers_;
        r.subscription_decisions = decisions_;
        r.option_changes = option_changes_;
        r.outside_choices = outside_;
        r.audits_passed = audits_;
        return r;
    }

    const ScenarioConfig& cfg_;
    Grid grid_;
    RadioCapacityModel radio_model_;
    const CapacityModel* model_;
    RandomStream rng_;
    std::uint64_t seed_;
    std::ostream* log_;

    ChoiceParams choice_{};
    SliceWeights weights_;
    std::vector<double> frac_;  // weights normalized to sum 1
    int S_ = 0;
    double v_ = 0.0;
    double t_end_ = 0.0;
    double warmup_ = 0.0;
    double d2_ = 0.0;
    long audit_every_ = 0;

    std::uint32_t n_users_ = 0;
    double now_ = 0.0;
    double t0_ = 0.0;  // estimator origin, moves to warmup_ at the reset event
    std::vector<User> users_;
    std::vector<double> kappa_;  // n_users x (S+1), option 0 first
    std::vector<CellState> cells_;
    std::vector<std::vector<float>> samples_;
    std::priority_queue<Event, std::vector<Event>, LaterFirst> pq_;

    std::uint64_t processed_ = 0;
    std::uint64_t stale_ = 0;
    std::uint64_t handovers_ = 0;
    std::uint64_t decisions_ = 0;
    std::uint64_t option_changes_ = 0;
    std::uint64_t outside_ = 0;
    mutable std::uint64_t audits_ = 0;
};

}  // namespace

SimResult run_simulation(const ScenarioConfig& cfg, std::uint64_t seed,
                         const CapacityModel* capacity_override, std::ostream* event_log) {
    validate_config(cfg);
    Engine engine(cfg, seed, capacity_override, event_log);
    return engine.run();
}

}  // namespace slicesim
