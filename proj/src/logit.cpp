#include "slicesim/logit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace slicesim {

double observed_utility(double rate_bps, const ChoiceParams& p) {
    if (!(rate_bps > 0.0)) throw std::domain_error("observed_utility: rate must be positive");
    return p.mu * std::log(rate_bps / p.price);
}

double per_user_rate(const SliceWeights& w, int nst, double capacity_bps, long n_subscribers) {
    if (nst < 0 || nst >= static_cast<int>(w.size())) {
        throw std::out_of_range("per_user_rate: tenant index out of range");
    }
    if (n_subscribers < 1) throw std::invalid_argument("per_user_rate: subscriber count must be >= 1");
    if (!(capacity_bps > 0.0)) throw std::invalid_argument("per_user_rate: capacity must be positive");
    double total = 0.0;
    for (double x : w) total += x;
    return w[nst] / total * capacity_bps / static_cast<double>(n_subscribers);
}

double draw_gumbel(double nu, RandomStream& rng) {
    if (!(nu > 0.0)) throw std::invalid_argument("draw_gumbel: nu must be positive");
    return rng.gumbel_zero_mean(nu);
}

int choose(const std::vector<double>& observed, const std::vector<double>& kappa) {
    if (observed.empty() || observed.size() != kappa.size()) {
        throw std::invalid_argument("choose: option vectors must be non-empty and equal-sized");
    }
    int best = 0;
    double best_u = observed[0] + kappa[0];
    for (std::size_t i = 1; i < observed.size(); ++i) {
        double u = observed[i] + kappa[i];
        if (u > best_u) {
            best_u = u;
            best = static_cast<int>(i);
        }
    }
    return best;
}

double ema_update(double c_hat, double c_last, double lambda) {
    if (!(lambda > 0.0 && lambda < 1.0)) throw std::invalid_argument("ema_update: lambda must be in (0,1)");
    return (1.0 - lambda) * c_hat + lambda * c_last;
}

std::vector<double> static_choice_probabilities(const std::vector<double>& rates,
                                                const ChoiceParams& p) {
    if (rates.empty()) throw std::invalid_argument("static_choice_probabilities: no tenants");
    for (double r : rates) {
        if (!(r > 0.0)) throw std::invalid_argument("static_choice_probabilities: rates must be positive");
    }
    double e = p.mu / p.nu;
    std::vector<double> logits(rates.size() + 1);
    logits[0] = p.r0_bps > 0.0 ? e * std::log(p.price * p.r0_bps)
                               : -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < rates.size(); ++i) logits[i + 1] = e * std::log(rates[i]);

    double m = *std::max_element(logits.begin(), logits.end());
    double total = 0.0;
    std::vector<double> probs(logits.size());
    for (std::size_t i = 0; i < logits.size(); ++i) {
        probs[i] = std::exp(logits[i] - m);
        total += probs[i];
    }
    for (double& q : probs) q /= total;
    return probs;
}

}  // namespace slicesim
