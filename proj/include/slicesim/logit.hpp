#pragma once

#include <vector>

#include "slicesim/random.hpp"

namespace slicesim {

struct ChoiceParams {
    double mu = 2.0;     // utility sensitivity
    double nu = 1.0;     // Gumbel scale
    double price = 1.0;  // common subscription price; the outside option's price is fixed at 1
    double r0_bps = 5.0e5;  // virtual rate of not subscribing; 0 removes the outside option
};

// Per-tenant resource weights of one cell; all entries positive.
using SliceWeights = std::vector<double>;

// v = mu * ln(rate/price); rate must be positive.
double observed_utility(double rate_bps, const ChoiceParams& p);

// r = w[nst]/sum(w) * capacity / n_subscribers; nst is a 0-based index into
// the weight vector and n_subscribers must be >= 1 (callers pass the
// prospective member count).
double per_user_rate(const SliceWeights& w, int nst, double capacity_bps, long n_subscribers);

// Zero-mean Gumbel perturbation with scale nu.
double draw_gumbel(double nu, RandomStream& rng);

// Argmax of observed + kappa over options; ties go to the lowest index.
int choose(const std::vector<double>& observed, const std::vector<double>& kappa);

// EMA step: (1-lambda)*c_hat + lambda*c_last.
double ema_update(double c_hat, double c_last, double lambda);

// Closed-form choice probabilities over the outside option plus the tenants:
// index 0 is no-subscription, index i >= 1 is rates[i-1]. With r0 = 0 entry 0
// is exactly 0.
std::vector<double> static_choice_probabilities(const std::vector<double>& rates,
                                                const ChoiceParams& p);

}  // namespace slicesim
