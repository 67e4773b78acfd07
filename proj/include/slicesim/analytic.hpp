#pragma once

#include <string>
#include <vector>

#include "slicesim/logit.hpp"
#include "slicesim/radio.hpp"

namespace slicesim {

struct AnalyticInputs {
    SliceWeights weights;
    double beta = 0.0;   // in (0,1)
    double gamma = 0.0;  // normalized capacity, ignored when r0_is_zero
    bool r0_is_zero = false;
};

struct SigmaSolution {
    double sigma = 0.0;
    double one_minus_sigma = 0.0;  // carried separately: near sigma = 1 this keeps full precision
    double residual = 0.0;         // value of sigma - K*(1-sigma)^(1-beta) at the returned root
    int iterations = 0;
};

// beta = mu/(mu+nu).
double beta_sensitivity(double mu, double nu);

// Variance-inflated sensitivity: nu_tilde = nu/sqrt(1 + 6 (mu nu / pi)^2 V),
// beta_tilde = mu/(mu + nu_tilde).
double modified_beta(double mu, double nu, double var_log_c);

// The adjustment above is calibrated on decimal-log capacity variance;
// measured statistics carry Var[ln c], so rescale by 1/ln(10)^2 first.
double decimal_log_variance(double var_natural_log);

// gamma = c/(n*price*r0); rejects r0 <= 0, which callers must route to the
// sigma = 1 branch instead.
double normalized_capacity(double c_bps, double n_users, double price, double r0_bps);

// Subscription ratio: exactly 1 when r0 is zero, otherwise the unique root in
// (0,1) of sigma = gamma^beta * (sum w^beta)/(sum w)^beta * (1-sigma)^(1-beta),
// found by bisection over ln(1-sigma) so extreme roots keep full precision.
SigmaSolution solve_sigma(const AnalyticInputs& in);

// rho_i = w_i^beta / sum_t w_t^beta.
std::vector<double> rho(const SliceWeights& weights, double beta);

// R_i = w_i/sum(w) * capacity.
std::vector<double> allocate(const SliceWeights& weights, double capacity_bps);

enum class IndicatorVariant { MeanCapacity, MedianCapacity, ModifiedBeta, Simulated };

std::string variant_name(IndicatorVariant v);
IndicatorVariant variant_from_name(const std::string& name);

struct CellIndicators {
    int cell_id = 0;
    double sigma = 0.0;
    std::vector<double> rho;
    double beta_used = 0.0;
    double gamma_used = 0.0;  // 0 when the r0 = 0 branch applied
};

struct IndicatorSet {
    IndicatorVariant variant = IndicatorVariant::MeanCapacity;
    std::vector<CellIndicators> cells;
};

// Per-cell equilibrium indicators from measured capacity statistics. The
// mean and modified variants consume the mean capacity, the median variant
// the median; the modified variant replaces beta with beta_tilde from the
// cell's variance of log capacity. stats and n_hat are indexed by cell id - 1.
IndicatorSet compute_indicators(const std::vector<CapacityStats>& stats,
                                const std::vector<double>& n_hat, const SliceWeights& weights,
                                const ChoiceParams& params, IndicatorVariant variant);

}  // namespace slicesim
