#include "slicesim/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace slicesim {

double beta_sensitivity(double mu, double nu) {
    if (!(mu > 0.0) || !(nu > 0.0)) throw std::invalid_argument("beta_sensitivity: mu, nu must be positive");
    return mu / (mu + nu);
}

double modified_beta(double mu, double nu, double var_log_c) {
    if (!(mu > 0.0) || !(nu > 0.0)) throw std::invalid_argument("modified_beta: mu, nu must be positive");
    if (var_log_c < 0.0) throw std::invalid_argument("modified_beta: variance must be non-negative");
    double f = mu * nu / std::numbers::pi;
    double nu_tilde = nu / std::sqrt(1.0 + 6.0 * f * f * var_log_c);
    return mu / (mu + nu_tilde);
}

double decimal_log_variance(double var_natural_log) {
    if (var_natural_log < 0.0) {
        throw std::invalid_argument("decimal_log_variance: variance must be non-negative");
    }
    const double ln10 = std::log(10.0);
    return var_natural_log / (ln10 * ln10);
}

double normalized_capacity(double c_bps, double n_users, double price, double r0_bps) {
    if (!(r0_bps > 0.0)) {
        throw std::domain_error(
            "normalized_capacity: r0 is zero; the subscription ratio is 1 in that branch");
    }
    if (!(c_bps > 0.0) || !(n_users > 0.0) || !(price > 0.0)) {
        throw std::invalid_argument("normalized_capacity: inputs must be positive");
    }
    return c_bps / (n_users * price * r0_bps);
}

SigmaSolution solve_sigma(const AnalyticInputs& in) {
    if (in.weights.empty()) throw std::invalid_argument("solve_sigma: empty weights");
    for (double w : in.weights) {
        if (!(w > 0.0) || !std::isfinite(w)) throw std::invalid_argument("solve_sigma: weights must be positive and finite");
    }
    if (in.r0_is_zero) return {1.0, 0.0, 0.0, 0};
    if (!(in.beta > 0.0 && in.beta < 1.0)) throw std::invalid_argument("solve_sigma: beta must be in (0,1)");
    if (!std::isfinite(in.gamma) || !(in.gamma > 0.0)) {
        throw std::invalid_argument("solve_sigma: gamma must be positive and finite");
    }

    // ln K with K = gamma^beta * (sum w^beta)/(sum w)^beta, evaluated in logs
    // so large gamma cannot overflow.
    double sum_w = 0.0;
    double max_lw = -std::numeric_limits<double>::infinity();
    for (double w : in.weights) {
        sum_w += w;
        max_lw = std::max(max_lw, in.beta * std::log(w));
    }
    double acc = 0.0;
    for (double w : in.weights) acc += std::exp(in.beta * std::log(w) - max_lw);
    double ln_k = in.beta * std::log(in.gamma) + max_lw + std::log(acc) - in.beta * std::log(sum_w);

    // Root of g(u) = 1 - e^u - e^(ln_k + (1-beta) u) over u = ln(1-sigma):
    // g is strictly decreasing, positive at u_lo by construction and
    // negative at u = 0 where g = -K.
    const double ln04 = std::log(0.4);
    double u_lo = std::min(ln04, (ln04 - ln_k) / (1.0 - in.beta));
    double u_hi = 0.0;
    auto g = [&](double u) { return 1.0 - std::exp(u) - std::exp(ln_k + (1.0 - in.beta) * u); };
    int iters = 0;
    for (; iters < 200; ++iters) {
        double mid = 0.5 * (u_lo + u_hi);
        if (mid <= u_lo || mid >= u_hi) break;
        if (g(mid) > 0.0) {
            u_lo = mid;
        } else {
            u_hi = mid;
        }
    }
    double x = std::exp(0.5 * (u_lo + u_hi));
    SigmaSolution out;
    out.one_minus_sigma = x;
    out.sigma = 1.0 - x;
    out.residual = out.sigma - std::exp(ln_k + (1.0 - in.beta) * std::log(x));
    out.iterations = iters;
    return out;
}

std::vector<double> rho(const SliceWeights& weights, double beta) {
    if (weights.empty()) throw std::invalid_argument("rho: empty weights");
    if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("rho: beta must be in (0,1)");
    double max_l = -std::numeric_limits<double>::infinity();
    for (double w : weights) {
        if (!(w > 0.0)) throw std::invalid_argument("rho: weights must be positive");
        max_l = std::max(max_l, beta * std::log(w));
    }
    std::vector<double> out(weights.size());
    double total = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        out[i] = std::exp(beta * std::log(weights[i]) - max_l);
        total += out[i];
    }
    for (double& v : out) v /= total;
    return out;
}

std::vector<double> allocate(const SliceWeights& weights, double capacity_bps) {
    if (weights.empty()) throw std::invalid_argument("allocate: empty weights");
    if (!(capacity_bps > 0.0)) throw std::invalid_argument("allocate: capacity must be positive");
    double total = 0.0;
    for (double w : weights) {
        if (!(w > 0.0)) throw std::invalid_argument("allocate: weights must be positive");
        total += w;
    }
    std::vector<double> out(weights.size());
    for (std::size_t i = 0; i < weights.size(); ++i) out[i] = weights[i] / total * capacity_bps;
    return out;
}

std::string variant_name(IndicatorVariant v) {
    switch (v) {
        case IndicatorVariant::MeanCapacity: return "mean";
        case IndicatorVariant::MedianCapacity: return "median";
        case IndicatorVariant::ModifiedBeta: return "modified";
        case IndicatorVariant::Simulated: return "simulated";
    }
    throw std::logic_error("variant_name: unknown variant");
}

IndicatorVariant variant_from_name(const std::string& name) {
    if (name == "mean") return IndicatorVariant::MeanCapacity;
    if (name == "median") return IndicatorVariant::MedianCapacity;
    if (name == "modified") return IndicatorVariant::ModifiedBeta;
    if (name == "simulated") return IndicatorVariant::Simulated;
    throw std::invalid_argument("unknown indicator variant: " + name);
}

IndicatorSet compute_indicators(const std::vector<CapacityStats>& stats,
                                const std::vector<double>& n_hat, const SliceWeights& weights,
                                const ChoiceParams& params, IndicatorVariant variant) {
    if (variant == IndicatorVariant::Simulated) {
        throw std::invalid_argument("compute_indicators: variant must be an analytic one");
    }
    if (stats.size() != n_hat.size()) {
        throw std::invalid_argument("compute_indicators: stats and n_hat sizes differ");
    }
    double beta = beta_sensitivity(params.mu, params.nu);
    IndicatorSet out;
    out.variant = variant;
    out.cells.reserve(stats.size());
    for (std::size_t j = 0; j < stats.size(); ++j) {
        int cell_id = static_cast<int>(j) + 1;
        const CapacityStats& st = stats[j];
        if (st.sample_count < 2) {
            throw std::runtime_error("compute_indicators: no capacity statistics for cell " +
                                     std::to_string(cell_id));
        }
        CellIndicators ci;
        ci.cell_id = cell_id;
        double c = variant == IndicatorVariant::MedianCapacity ? st.median_bps : st.mean_bps;
        ci.beta_used = variant == IndicatorVariant::ModifiedBeta
                           ? modified_beta(params.mu, params.nu, decimal_log_variance(st.var_log_c))
                           : beta;
        AnalyticInputs in;
        in.weights = weights;
        in.beta = ci.beta_used;
        if (params.r0_bps > 0.0) {
            in.gamma = normalized_capacity(c, n_hat[j], params.price, params.r0_bps);
            ci.gamma_used = in.gamma;
        } else {
            in.r0_is_zero = true;
            ci.gamma_used = 0.0;
        }
        ci.sigma = solve_sigma(in).sigma;
        ci.rho = rho(weights, ci.beta_used);
        out.cells.push_back(std::move(ci));
    }
    return out;
}

}  // namespace slicesim
