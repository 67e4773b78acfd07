#pragma once

#include <vector>

namespace slicesim {

double mean(const std::vector<double>& xs);

// Unbiased sample variance (n-1 denominator); requires xs.size() >= 2.
double sample_variance(const std::vector<double>& xs);

// Sample median; for even sizes the average of the two central order
// statistics. Requires a non-empty input.
double median(std::vector<double> xs);

// Regularized incomplete beta function I_x(a, b), continued-fraction
// evaluation, absolute accuracy around 1e-14 for moderate a, b.
double regularized_incomplete_beta(double a, double b, double x);

double student_t_cdf(double t, int df);

// Quantile of the Student t distribution, p in (0,1), df >= 1.
double student_t_quantile(double p, int df);

// Pearson statistic sum (o-e)^2/e against a single expected value.
double chi_square_statistic(const std::vector<long long>& counts, double expected);

}  // namespace slicesim
