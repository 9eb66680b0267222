#pragma once

#include <functional>
#include <span>

namespace nested {

/// sup_x |F_n(x) - F(x)| for the empirical CDF of `sorted` (ascending)
/// against a continuous-or-atomic reference CDF.
double ks_distance(std::span<const double> sorted, const std::function<double(double)>& cdf);

/// Asymptotic Kolmogorov tail probability P(K > lambda).
double kolmogorov_tail(double lambda);

/// p-value of a one-sample KS statistic with Stephens' small-sample correction.
double ks_pvalue(double distance, std::size_t n);

struct MeanStd {
    double mean = 0.0;
    /// Sample standard deviation (n - 1 denominator); 0 for a single value.
    double std = 0.0;
};
MeanStd mean_std(std::span<const double> values);

}  // namespace nested
