#include "nested_spectra/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace nested {

double ks_distance(std::span<const double> sorted, const std::function<double(double)>& cdf) {
    if (sorted.empty()) throw std::invalid_argument("ks_distance: empty sample");
    const double n = static_cast<double>(sorted.size());
    double d = 0.0;
    std::size_t i = 0;
    while (i < sorted.size()) {
        // Ties move the empirical CDF in one jump.
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        const double x = sorted[i];
        const double f = cdf(x);
        // Left limit of the reference CDF, needed when it has an atom at x.
        const double f_left = cdf(std::nextafter(x, -INFINITY));
        d = std::max({d, std::abs(static_cast<double>(j) / n - f), std::abs(f_left - static_cast<double>(i) / n)});
        i = j;
    }
    return d;
}

double kolmogorov_tail(double lambda) {
    if (lambda <= 0.0) return 1.0;
    if (lambda < 1.18) {
        // Theta-function form converges quickly for small lambda.
        const double y = std::exp(-std::numbers::pi * std::numbers::pi / (8.0 * lambda * lambda));
        const double s = y + std::pow(y, 9) + std::pow(y, 25) + std::pow(y, 49);
        return 1.0 - std::sqrt(2.0 * std::numbers::pi) / lambda * s;
    }
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += (k % 2 == 1 ? 2.0 : -2.0) * term;
        if (term < 1e-17) break;
    }
    return std::clamp(sum, 0.0, 1.0);
}

double ks_pvalue(double distance, std::size_t n) {
    if (n == 0) throw std::invalid_argument("ks_pvalue: n must be positive");
    const double rn = std::sqrt(static_cast<double>(n));
    return kolmogorov_tail((rn + 0.12 + 0.11 / rn) * distance);
}

MeanStd mean_std(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("mean_std: no values");
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    if (values.size() == 1) return {mean, 0.0};
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return {mean, std::sqrt(ss / static_cast<double>(values.size() - 1))};
}

}  // namespace nested
