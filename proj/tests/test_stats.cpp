#include "nested_spectra/stats.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

using namespace nested;

namespace {

double uniform_cdf(double x) { return std::clamp(x, 0.0, 1.0); }

// 2 sum (-1)^(k-1) exp(-2 k^2 x^2), enough terms for x >= 0.3.
double kolmogorov_series(double x) {
    double s = 0.0;
    for (int k = 1; k < 200; ++k) s += (k % 2 ? 2.0 : -2.0) * std::exp(-2.0 * k * k * x * x);
    return s;
}

}  // namespace

TEST(Ks, SinglePoint) {
    const std::vector<double> x{0.5};
    EXPECT_DOUBLE_EQ(ks_distance(x, uniform_cdf), 0.5);
}

TEST(Ks, EvenlySpacedSample) {
    const std::vector<double> x{0.2, 0.4, 0.6, 0.8};
    EXPECT_NEAR(ks_distance(x, uniform_cdf), 0.2, 1e-15);
    const std::vector<double> mid{0.125, 0.375, 0.625, 0.875};
    EXPECT_NEAR(ks_distance(mid, uniform_cdf), 0.125, 1e-15);
}

TEST(Ks, TiesAndAtoms) {
    // Reference: atom of 1/2 at 0 plus uniform on [0, 1] with mass 1/2.
    auto cdf = [](double x) { return x < 0 ? 0.0 : 0.5 + 0.5 * std::min(x, 1.0); };
    const std::vector<double> x{0.0, 0.0, 0.5, 1.0};
    EXPECT_NEAR(ks_distance(x, cdf), 0.25, 1e-15);
    const std::vector<double> tied{0.3, 0.3, 0.3, 0.3};
    EXPECT_NEAR(ks_distance(tied, uniform_cdf), 0.7, 1e-15);
}

TEST(Ks, BruteForceOnRandomSample) {
    std::mt19937_64 gen(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> x(200);
    for (double& v : x) v = u(gen) * u(gen);
    std::sort(x.begin(), x.end());
    double brute = 0.0;
    for (double t = -0.001; t <= 1.001; t += 1e-6) {
        const double fn = static_cast<double>(std::upper_bound(x.begin(), x.end(), t) - x.begin()) / 200.0;
        brute = std::max(brute, std::abs(fn - uniform_cdf(t)));
    }
    EXPECT_NEAR(ks_distance(x, uniform_cdf), brute, 2e-6);
}

TEST(Kolmogorov, TailMatchesSeries) {
    for (double lam = 0.3; lam < 3.0; lam += 0.05) EXPECT_NEAR(kolmogorov_tail(lam), kolmogorov_series(lam), 1e-12) << lam;
    EXPECT_NEAR(kolmogorov_tail(1.358), 0.05, 5e-4);
    EXPECT_NEAR(kolmogorov_tail(0.0), 1.0, 1e-12);
    EXPECT_NEAR(kolmogorov_tail(0.1), 1.0, 1e-12);
}

TEST(Kolmogorov, PValueMonotoneAndCorrected) {
    const std::size_t n = 100;
    const double d = 0.1;
    const double lam = (std::sqrt(100.0) + 0.12 + 0.11 / std::sqrt(100.0)) * d;
    EXPECT_NEAR(ks_pvalue(d, n), kolmogorov_series(lam), 1e-12);
    double prev = 1.0;
    for (double x = 0.0; x < 0.5; x += 0.01) {
        const double p = ks_pvalue(x, n);
        EXPECT_LE(p, prev + 1e-15);
        EXPECT_GE(p, 0.0);
        prev = p;
    }
}

TEST(Kolmogorov, UniformSamplesGiveUniformPvalues) {
    std::mt19937_64 gen(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int rejects = 0;
    const int reps = 400;
    for (int r = 0; r < reps; ++r) {
        std::vector<double> x(150);
        for (double& v : x) v = u(gen);
        std::sort(x.begin(), x.end());
        if (ks_pvalue(ks_distance(x, uniform_cdf), x.size()) < 0.05) ++rejects;
    }
    // Binomial(400, 0.05): mean 20, sd ~4.4.
    EXPECT_GT(rejects, 5);
    EXPECT_LT(rejects, 38);
}

TEST(MeanStd, Examples) {
    const std::vector<double> x{1, 2, 3, 4};
    const MeanStd m = mean_std(x);
    EXPECT_DOUBLE_EQ(m.mean, 2.5);
    EXPECT_NEAR(m.std, std::sqrt(5.0 / 3.0), 1e-15);
    const std::vector<double> one{7};
    EXPECT_EQ(mean_std(one).std, 0.0);
    EXPECT_EQ(mean_std(one).mean, 7.0);
}
