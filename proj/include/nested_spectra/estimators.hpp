#pragma once

#include "nested_spectra/spectra.hpp"
#include "nested_spectra/tensor.hpp"

#include <cstdint>
#include <optional>
#include <variant>

namespace nested {

enum class Method { Unfold1, Unfold2, Unfold3, Oracle, Tensor };

const char* to_string(Method m) noexcept;

struct Estimate {
    /// Unit norm.
    Vec vector;
    Method method = Method::Unfold1;
    int iterations_used = 0;
    /// <T, u (x) v (x) w> for the tensor method, 0 otherwise.
    double objective = 0.0;
    /// Full spectrum of the Gram matrix the vector was taken from, when one exists.
    std::optional<SpectrumResult> spectrum;
};

/// Dominant left singular vector of unfold(t, mode), taken as the top
/// eigenvector of its Gram matrix. The spectrum is that of the raw Gram matrix.
Estimate unfolding_estimate(const Tensor3& t, Mode mode, int threads = 1);

/**
 * Weighted-mean estimator for known z: Tbar = sum_k z_k T(:, :, k), and the
 * estimate is the dominant right singular vector of Tbar.
 *
 * The attached spectrum is that of Tbar^T Tbar / varsigma2 (tagged Oracle),
 * or of Tbar^T Tbar when varsigma2 is not given. Throws std::invalid_argument
 * unless |z| = 1 to 1e-10.
 */
Estimate oracle_estimate(const Tensor3& t, const Vec& z, std::optional<double> varsigma2 = std::nullopt);

/// Initializations for the alternating power iteration.
struct UnfoldingInit {};
struct RandomInit {
    std::uint64_t seed = 0;
};
struct ProvidedInit {
    Vec u, v, w;
};
using Rank1Init = std::variant<UnfoldingInit, RandomInit, ProvidedInit>;

struct Rank1Estimate {
    Estimate u, v, w;
    /// Objective after each sweep.
    std::vector<double> history;
};

/**
 * Rank-one approximation argmax <T, u (x) v (x) w> over unit vectors by
 * alternating power iteration (HOPM).
 *
 * Each sweep updates u <- T x2 v x3 w, then v, then w, normalizing after each
 * step. Iteration stops when a sweep gains less than `tol` or after
 * `max_iters` sweeps. A vanishing contraction triggers one restart from a
 * random start; a second one throws NumericError. On return the largest
 * entries of u and v are positive (w absorbs the signs).
 */
Rank1Estimate tensor_rank1_estimate(const Tensor3& t, const Rank1Init& init = UnfoldingInit{}, int max_iters = 100,
                                    double tol = 1e-10);

/// |a^T b|^2.
double alignment(const Vec& a, const Vec& b);

struct ClusterResult {
    /// +-1 after global sign resolution.
    Vec predicted_labels;
    /// Fraction of matching labels, maximized over a global sign flip.
    double accuracy = 0.0;
    /// |yhat^T ybar|^2 with yhat normalized and ybar = labels / sqrt(n).
    double alignment = 0.0;
    /// Number of exactly zero entries of yhat (assigned +1).
    int ties = 0;
    /// sqrt(n / (1 - zeta)) (yhat_j - sqrt(zeta) labels_j / sqrt(n)) after aligning the sign of yhat with ybar.
    Vec residuals;
};

/// Standardizes with the realized alignment.
ClusterResult cluster_accuracy(const Vec& yhat, const Vec& labels);
/// Standardizes with a given zeta in [0, 1).
ClusterResult cluster_accuracy(const Vec& yhat, const Vec& labels, double zeta);

}  // namespace nested
