#pragma once

#include "nested_spectra/shape_ratios.hpp"
#include "nested_spectra/tensor.hpp"

#include <cstdint>
#include <optional>
#include <variant>

namespace nested {

// Signal strength of the tensor view can be given directly or through one of
// the two normalized scales used by the asymptotic theory.
struct BetaT {
    double value;
};
/// rho_T = beta_T^2 n_T / sqrt(n1 n2 n3).
struct RhoT {
    double value;
};
/// varrho = rho_T (n1 n2 / n_M + beta_M^2).
struct VarRho {
    double value;
};
using TensorSnr = std::variant<BetaT, RhoT, VarRho>;

/**
 * Parameters of the nested matrix-tensor model
 *
 *   T = beta_T M (x) z + W / sqrt(n_T),   M = beta_M x y^T + Z / sqrt(n_M),
 *
 * with n_M = n1 + n2 and n_T = n1 + n2 + n3. All derived quantities are
 * evaluated at the given finite dimensions.
 */
struct GeneralParams {
    Index n1 = 0;
    Index n2 = 0;
    Index n3 = 0;
    double beta_M = 0.0;
    TensorSnr snr = BetaT{0.0};
    std::uint64_t seed = 0;

    double n_M() const noexcept { return static_cast<double>(n1 + n2); }
    double n_T() const noexcept { return static_cast<double>(n1 + n2 + n3); }
    /// sqrt(n1 n2 n3), computed without integer overflow.
    double sqrt_volume() const noexcept;
    ShapeRatios ratios() const;

    /// beta_T resolved from whichever scale `snr` holds.
    double beta_T() const;

    /// Throws std::invalid_argument for nonpositive dims or negative strengths.
    void validate() const;
};

double rho_from_beta(const GeneralParams& p);
double beta_from_rho(const GeneralParams& p);
/// varrho with the beta_M^2 term kept, as used for the mode-3 spike.
double varrho(const GeneralParams& p);
double beta_from_varrho(const GeneralParams& p, double varrho_value);
/// Noise level of the weighted-mean matrix: varsigma^2 = beta_T^2 + n_M / n_T.
double varsigma2(const GeneralParams& p);

/// Unit-norm planted directions.
struct PlantedSignals {
    Vec x;
    Vec y;
    Vec z;
};

/// Test hooks for the samplers. Amplitudes multiply the noise terms.
struct SamplingOptions {
    double matrix_noise = 1.0;
    double tensor_noise = 1.0;
    std::optional<PlantedSignals> signals;
};

struct GeneralSample {
    Tensor3 tensor;
    Mat matrix;
    PlantedSignals signals;
};

/// Draws (T, M, x, y, z). Fully determined by p.seed.
GeneralSample sample_general(const GeneralParams& p, const SamplingOptions& options = {});

/**
 * Two-class multi-view model
 *
 *   X = (mu ybar^T + Z) (x) h + W,  Z_ij ~ N(0, 1/(p+n)),  W_ijk ~ N(0, 1/(p+n+m)),
 *
 * with ybar_i = +-1/sqrt(n). Maps onto the general model with
 * (beta_M, beta_T) = (|mu|, |h|).
 */
struct MultiViewParams {
    Index p = 0;
    Index n = 0;
    Index m = 0;
    Vec mu;
    Vec h;
    std::uint64_t seed = 0;
    /// Size of the +1 class; defaults to n / 2 (n must then be even).
    std::optional<Index> positives;

    /// mu spread evenly over all p coordinates, h evenly over all m views.
    static MultiViewParams with_norms(Index p, Index n, Index m, double mu_norm, double h_norm,
                                      std::uint64_t seed);

    ShapeRatios ratios() const;
    /// rho = |h|^2 (p+n+m) / sqrt(p n m).
    double rho() const;
    GeneralParams as_general() const;
    void validate() const;
};

struct MultiViewSample {
    Tensor3 tensor;
    /// +-1 class assignment.
    Vec labels;
    /// labels / sqrt(n), unit norm.
    Vec ybar;
};

MultiViewSample sample_multiview(const MultiViewParams& p, const SamplingOptions& options = {});

}  // namespace nested
