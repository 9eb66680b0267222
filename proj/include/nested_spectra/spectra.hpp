#pragma once

#include "nested_spectra/model.hpp"
#include "nested_spectra/tensor.hpp"

#include <vector>

namespace nested {

/// Which affine transform was applied to a Gram matrix before diagonalizing.
enum class Centering { None, Mode2, Mode3, Oracle };

const char* to_string(Centering c) noexcept;

struct SpectrumResult {
    /// Ascending.
    Vec eigenvalues;
    /// Column j is the unit eigenvector for eigenvalues(j).
    Mat eigenvectors;
    Centering centering = Centering::None;
    /// Number of Jacobi sweeps performed.
    int sweeps = 0;

    Index size() const noexcept { return eigenvalues.size(); }
    double top_value() const { return eigenvalues(eigenvalues.size() - 1); }
    Vec top_vector() const { return eigenvectors.col(eigenvectors.cols() - 1); }
};

/// U U^T.
Mat gram(const Mat& u);

/**
 * unfold(t, mode) * unfold(t, mode)^T without materializing the unfolding.
 *
 * The long dimension is split into fixed-size blocks whose partial Gram
 * matrices are accumulated in block order, so the result is bit-identical
 * regardless of how many threads evaluate the blocks.
 */
Mat gram_unfolding(const Tensor3& t, Mode mode, int threads = 1);

/// (n_T / sqrt(n1 n2 n3)) G - ((n2 + n1 n3) / sqrt(n1 n2 n3)) I for the n2 x n2 mode-2 Gram matrix.
Mat center_scale_mode2(const Mat& g, const GeneralParams& p);
/// (n_T / sqrt(n1 n2 n3)) G - ((n3 + n1 n2) / sqrt(n1 n2 n3)) I for the n3 x n3 mode-3 Gram matrix.
Mat center_scale_mode3(const Mat& g, const GeneralParams& p);

struct JacobiOptions {
    int max_sweeps = 100;
    /// Converged once the off-diagonal Frobenius norm is below tolerance * |S|_F.
    double tolerance = 1e-12;
};

/**
 * Full eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
 *
 * The input is symmetrized as (S + S^T) / 2 first. Each eigenvector is
 * signed so that its entry of largest magnitude is positive. Throws
 * NumericError on non-finite input and SolverError when the sweep cap is hit.
 */
SpectrumResult sym_eigen(const Mat& s, const JacobiOptions& options = {});

/// Normalized histogram plus the exact empirical CDF of a spectrum.
class EsdSummary {
public:
    EsdSummary(const Vec& eigenvalues, int bins);

    const std::vector<double>& edges() const noexcept { return edges_; }
    const std::vector<double>& masses() const noexcept { return masses_; }
    /// Mass divided by bin width.
    std::vector<double> densities() const;

    /// Fraction of eigenvalues <= x.
    double cdf(double x) const;

    double largest() const { return sorted_.back(); }
    double second_largest() const { return sorted_.size() > 1 ? sorted_[sorted_.size() - 2] : sorted_.back(); }
    const std::vector<double>& sorted() const noexcept { return sorted_; }

private:
    std::vector<double> sorted_;
    std::vector<double> edges_;
    std::vector<double> masses_;
};

EsdSummary esd(const SpectrumResult& sr, int bins);

}  // namespace nested
