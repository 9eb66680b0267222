#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace nested {

using Index = Eigen::Index;
using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using RowMajorMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using ConstRowMajorMap = Eigen::Map<const RowMajorMat>;
using ConstColMajorMap = Eigen::Map<const Mat>;

/// Unfolding modes. Mode numbering follows the usual 1/2/3 convention.
enum class Mode : int { One = 1, Two = 2, Three = 3 };

/// Converts an integer in {1,2,3} to a Mode; throws std::invalid_argument otherwise.
Mode mode_from_int(int mode);

/**
 * Dense order-3 tensor of shape n1 x n2 x n3.
 *
 * Entries are stored contiguously with the last index fastest: the 0-based
 * entry (i, j, k) lives at offset (i * n2 + j) * n3 + k. In 1-based notation
 * this is L(i,j,k) = ((i-1) n2 + (j-1)) n3 + (k-1). All public accessors are
 * 0-based.
 *
 * With this layout the mode-1 unfolding is the row-major n1 x (n2 n3) view
 * of the data, the mode-3 unfolding is the column-major n3 x (n1 n2) view,
 * and the mode-2 unfolding is the concatenation of the row-major n2 x n3
 * slabs T(i, :, :).
 */
class Tensor3 {
public:
    Tensor3() = default;

    /// Zero tensor.
    Tensor3(Index n1, Index n2, Index n3);

    /// Takes ownership of `data`; its size must be n1 * n2 * n3 and all entries finite.
    Tensor3(Index n1, Index n2, Index n3, std::vector<double> data);

    Index n1() const noexcept { return dims_[0]; }
    Index n2() const noexcept { return dims_[1]; }
    Index n3() const noexcept { return dims_[2]; }
    std::array<Index, 3> dims() const noexcept { return dims_; }
    Index size() const noexcept { return static_cast<Index>(data_.size()); }

    double operator()(Index i, Index j, Index k) const { return data_[offset(i, j, k)]; }
    double& operator()(Index i, Index j, Index k) { return data_[offset(i, j, k)]; }

    std::span<const double> data() const noexcept { return data_; }
    std::span<double> data() noexcept { return data_; }

    /// Row-major n2 x n3 view of the slab T(i, :, :).
    ConstRowMajorMap slab(Index i) const;

    /// Row-major n1 x (n2 n3) view, i.e. the mode-1 unfolding without a copy.
    ConstRowMajorMap mode1_view() const;

    /// Column-major n3 x (n1 n2) view, i.e. the mode-3 unfolding without a copy.
    ConstColMajorMap mode3_view() const;

    /// Frontal slice T(:, :, k) as an n1 x n2 matrix.
    Mat frontal_slice(Index k) const;

    bool operator==(const Tensor3& other) const = default;

private:
    std::size_t offset(Index i, Index j, Index k) const noexcept {
        return static_cast<std::size_t>((i * dims_[1] + j) * dims_[2] + k);
    }

    std::array<Index, 3> dims_{0, 0, 0};
    std::vector<double> data_;
};

/**
 * Matricization along `mode`.
 *
 * With 1-based indices, entry T(i,j,k) lands at
 *   mode 1: row i, column n3 (j-1) + k   (n1 x n2 n3)
 *   mode 2: row j, column n3 (i-1) + k   (n2 x n1 n3)
 *   mode 3: row k, column n2 (i-1) + j   (n3 x n1 n2)
 */
Mat unfold(const Tensor3& t, Mode mode);
Mat unfold(const Tensor3& t, int mode);

/// Inverse of unfold: rebuilds the tensor of shape `dims` from its mode unfolding.
Tensor3 refold(const Mat& unfolded, Mode mode, std::array<Index, 3> dims);

/// [A (x) w]_{ijk} = A_{ij} w_k.
Tensor3 outer_mv(const Mat& a, const Vec& w);

/// [u (x) v (x) w]_{ijk} = u_i v_j w_k.
Tensor3 outer_vvv(const Vec& u, const Vec& v, const Vec& w);

/// Kronecker product: [A (x) B]_{p1 (i-1) + r, p2 (j-1) + s} = A_{ij} B_{rs}.
Mat kronecker(const Mat& a, const Mat& b);

/// Sum of entrywise products; throws std::invalid_argument on shape mismatch.
double inner(const Tensor3& a, const Tensor3& b);

double frobenius(const Tensor3& t);

// Contractions used by the alternating power iteration. Each equals an
// unfolding times a Kronecker product, e.g. contract_mode1(t, v, w) is
// unfold(t, 1) * kronecker(v, w), but none of them materializes either factor.

/// (T x2 v x3 w)_i = sum_{j,k} T_{ijk} v_j w_k.
Vec contract_mode1(const Tensor3& t, const Vec& v, const Vec& w);
/// (T x1 u x3 w)_j = sum_{i,k} T_{ijk} u_i w_k.
Vec contract_mode2(const Tensor3& t, const Vec& u, const Vec& w);
/// (T x1 u x2 v)_k = sum_{i,j} T_{ijk} u_i v_j.
Vec contract_mode3(const Tensor3& t, const Vec& u, const Vec& v);

/// <T, u (x) v (x) w> without forming the rank-one tensor.
double inner_rank1(const Tensor3& t, const Vec& u, const Vec& v, const Vec& w);

/// Weighted sum of frontal slices, sum_k w_k T(:, :, k), as an n1 x n2 matrix.
Mat weighted_slice_sum(const Tensor3& t, const Vec& w);

}  // namespace nested
