#include "nested_spectra/tensor.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace nested {

namespace {

void require_positive_dims(Index n1, Index n2, Index n3) {
    if (n1 <= 0 || n2 <= 0 || n3 <= 0) {
        throw std::invalid_argument("Tensor3: dimensions must be positive");
    }
}

}  // namespace

Mode mode_from_int(int mode) {
    if (mode < 1 || mode > 3) {
        throw std::invalid_argument("unfolding mode must be 1, 2 or 3, got " + std::to_string(mode));
    }
    return static_cast<Mode>(mode);
}

Tensor3::Tensor3(Index n1, Index n2, Index n3) : dims_{n1, n2, n3} {
    require_positive_dims(n1, n2, n3);
    data_.assign(static_cast<std::size_t>(n1 * n2 * n3), 0.0);
}

Tensor3::Tensor3(Index n1, Index n2, Index n3, std::vector<double> data)
    : dims_{n1, n2, n3}, data_(std::move(data)) {
    require_positive_dims(n1, n2, n3);
    if (static_cast<Index>(data_.size()) != n1 * n2 * n3) {
        throw std::invalid_argument("Tensor3: data length " + std::to_string(data_.size()) +
                                    " does not match n1*n2*n3 = " + std::to_string(n1 * n2 * n3));
    }
    for (double v : data_) {
        if (!std::isfinite(v)) throw std::invalid_argument("Tensor3: non-finite entry");
    }
}

ConstRowMajorMap Tensor3::slab(Index i) const {
    return ConstRowMajorMap(data_.data() + i * dims_[1] * dims_[2], dims_[1], dims_[2]);
}

ConstRowMajorMap Tensor3::mode1_view() const {
    return ConstRowMajorMap(data_.data(), dims_[0], dims_[1] * dims_[2]);
}

ConstColMajorMap Tensor3::mode3_view() const {
    return ConstColMajorMap(data_.data(), dims_[2], dims_[0] * dims_[1]);
}

Mat Tensor3::frontal_slice(Index k) const {
    Mat s(dims_[0], dims_[1]);
    for (Index i = 0; i < dims_[0]; ++i)
        for (Index j = 0; j < dims_[1]; ++j) s(i, j) = (*this)(i, j, k);
    return s;
}

Mat unfold(const Tensor3& t, Mode mode) {
    const Index n1 = t.n1(), n2 = t.n2(), n3 = t.n3();
    switch (mode) {
        case Mode::One:
            return t.mode1_view();
        case Mode::Two: {
            Mat u(n2, n1 * n3);
            for (Index i = 0; i < n1; ++i) u.middleCols(i * n3, n3) = t.slab(i);
            return u;
        }
        case Mode::Three:
            return t.mode3_view();
    }
    throw std::invalid_argument("unfold: invalid mode");
}

Mat unfold(const Tensor3& t, int mode) { return unfold(t, mode_from_int(mode)); }

Tensor3 refold(const Mat& unfolded, Mode mode, std::array<Index, 3> dims) {
    const auto [n1, n2, n3] = dims;
    Tensor3 t(n1, n2, n3);
    const Index rows = mode == Mode::One ? n1 : mode == Mode::Two ? n2 : n3;
    if (unfolded.rows() != rows || unfolded.cols() * rows != n1 * n2 * n3) {
        throw std::invalid_argument("refold: matrix shape does not match tensor dims");
    }
    for (Index i = 0; i < n1; ++i)
        for (Index j = 0; j < n2; ++j)
            for (Index k = 0; k < n3; ++k) {
                switch (mode) {
                    case Mode::One: t(i, j, k) = unfolded(i, j * n3 + k); break;
                    case Mode::Two: t(i, j, k) = unfolded(j, i * n3 + k); break;
                    case Mode::Three: t(i, j, k) = unfolded(k, i * n2 + j); break;
                }
            }
    return t;
}

Tensor3 outer_mv(const Mat& a, const Vec& w) {
    Tensor3 t(a.rows(), a.cols(), w.size());
    for (Index i = 0; i < a.rows(); ++i)
        for (Index j = 0; j < a.cols(); ++j)
            for (Index k = 0; k < w.size(); ++k) t(i, j, k) = a(i, j) * w(k);
    return t;
}

Tensor3 outer_vvv(const Vec& u, const Vec& v, const Vec& w) {
    Tensor3 t(u.size(), v.size(), w.size());
    for (Index i = 0; i < u.size(); ++i)
        for (Index j = 0; j < v.size(); ++j)
            for (Index k = 0; k < w.size(); ++k) t(i, j, k) = u(i) * v(j) * w(k);
    return t;
}

Mat kronecker(const Mat& a, const Mat& b) {
    const Index p1 = b.rows(), p2 = b.cols();
    Mat out(a.rows() * p1, a.cols() * p2);
    for (Index i = 0; i < a.rows(); ++i)
        for (Index j = 0; j < a.cols(); ++j) out.block(i * p1, j * p2, p1, p2) = a(i, j) * b;
    return out;
}

double inner(const Tensor3& a, const Tensor3& b) {
    if (a.dims() != b.dims()) throw std::invalid_argument("inner: tensor dimensions differ");
    const auto da = a.data();
    const auto db = b.data();
    return Eigen::Map<const Vec>(da.data(), a.size()).dot(Eigen::Map<const Vec>(db.data(), b.size()));
}

double frobenius(const Tensor3& t) {
    const auto d = t.data();
    return Eigen::Map<const Vec>(d.data(), t.size()).norm();
}

Vec contract_mode1(const Tensor3& t, const Vec& v, const Vec& w) {
    if (v.size() != t.n2() || w.size() != t.n3()) throw std::invalid_argument("contract_mode1: size mismatch");
    Vec out(t.n1());
    for (Index i = 0; i < t.n1(); ++i) out(i) = v.dot(t.slab(i) * w);
    return out;
}

Vec contract_mode2(const Tensor3& t, const Vec& u, const Vec& w) {
    if (u.size() != t.n1() || w.size() != t.n3()) throw std::invalid_argument("contract_mode2: size mismatch");
    Vec out = Vec::Zero(t.n2());
    for (Index i = 0; i < t.n1(); ++i) out.noalias() += u(i) * (t.slab(i) * w);
    return out;
}

Vec contract_mode3(const Tensor3& t, const Vec& u, const Vec& v) {
    if (u.size() != t.n1() || v.size() != t.n2()) throw std::invalid_argument("contract_mode3: size mismatch");
    Vec out = Vec::Zero(t.n3());
    for (Index i = 0; i < t.n1(); ++i) out.noalias() += u(i) * (t.slab(i).transpose() * v);
    return out;
}

double inner_rank1(const Tensor3& t, const Vec& u, const Vec& v, const Vec& w) {
    if (w.size() != t.n3()) throw std::invalid_argument("inner_rank1: size mismatch");
    return w.dot(contract_mode3(t, u, v));
}

Mat weighted_slice_sum(const Tensor3& t, const Vec& w) {
    if (w.size() != t.n3()) throw std::invalid_argument("weighted_slice_sum: weight length must equal n3");
    // Rows of the (n1 n2) x n3 row-major view are the fibres T(i, j, :).
    const auto d = t.data();
    const Vec flat = ConstRowMajorMap(d.data(), t.n1() * t.n2(), t.n3()) * w;
    Mat out(t.n1(), t.n2());
    for (Index i = 0; i < t.n1(); ++i)
        for (Index j = 0; j < t.n2(); ++j) out(i, j) = flat(i * t.n2() + j);
    return out;
}

}  // namespace nested
