#include "nested_spectra/spectra.hpp"

#include "nested_spectra/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <thread>

namespace nested {

namespace {

// Target number of long-dimension columns per Gram block.
constexpr Index kGramBlockColumns = 2048;

struct BlockPlan {
    Index count = 0;
    Index unit = 1;  // columns contributed by one index along the blocked axis
    Index per_block = 1;
};

BlockPlan plan_blocks(Index total_units, Index unit_columns) {
    BlockPlan plan;
    plan.unit = unit_columns;
    plan.per_block = std::max<Index>(1, kGramBlockColumns / std::max<Index>(1, unit_columns));
    plan.count = (total_units + plan.per_block - 1) / plan.per_block;
    return plan;
}

// Lower triangle of the partial Gram matrix of block b.
void block_gram(const Tensor3& t, Mode mode, const BlockPlan& plan, Index b, Mat& scratch, RowMajorMat& staging) {
    scratch.setZero();
    const Index begin = b * plan.per_block;
    switch (mode) {
        case Mode::One: {
            const Index total = t.n2() * t.n3();
            const Index end = std::min(total, begin + plan.per_block);
            scratch.selfadjointView<Eigen::Lower>().rankUpdate(t.mode1_view().middleCols(begin, end - begin));
            break;
        }
        case Mode::Two: {
            // Stage a group of n2 x n3 slabs side by side so one rank update sees a long inner dimension.
            const Index end = std::min(t.n1(), begin + plan.per_block);
            const Index n3 = t.n3();
            staging.resize(t.n2(), (end - begin) * n3);
            for (Index i = begin; i < end; ++i) staging.middleCols((i - begin) * n3, n3) = t.slab(i);
            scratch.selfadjointView<Eigen::Lower>().rankUpdate(staging);
            break;
        }
        case Mode::Three: {
            const Index total = t.n1() * t.n2();
            const Index end = std::min(total, begin + plan.per_block);
            scratch.selfadjointView<Eigen::Lower>().rankUpdate(t.mode3_view().middleCols(begin, end - begin));
            break;
        }
    }
}

void require_square(const Mat& g, Index n, const char* what) {
    if (g.rows() != n || g.cols() != n) {
        throw std::invalid_argument(std::string(what) + ": expected a " + std::to_string(n) + "x" +
                                    std::to_string(n) + " matrix, got " + std::to_string(g.rows()) + "x" +
                                    std::to_string(g.cols()));
    }
}

// Flip each column so its largest-magnitude entry is positive.
void normalize_signs(Mat& v) {
    for (Index j = 0; j < v.cols(); ++j) {
        Index arg = 0;
        v.col(j).cwiseAbs().maxCoeff(&arg);
        if (v(arg, j) < 0.0) v.col(j) = -v.col(j);
    }
}

}  // namespace

const char* to_string(Centering c) noexcept {
    switch (c) {
        case Centering::None: return "none";
        case Centering::Mode2: return "mode2";
        case Centering::Mode3: return "mode3";
        case Centering::Oracle: return "oracle";
    }
    return "unknown";
}

Mat gram(const Mat& u) {
    Mat g = Mat::Zero(u.rows(), u.rows());
    g.selfadjointView<Eigen::Lower>().rankUpdate(u);
    g.triangularView<Eigen::StrictlyUpper>() = g.transpose();
    return g;
}

Mat gram_unfolding(const Tensor3& t, Mode mode, int threads) {
    const Index rows = mode == Mode::One ? t.n1() : mode == Mode::Two ? t.n2() : t.n3();
    const BlockPlan plan = mode == Mode::One   ? plan_blocks(t.n2() * t.n3(), 1)
                           : mode == Mode::Two ? plan_blocks(t.n1(), t.n3())
                                               : plan_blocks(t.n1() * t.n2(), 1);
    Mat total = Mat::Zero(rows, rows);
    const int workers = static_cast<int>(std::clamp<Index>(threads, 1, plan.count));

    std::vector<Mat> partial(static_cast<std::size_t>(workers), Mat(rows, rows));
    std::vector<RowMajorMat> staging(static_cast<std::size_t>(workers));
    for (Index wave = 0; wave < plan.count; wave += workers) {
        const Index in_wave = std::min<Index>(workers, plan.count - wave);
        if (in_wave == 1) {
            block_gram(t, mode, plan, wave, partial[0], staging[0]);
        } else {
            std::vector<std::jthread> pool;
            pool.reserve(static_cast<std::size_t>(in_wave));
            for (Index w = 0; w < in_wave; ++w) {
                pool.emplace_back([&, w] {
                    block_gram(t, mode, plan, wave + w, partial[static_cast<std::size_t>(w)],
                               staging[static_cast<std::size_t>(w)]);
                });
            }
        }
        // Fixed summation order: block index ascending.
        for (Index w = 0; w < in_wave; ++w) {
            total.triangularView<Eigen::Lower>() += partial[static_cast<std::size_t>(w)];
        }
    }
    total.triangularView<Eigen::StrictlyUpper>() = total.transpose();
    return total;
}

Mat center_scale_mode2(const Mat& g, const GeneralParams& p) {
    require_square(g, p.n2, "center_scale_mode2");
    const double v = p.sqrt_volume();
    const double shift = (static_cast<double>(p.n2) + static_cast<double>(p.n1) * static_cast<double>(p.n3)) / v;
    Mat out = (p.n_T() / v) * g;
    out.diagonal().array() -= shift;
    return out;
}

Mat center_scale_mode3(const Mat& g, const GeneralParams& p) {
    require_square(g, p.n3, "center_scale_mode3");
    const double v = p.sqrt_volume();
    const double shift = (static_cast<double>(p.n3) + static_cast<double>(p.n1) * static_cast<double>(p.n2)) / v;
    Mat out = (p.n_T() / v) * g;
    out.diagonal().array() -= shift;
    return out;
}

SpectrumResult sym_eigen(const Mat& s, const JacobiOptions& options) {
    if (s.rows() != s.cols() || s.rows() == 0) throw std::invalid_argument("sym_eigen: matrix must be square and non-empty");
    if (!s.allFinite()) throw NumericError("sym_eigen: non-finite entry in input");

    const Index n = s.rows();
    Mat a = 0.5 * (s + s.transpose());
    Mat v = Mat::Identity(n, n);
    const double scale = a.norm();

    auto off_norm = [&] {
        double sum = 0.0;
        for (Index q = 1; q < n; ++q) sum += a.col(q).head(q).squaredNorm();
        return std::sqrt(2.0 * sum);
    };

    int sweeps = 0;
    double off = off_norm();
    const double target = options.tolerance * scale;
    while (off > target) {
        if (sweeps >= options.max_sweeps) {
            throw SolverError("sym_eigen: no convergence after " + std::to_string(sweeps) +
                                  " sweeps (off-diagonal norm " + std::to_string(off) + ", target " +
                                  std::to_string(target) + ")",
                              sweeps, off);
        }
        ++sweeps;
        // Early sweeps skip small pivots; later sweeps zero entries that no longer
        // change the diagonal in floating point.
        const double threshold = sweeps < 4 ? 0.2 * off / static_cast<double>(n * n) : 0.0;
        for (Index q = 1; q < n; ++q) {
            for (Index p = 0; p < q; ++p) {
                const double apq = a(p, q);
                const double guard = 100.0 * std::abs(apq);
                if (sweeps > 4 && std::abs(a(p, p)) + guard == std::abs(a(p, p)) &&
                    std::abs(a(q, q)) + guard == std::abs(a(q, q))) {
                    a(p, q) = 0.0;
                    a(q, p) = 0.0;
                    continue;
                }
                if (std::abs(apq) <= threshold || apq == 0.0) continue;

                const double theta = 0.5 * (a(q, q) - a(p, p)) / apq;
                double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                if (theta < 0.0) t = -t;
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double sn = t * c;

                const double app = a(p, p);
                const double aqq = a(q, q);
                double* colp = a.col(p).data();
                double* colq = a.col(q).data();
                for (Index r = 0; r < n; ++r) {
                    const double xp = colp[r];
                    const double xq = colq[r];
                    colp[r] = c * xp - sn * xq;
                    colq[r] = sn * xp + c * xq;
                }
                colp[p] = app - t * apq;
                colq[q] = aqq + t * apq;
                colp[q] = 0.0;
                colq[p] = 0.0;
                // Mirror the two updated columns into rows p and q.
                for (Index r = 0; r < n; ++r) {
                    a(p, r) = colp[r];
                    a(q, r) = colq[r];
                }

                double* vp = v.col(p).data();
                double* vq = v.col(q).data();
                for (Index r = 0; r < n; ++r) {
                    const double xp = vp[r];
                    const double xq = vq[r];
                    vp[r] = c * xp - sn * xq;
                    vq[r] = sn * xp + c * xq;
                }
            }
        }
        off = off_norm();
    }

    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index i, Index j) { return a(i, i) < a(j, j); });

    SpectrumResult result;
    result.eigenvalues.resize(n);
    result.eigenvectors.resize(n, n);
    for (Index j = 0; j < n; ++j) {
        const Index src = order[static_cast<std::size_t>(j)];
        result.eigenvalues(j) = a(src, src);
        result.eigenvectors.col(j) = v.col(src);
    }
    normalize_signs(result.eigenvectors);
    result.sweeps = sweeps;
    return result;
}

EsdSummary::EsdSummary(const Vec& eigenvalues, int bins) {
    if (bins < 1) throw std::invalid_argument("esd: bins must be >= 1");
    if (eigenvalues.size() == 0) throw std::invalid_argument("esd: empty spectrum");
    sorted_.assign(eigenvalues.data(), eigenvalues.data() + eigenvalues.size());
    std::sort(sorted_.begin(), sorted_.end());

    double lo = sorted_.front();
    double hi = sorted_.back();
    if (hi <= lo) {
        lo -= 0.5;
        hi += 0.5;
    }
    const double width = (hi - lo) / bins;
    edges_.resize(static_cast<std::size_t>(bins) + 1);
    for (int b = 0; b <= bins; ++b) edges_[static_cast<std::size_t>(b)] = lo + width * b;
    edges_.back() = hi;

    std::vector<std::size_t> counts(static_cast<std::size_t>(bins), 0);
    for (double x : sorted_) {
        auto b = static_cast<std::ptrdiff_t>(std::floor((x - lo) / width));
        b = std::clamp<std::ptrdiff_t>(b, 0, bins - 1);  // the last bin is closed on the right
        ++counts[static_cast<std::size_t>(b)];
    }
    const double total = static_cast<double>(sorted_.size());
    masses_.resize(counts.size());
    for (std::size_t b = 0; b < counts.size(); ++b) masses_[b] = static_cast<double>(counts[b]) / total;
}

std::vector<double> EsdSummary::densities() const {
    std::vector<double> d(masses_.size());
    for (std::size_t b = 0; b < masses_.size(); ++b) d[b] = masses_[b] / (edges_[b + 1] - edges_[b]);
    return d;
}

double EsdSummary::cdf(double x) const {
    const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
    return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

EsdSummary esd(const SpectrumResult& sr, int bins) { return EsdSummary(sr.eigenvalues, bins); }

}  // namespace nested
