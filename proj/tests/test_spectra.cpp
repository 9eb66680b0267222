#include "nested_spectra/errors.hpp"
#include "nested_spectra/spectra.hpp"
#include "oracles.hpp"

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include <cmath>

using namespace nested;

namespace {

Mat random_symmetric(Index n, std::mt19937_64& gen) {
    const Mat a = oracle::random_mat(n, n, gen);
    return 0.5 * (a + a.transpose());
}

Mat random_orthogonal(Index n, std::mt19937_64& gen) {
    Eigen::HouseholderQR<Mat> qr(oracle::random_mat(n, n, gen));
    return qr.householderQ() * Mat::Identity(n, n);
}

}  // namespace

TEST(Gram, SmallExamples) {
    const Mat u = (Mat(2, 3) << 1, 2, 3, 4, 5, 6).finished();
    const Mat expected = (Mat(2, 2) << 14, 32, 32, 77).finished();
    EXPECT_EQ(gram(u), expected);
}

TEST(Gram, UnfoldingMatchesExplicitProduct) {
    std::mt19937_64 gen(1);
    const Tensor3 t = oracle::random_tensor(9, 7, 5, gen);
    for (int mode = 1; mode <= 3; ++mode) {
        const Mat u = oracle::unfold(t, mode);
        const Mat g = gram_unfolding(t, mode_from_int(mode));
        EXPECT_LT((g - u * u.transpose()).cwiseAbs().maxCoeff(), 1e-11) << "mode " << mode;
        EXPECT_NEAR(g.trace(), frobenius(t) * frobenius(t), 1e-9);
        EXPECT_EQ(g, g.transpose());
    }
}

TEST(Gram, ThreadCountDoesNotChangeBits) {
    std::mt19937_64 gen(2);
    const Tensor3 t = oracle::random_tensor(40, 30, 50, gen);
    for (Mode m : {Mode::One, Mode::Two, Mode::Three}) {
        const Mat one = gram_unfolding(t, m, 1);
        EXPECT_EQ(one, gram_unfolding(t, m, 3));
        EXPECT_EQ(one, gram_unfolding(t, m, 8));
    }
}

TEST(Centering, AffineMapAndTrace) {
    GeneralParams p;
    p.n1 = 6;
    p.n2 = 4;
    p.n3 = 3;
    std::mt19937_64 gen(3);
    const Tensor3 t = oracle::random_tensor(6, 4, 3, gen);
    const double v = std::sqrt(72.0);
    const Mat g2 = gram_unfolding(t, Mode::Two);
    const Mat c2 = center_scale_mode2(g2, p);
    EXPECT_NEAR(c2.trace(), 13.0 / v * g2.trace() - 4.0 * (4.0 + 18.0) / v, 1e-10);
    EXPECT_NEAR(c2(0, 1), 13.0 / v * g2(0, 1), 1e-12);

    const Mat g3 = gram_unfolding(t, Mode::Three);
    const Mat c3 = center_scale_mode3(g3, p);
    EXPECT_NEAR(c3.trace(), 13.0 / v * g3.trace() - 3.0 * (3.0 + 24.0) / v, 1e-10);
    EXPECT_THROW(center_scale_mode2(g3, p), std::invalid_argument);
}

TEST(Centering, ShiftEqualsExpectedDiagonalOfPureNoise) {
    // For W / sqrt(n_T), E G_jj = n1 n3 / n_T on mode 2, so scaling and
    // shifting leaves E diag = (n1 n3 - n2 - n1 n3) / sqrt(n1 n2 n3) = -n2 / sqrt(n1 n2 n3).
    GeneralParams p;
    p.n1 = 30;
    p.n2 = 20;
    p.n3 = 25;
    double mean_diag = 0.0;
    for (std::uint64_t s = 0; s < 10; ++s) {
        p.seed = s;
        const Mat c = center_scale_mode2(gram_unfolding(sample_general(p).tensor, Mode::Two), p);
        mean_diag += c.diagonal().mean() / 10.0;
    }
    EXPECT_NEAR(mean_diag, -20.0 / std::sqrt(15000.0), 0.02);
}

TEST(Jacobi, DiagonalMatrix) {
    const Mat d = Vec((Vec(3) << 3, 1, 2).finished()).asDiagonal();
    const SpectrumResult r = sym_eigen(d);
    EXPECT_EQ(r.eigenvalues, (Vec(3) << 1, 2, 3).finished());
    EXPECT_EQ(r.top_vector(), (Vec(3) << 1, 0, 0).finished());
    EXPECT_EQ(r.eigenvectors.col(0), (Vec(3) << 0, 1, 0).finished());
}

TEST(Jacobi, TwoByTwo) {
    const Mat s = (Mat(2, 2) << 2, 1, 1, 2).finished();
    const SpectrumResult r = sym_eigen(s);
    EXPECT_NEAR(r.eigenvalues(0), 1.0, 1e-14);
    EXPECT_NEAR(r.eigenvalues(1), 3.0, 1e-14);
    const double h = 1.0 / std::sqrt(2.0);
    EXPECT_NEAR(std::abs(r.top_vector()(0)), h, 1e-14);
    EXPECT_NEAR(r.top_vector()(0), r.top_vector()(1), 1e-14);
}

TEST(Jacobi, RandomMatchesReferenceSolver) {
    std::mt19937_64 gen(4);
    for (int rep = 0; rep < 5; ++rep) {
        const Mat s = random_symmetric(50, gen);
        const SpectrumResult r = sym_eigen(s);
        const Mat& v = r.eigenvectors;
        EXPECT_LT((v * r.eigenvalues.asDiagonal() * v.transpose() - s).cwiseAbs().maxCoeff(), 1e-10);
        EXPECT_LT((v.transpose() * v - Mat::Identity(50, 50)).cwiseAbs().maxCoeff(), 1e-10);
        Eigen::SelfAdjointEigenSolver<Mat> ref(s);
        EXPECT_LT((ref.eigenvalues() - r.eigenvalues).cwiseAbs().maxCoeff(), 1e-10);
        for (Index j = 1; j < 50; ++j) EXPECT_LE(r.eigenvalues(j - 1), r.eigenvalues(j));
        for (Index j = 0; j < 50; ++j) {
            Index arg;
            v.col(j).cwiseAbs().maxCoeff(&arg);
            EXPECT_GT(v(arg, j), 0.0);
        }
    }
}

TEST(Jacobi, RotationInvariantEigenvalues) {
    std::mt19937_64 gen(5);
    const Mat s = random_symmetric(30, gen);
    const Mat q = random_orthogonal(30, gen);
    const Vec a = sym_eigen(s).eigenvalues;
    const Vec b = sym_eigen(q * s * q.transpose()).eigenvalues;
    EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Jacobi, ErrorsAreTyped) {
    Mat s = Mat::Identity(3, 3);
    s(1, 2) = std::nan("");
    EXPECT_THROW(sym_eigen(s), NumericError);
    EXPECT_THROW(sym_eigen(Mat(2, 3)), std::invalid_argument);

    std::mt19937_64 gen(6);
    JacobiOptions tight;
    tight.max_sweeps = 1;
    try {
        sym_eigen(random_symmetric(40, gen), tight);
        FAIL() << "expected SolverError";
    } catch (const SolverError& e) {
        EXPECT_EQ(e.sweeps(), 1);
        EXPECT_GT(e.residual(), 0.0);
    }
}

TEST(Jacobi, GramEigenvaluesMatchFrobenius) {
    std::mt19937_64 gen(7);
    const Tensor3 t = oracle::random_tensor(8, 6, 5, gen);
    const SpectrumResult r = sym_eigen(gram_unfolding(t, Mode::Two));
    EXPECT_NEAR(r.eigenvalues.sum(), frobenius(t) * frobenius(t), 1e-9);
    EXPECT_GE(r.eigenvalues.minCoeff(), -1e-10);
}

TEST(Esd, HistogramAndCdf) {
    const Vec ev = (Vec(4) << 0, 1, 2, 3).finished();
    const EsdSummary s(ev, 3);
    ASSERT_EQ(s.edges().size(), 4u);
    EXPECT_DOUBLE_EQ(s.edges().front(), 0.0);
    EXPECT_DOUBLE_EQ(s.edges().back(), 3.0);
    // Bins [0,1) [1,2) [2,3]; the top value lands in the closed last bin.
    EXPECT_DOUBLE_EQ(s.masses()[0], 0.25);
    EXPECT_DOUBLE_EQ(s.masses()[1], 0.25);
    EXPECT_DOUBLE_EQ(s.masses()[2], 0.5);
    EXPECT_DOUBLE_EQ(s.densities()[2], 0.5);
    EXPECT_DOUBLE_EQ(s.cdf(-1.0), 0.0);
    EXPECT_DOUBLE_EQ(s.cdf(1.0), 0.5);
    EXPECT_DOUBLE_EQ(s.cdf(1.5), 0.5);
    EXPECT_DOUBLE_EQ(s.cdf(3.0), 1.0);
    EXPECT_EQ(s.largest(), 3.0);
    EXPECT_EQ(s.second_largest(), 2.0);
}

TEST(Esd, MassSumsToOneAndCdfMonotone) {
    std::mt19937_64 gen(8);
    const Vec ev = sym_eigen(random_symmetric(60, gen)).eigenvalues;
    const EsdSummary s(ev, 17);
    double total = 0.0;
    for (double m : s.masses()) total += m;
    EXPECT_NEAR(total, 1.0, 1e-12);
    double prev = 0.0;
    for (double x = -20; x <= 20; x += 0.01) {
        const double c = s.cdf(x);
        EXPECT_GE(c, prev);
        prev = c;
    }
    EXPECT_EQ(prev, 1.0);
}

TEST(Esd, DegenerateSpectrumAndBadInput) {
    const EsdSummary s(Vec::Constant(3, 2.0), 4);
    EXPECT_DOUBLE_EQ(s.edges().front(), 1.5);
    EXPECT_DOUBLE_EQ(s.edges().back(), 2.5);
    EXPECT_THROW(EsdSummary(Vec(0), 4), std::invalid_argument);
    EXPECT_THROW(EsdSummary(Vec::Ones(3), 0), std::invalid_argument);
}
