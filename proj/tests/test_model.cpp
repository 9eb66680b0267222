#include "nested_spectra/model.hpp"
#include "nested_spectra/rng.hpp"
#include "nested_spectra/tensor.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace nested;

namespace {

GeneralParams dims(Index n1, Index n2, Index n3) {
    GeneralParams p;
    p.n1 = n1;
    p.n2 = n2;
    p.n3 = n3;
    return p;
}

}  // namespace

TEST(Rng, DeterministicAndStreamsDiffer) {
    Rng a(42), b(42), c(43);
    for (int i = 0; i < 10; ++i) {
        const double x = a.normal();
        EXPECT_EQ(x, b.normal());
        EXPECT_NE(x, c.normal());
    }
    EXPECT_NE(derive_seed(1, 0), derive_seed(1, 1));
    EXPECT_NE(derive_seed(1, 0), derive_seed(2, 0));
}

TEST(Rng, NormalMoments) {
    Rng r(7);
    const int n = 200000;
    double s = 0, s2 = 0, s4 = 0;
    for (int i = 0; i < n; ++i) {
        const double x = r.normal();
        s += x;
        s2 += x * x;
        s4 += x * x * x * x;
    }
    EXPECT_NEAR(s / n, 0.0, 5.0 / std::sqrt(n));
    EXPECT_NEAR(s2 / n, 1.0, 5.0 * std::sqrt(2.0 / n));
    EXPECT_NEAR(s4 / n, 3.0, 5.0 * std::sqrt(96.0 / n));
}

TEST(Rng, BelowIsInRangeAndRoughlyUniform) {
    Rng r(3);
    std::vector<int> counts(7, 0);
    for (int i = 0; i < 70000; ++i) {
        const auto k = r.below(7);
        ASSERT_LT(k, 7u);
        ++counts[k];
    }
    for (int c : counts) EXPECT_NEAR(c, 10000, 5 * std::sqrt(10000.0));
}

TEST(Conversions, BetaForRhoTwoAtReferenceDims) {
    GeneralParams p = dims(600, 400, 200);
    p.snr = RhoT{2.0};
    // beta_T^2 = 2 sqrt(4.8e7) / 1200.
    const double expected = std::sqrt(2.0 * std::sqrt(4.8e7) / 1200.0);
    EXPECT_NEAR(p.beta_T(), expected, 1e-12);
    EXPECT_NEAR(p.beta_T(), 3.398, 1e-3);
    EXPECT_NEAR(rho_from_beta(p), 2.0, 1e-12);
}

TEST(Conversions, RoundTrips) {
    GeneralParams p = dims(600, 400, 200);
    p.beta_M = 1.3;
    p.snr = BetaT{0.7};
    GeneralParams q = p;
    q.snr = RhoT{rho_from_beta(p)};
    EXPECT_NEAR(q.beta_T(), 0.7, 1e-12);
    EXPECT_NEAR(beta_from_rho(p), 0.7, 1e-12);

    GeneralParams r = dims(600, 400, 200);
    r.beta_M = 3.0;
    r.snr = VarRho{4.0};
    EXPECT_NEAR(varrho(r), 4.0, 1e-10);
    EXPECT_NEAR(beta_from_varrho(r, 4.0), r.beta_T(), 1e-14);
}

TEST(Conversions, VarsigmaAndRatios) {
    GeneralParams p = dims(600, 400, 200);
    p.snr = BetaT{0.5};
    EXPECT_NEAR(varsigma2(p), 0.25 + 1000.0 / 1200.0, 1e-15);
    const ShapeRatios c = p.ratios();
    EXPECT_NEAR(c.c1, 0.5, 1e-15);
    EXPECT_NEAR(c.c2, 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(c.a(), 0.6, 1e-15);
    EXPECT_NEAR(c.b(), 0.4, 1e-15);
    EXPECT_THROW(ShapeRatios::make(0.5, 0.5, 0.1), std::invalid_argument);
    EXPECT_THROW(ShapeRatios::make(0.5, 0.6, -0.1), std::invalid_argument);
}

TEST(SampleGeneral, SignalsUnitNormAndDeterministic) {
    GeneralParams p = dims(7, 5, 3);
    p.beta_M = 1.0;
    p.snr = BetaT{1.0};
    p.seed = 99;
    const GeneralSample a = sample_general(p);
    const GeneralSample b = sample_general(p);
    EXPECT_NEAR(a.signals.x.norm(), 1.0, 1e-12);
    EXPECT_NEAR(a.signals.y.norm(), 1.0, 1e-12);
    EXPECT_NEAR(a.signals.z.norm(), 1.0, 1e-12);
    EXPECT_EQ(a.tensor, b.tensor);
    EXPECT_EQ(a.matrix, b.matrix);
    p.seed = 100;
    EXPECT_FALSE(sample_general(p).tensor == a.tensor);
}

TEST(SampleGeneral, EqualsModelDefinition) {
    GeneralParams p = dims(6, 5, 4);
    p.beta_M = 1.2;
    p.snr = BetaT{0.8};
    p.seed = 5;
    SamplingOptions off;
    off.tensor_noise = 0.0;
    const GeneralSample s = sample_general(p, off);
    for (Index i = 0; i < 6; ++i)
        for (Index j = 0; j < 5; ++j)
            for (Index k = 0; k < 4; ++k) EXPECT_NEAR(s.tensor(i, j, k), 0.8 * s.matrix(i, j) * s.signals.z(k), 1e-15);
}

TEST(SampleGeneral, NoiseFreeIsRankOne) {
    GeneralParams p = dims(6, 5, 4);
    p.beta_M = 1.5;
    p.snr = BetaT{2.0};
    p.seed = 1;
    SamplingOptions off;
    off.matrix_noise = 0.0;
    off.tensor_noise = 0.0;
    const GeneralSample s = sample_general(p, off);
    EXPECT_NEAR(frobenius(s.tensor), 3.0, 1e-12);
    const Tensor3 expected = outer_vvv(3.0 * s.signals.x, s.signals.y, s.signals.z);
    EXPECT_NEAR(inner(s.tensor, expected), 9.0, 1e-12);
}

TEST(SampleGeneral, InjectedSignalsAreUsed) {
    GeneralParams p = dims(3, 2, 2);
    p.beta_M = 1.0;
    p.snr = BetaT{1.0};
    SamplingOptions o;
    o.matrix_noise = o.tensor_noise = 0.0;
    o.signals = PlantedSignals{Vec::Unit(3, 0), Vec::Unit(2, 1), Vec::Unit(2, 0)};
    const GeneralSample s = sample_general(p, o);
    EXPECT_EQ(s.tensor(0, 1, 0), 1.0);
    EXPECT_EQ(frobenius(s.tensor), 1.0);
    o.signals->x = Vec::Unit(4, 0);
    EXPECT_THROW(sample_general(p, o), std::invalid_argument);
}

TEST(SampleGeneral, PureNoiseEnergy) {
    // E |W / sqrt(n_T)|_F^2 = n1 n2 n3 / n_T.
    GeneralParams p = dims(20, 20, 20);
    double mean = 0.0;
    for (std::uint64_t s = 0; s < 20; ++s) {
        p.seed = s;
        const double f = frobenius(sample_general(p).tensor);
        mean += f * f / 20.0;
    }
    EXPECT_NEAR(mean, 8000.0 / 60.0, 0.05 * 8000.0 / 60.0);
}

TEST(SampleGeneral, MatrixNoiseVariance) {
    GeneralParams p = dims(40, 30, 2);
    p.beta_M = 0.0;
    double sum2 = 0.0;
    const int seeds = 20;
    for (int s = 0; s < seeds; ++s) {
        p.seed = static_cast<std::uint64_t>(s);
        sum2 += sample_general(p).matrix.squaredNorm();
    }
    const double count = seeds * 40.0 * 30.0;
    const double var = sum2 / count;
    const double target = 1.0 / 70.0;
    // Standard error of a variance estimate from `count` normals.
    EXPECT_NEAR(var, target, 5.0 * target * std::sqrt(2.0 / count));
}

TEST(SampleGeneral, RejectsInvalidParams) {
    GeneralParams p = dims(0, 2, 2);
    EXPECT_THROW(sample_general(p), std::invalid_argument);
    p = dims(2, 2, 2);
    p.beta_M = -1.0;
    EXPECT_THROW(sample_general(p), std::invalid_argument);
}

TEST(MultiView, RhoAtBenchmarkDims) {
    const MultiViewParams mv = MultiViewParams::with_norms(150, 300, 60, 2.0, 1.5, 0);
    const double expected = 2.25 * 510.0 / std::sqrt(2.7e6);
    EXPECT_NEAR(mv.rho(), expected, 1e-12);
    EXPECT_NEAR(mv.rho(), 0.6983, 1e-4);
    const GeneralParams g = mv.as_general();
    EXPECT_NEAR(g.beta_M, 2.0, 1e-12);
    EXPECT_NEAR(g.beta_T(), 1.5, 1e-12);
    EXPECT_NEAR(rho_from_beta(g), mv.rho(), 1e-14);
}

TEST(MultiView, LabelsBalancedAndUnitYbar) {
    const MultiViewParams mv = MultiViewParams::with_norms(10, 40, 6, 1.0, 1.0, 3);
    const MultiViewSample s = sample_multiview(mv);
    EXPECT_EQ((s.labels.array() > 0).count(), 20);
    EXPECT_EQ((s.labels.array() < 0).count(), 20);
    EXPECT_NEAR(s.ybar.norm(), 1.0, 1e-14);
    EXPECT_EQ(sample_multiview(mv).tensor, s.tensor);
}

TEST(MultiView, NoiseFreeSliceIsMuYbar) {
    MultiViewParams mv = MultiViewParams::with_norms(5, 8, 3, 2.0, 1.0, 4);
    mv.h = Vec::Unit(3, 0);
    SamplingOptions off;
    off.matrix_noise = off.tensor_noise = 0.0;
    const MultiViewSample s = sample_multiview(mv, off);
    const Mat expected = mv.mu * s.ybar.transpose();
    EXPECT_EQ(s.tensor.frontal_slice(0), expected);
    EXPECT_EQ(s.tensor.frontal_slice(1), Mat::Zero(5, 8));
    EXPECT_EQ(s.tensor.frontal_slice(2), Mat::Zero(5, 8));
}

TEST(MultiView, PureNoiseEntryVariance) {
    MultiViewParams mv = MultiViewParams::with_norms(30, 60, 12, 0.0, 0.0, 0);
    double sum2 = 0.0;
    for (std::uint64_t s = 0; s < 20; ++s) {
        mv.seed = s;
        const double f = frobenius(sample_multiview(mv).tensor);
        sum2 += f * f;
    }
    const double var = sum2 / (20.0 * 30 * 60 * 12);
    EXPECT_NEAR(var, 1.0 / 102.0, 0.05 / 102.0);
}

TEST(MultiView, Validation) {
    MultiViewParams mv = MultiViewParams::with_norms(5, 7, 3, 1.0, 1.0, 0);
    EXPECT_THROW(sample_multiview(mv), std::invalid_argument);
    mv.positives = 3;
    EXPECT_NO_THROW(sample_multiview(mv));
    mv.mu = Vec::Zero(4);
    EXPECT_THROW(sample_multiview(mv), std::invalid_argument);
}
