#include "nested_spectra/model.hpp"

#include "nested_spectra/errors.hpp"
#include "nested_spectra/rng.hpp"

#include <cmath>
#include <stdexcept>
#include <type_traits>

namespace nested {

namespace {

// Stream tags so that different noise blocks never share a generator.
constexpr std::uint64_t kTensorNoiseStream = 0x5445'4e53'4f52ULL;  // "TENSOR"
constexpr std::uint64_t kLabelStream = 0x4c41'4245'4c53ULL;        // "LABELS"

Vec random_unit(Rng& rng, Index n) {
    Vec v(n);
    rng.fill_normal({v.data(), static_cast<std::size_t>(n)});
    const double norm = v.norm();
    if (norm == 0.0) throw NumericError("random_unit: zero Gaussian draw");
    return v / norm;
}

}  // namespace

ShapeRatios ShapeRatios::make(double c1, double c2, double c3) {
    if (!(c1 > 0.0 && c2 > 0.0 && c3 > 0.0)) throw std::invalid_argument("shape ratios must be positive");
    if (std::abs(c1 + c2 + c3 - 1.0) > 1e-12) throw std::invalid_argument("shape ratios must sum to 1");
    return {c1, c2, c3};
}

ShapeRatios ShapeRatios::from_dims(long n1, long n2, long n3) {
    if (n1 <= 0 || n2 <= 0 || n3 <= 0) throw std::invalid_argument("dimensions must be positive");
    const double total = static_cast<double>(n1 + n2 + n3);
    return {n1 / total, n2 / total, n3 / total};
}

double GeneralParams::sqrt_volume() const noexcept {
    return std::sqrt(static_cast<double>(n1)) * std::sqrt(static_cast<double>(n2)) *
           std::sqrt(static_cast<double>(n3));
}

ShapeRatios GeneralParams::ratios() const { return ShapeRatios::from_dims(n1, n2, n3); }

double GeneralParams::beta_T() const {
    const double v = sqrt_volume();
    const double nT = n_T();
    return std::visit(
        [&](const auto& s) -> double {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, BetaT>) {
                return s.value;
            } else if constexpr (std::is_same_v<S, RhoT>) {
                return std::sqrt(s.value * v / nT);
            } else {
                const double mass = static_cast<double>(n1) * static_cast<double>(n2) / n_M() + beta_M * beta_M;
                return std::sqrt(s.value * v / (nT * mass));
            }
        },
        snr);
}

void GeneralParams::validate() const {
    if (n1 <= 0 || n2 <= 0 || n3 <= 0) throw std::invalid_argument("n1, n2, n3 must be positive");
    if (!(beta_M >= 0.0) || !std::isfinite(beta_M)) throw std::invalid_argument("beta_M must be finite and >= 0");
    const double s = std::visit([](const auto& x) { return x.value; }, snr);
    if (!(s >= 0.0) || !std::isfinite(s)) throw std::invalid_argument("tensor SNR must be finite and >= 0");
}

double rho_from_beta(const GeneralParams& p) {
    const double b = p.beta_T();
    return b * b * p.n_T() / p.sqrt_volume();
}

double beta_from_rho(const GeneralParams& p) {
    GeneralParams q = p;
    q.snr = RhoT{rho_from_beta(p)};
    return q.beta_T();
}

double varrho(const GeneralParams& p) {
    const double mass = static_cast<double>(p.n1) * static_cast<double>(p.n2) / p.n_M() + p.beta_M * p.beta_M;
    return rho_from_beta(p) * mass;
}

double beta_from_varrho(const GeneralParams& p, double varrho_value) {
    GeneralParams q = p;
    q.snr = VarRho{varrho_value};
    return q.beta_T();
}

double varsigma2(const GeneralParams& p) {
    const double b = p.beta_T();
    return b * b + p.n_M() / p.n_T();
}

GeneralSample sample_general(const GeneralParams& p, const SamplingOptions& options) {
    p.validate();
    const Index n1 = p.n1, n2 = p.n2, n3 = p.n3;
    Rng rng(p.seed);

    PlantedSignals signals;
    if (options.signals) {
        signals = *options.signals;
        if (signals.x.size() != n1 || signals.y.size() != n2 || signals.z.size() != n3) {
            throw std::invalid_argument("sample_general: injected signal lengths do not match dims");
        }
    } else {
        signals.x = random_unit(rng, n1);
        signals.y = random_unit(rng, n2);
        signals.z = random_unit(rng, n3);
    }

    // Z is drawn in row-major order so the stream does not depend on Eigen's layout.
    Mat matrix = p.beta_M * signals.x * signals.y.transpose();
    const double z_scale = options.matrix_noise / std::sqrt(p.n_M());
    for (Index i = 0; i < n1; ++i)
        for (Index j = 0; j < n2; ++j) matrix(i, j) += z_scale * rng.normal();

    const double beta_T = p.beta_T();
    const double w_scale = options.tensor_noise / std::sqrt(p.n_T());
    Tensor3 tensor(n1, n2, n3);
    auto data = tensor.data();
    const std::uint64_t noise_master = derive_seed(p.seed, kTensorNoiseStream);
    for (Index i = 0; i < n1; ++i) {
        // One generator per slab: the draw for slab i is independent of how
        // the other slabs are produced.
        Rng slab_rng(derive_seed(noise_master, static_cast<std::uint64_t>(i)));
        double* slab = data.data() + i * n2 * n3;
        for (Index j = 0; j < n2; ++j) {
            const double mij = beta_T * matrix(i, j);
            double* fibre = slab + j * n3;
            for (Index k = 0; k < n3; ++k) fibre[k] = mij * signals.z(k) + w_scale * slab_rng.normal();
        }
    }
    return {std::move(tensor), std::move(matrix), std::move(signals)};
}

MultiViewParams MultiViewParams::with_norms(Index p, Index n, Index m, double mu_norm, double h_norm,
                                            std::uint64_t seed) {
    MultiViewParams params;
    params.p = p;
    params.n = n;
    params.m = m;
    params.mu = Vec::Constant(p, mu_norm / std::sqrt(static_cast<double>(p)));
    params.h = Vec::Constant(m, h_norm / std::sqrt(static_cast<double>(m)));
    params.seed = seed;
    return params;
}

ShapeRatios MultiViewParams::ratios() const { return ShapeRatios::from_dims(p, n, m); }

double MultiViewParams::rho() const { return rho_from_beta(as_general()); }

GeneralParams MultiViewParams::as_general() const {
    GeneralParams g;
    g.n1 = p;
    g.n2 = n;
    g.n3 = m;
    g.beta_M = mu.norm();
    g.snr = BetaT{h.norm()};
    g.seed = seed;
    return g;
}

void MultiViewParams::validate() const {
    if (p <= 0 || n <= 0 || m <= 0) throw std::invalid_argument("p, n, m must be positive");
    if (mu.size() != p) throw std::invalid_argument("mu must have length p");
    if (h.size() != m) throw std::invalid_argument("h must have length m");
    if (positives) {
        if (*positives < 0 || *positives > n) throw std::invalid_argument("class split out of range");
    } else if (n % 2 != 0) {
        throw std::invalid_argument("n must be even for balanced classes");
    }
}

MultiViewSample sample_multiview(const MultiViewParams& mv, const SamplingOptions& options) {
    mv.validate();
    const Index p = mv.p, n = mv.n, m = mv.m;
    const Index positives = mv.positives.value_or(n / 2);

    // Balanced labels in a seeded random order (Fisher-Yates).
    Vec labels(n);
    for (Index j = 0; j < n; ++j) labels(j) = j < positives ? 1.0 : -1.0;
    Rng label_rng(derive_seed(mv.seed, kLabelStream));
    for (Index j = n - 1; j > 0; --j) {
        const auto r = static_cast<Index>(label_rng.below(static_cast<std::uint64_t>(j + 1)));
        std::swap(labels(j), labels(r));
    }
    const Vec ybar = labels / std::sqrt(static_cast<double>(n));

    Rng rng(mv.seed);
    Mat matrix = mv.mu * ybar.transpose();
    const double z_scale = options.matrix_noise / std::sqrt(static_cast<double>(p + n));
    for (Index i = 0; i < p; ++i)
        for (Index j = 0; j < n; ++j) matrix(i, j) += z_scale * rng.normal();

    const double w_scale = options.tensor_noise / std::sqrt(static_cast<double>(p + n + m));
    Tensor3 tensor(p, n, m);
    auto data = tensor.data();
    const std::uint64_t noise_master = derive_seed(mv.seed, kTensorNoiseStream);
    for (Index i = 0; i < p; ++i) {
        Rng slab_rng(derive_seed(noise_master, static_cast<std::uint64_t>(i)));
        double* slab = data.data() + i * n * m;
        for (Index j = 0; j < n; ++j) {
            const double mij = matrix(i, j);
            double* fibre = slab + j * m;
            for (Index k = 0; k < m; ++k) fibre[k] = mij * mv.h(k) + w_scale * slab_rng.normal();
        }
    }
    return {std::move(tensor), std::move(labels), ybar};
}

}  // namespace nested
