#include "nested_spectra/estimators.hpp"

#include "nested_spectra/errors.hpp"
#include "nested_spectra/rng.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace nested {

namespace {

constexpr std::uint64_t kRestartStream = 0x5245'5354'4152'54ULL;  // "RESTART"

Vec random_unit(std::uint64_t seed, Index n) {
    Rng rng(seed);
    Vec v(n);
    rng.fill_normal({v.data(), static_cast<std::size_t>(n)});
    return v.normalized();
}

void flip_to_positive_peak(Vec& v, Vec& partner) {
    Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0.0) {
        v = -v;
        partner = -partner;
    }
}

struct Triple {
    Vec u, v, w;
};

// Returns false when a contraction vanishes.
bool hopm(const Tensor3& t, Triple& x, int max_iters, double tol, std::vector<double>& history, int& sweeps) {
    double previous = inner_rank1(t, x.u, x.v, x.w);
    for (sweeps = 1; sweeps <= max_iters; ++sweeps) {
        Vec u = contract_mode1(t, x.v, x.w);
        if (u.norm() == 0.0) return false;
        x.u = u.normalized();
        Vec v = contract_mode2(t, x.u, x.w);
        if (v.norm() == 0.0) return false;
        x.v = v.normalized();
        Vec w = contract_mode3(t, x.u, x.v);
        const double objective = w.norm();
        if (objective == 0.0) return false;
        x.w = w / objective;
        history.push_back(objective);
        if (objective - previous < tol) break;
        previous = objective;
    }
    sweeps = std::min(sweeps, max_iters);
    return true;
}

}  // namespace

const char* to_string(Method m) noexcept {
    switch (m) {
        case Method::Unfold1: return "unfold1";
        case Method::Unfold2: return "unfold2";
        case Method::Unfold3: return "unfold3";
        case Method::Oracle: return "oracle";
        case Method::Tensor: return "tensor";
    }
    return "unknown";
}

Estimate unfolding_estimate(const Tensor3& t, Mode mode, int threads) {
    SpectrumResult sr = sym_eigen(gram_unfolding(t, mode, threads));
    Estimate e;
    e.vector = sr.top_vector();
    e.method = mode == Mode::One ? Method::Unfold1 : mode == Mode::Two ? Method::Unfold2 : Method::Unfold3;
    e.iterations_used = sr.sweeps;
    e.spectrum = std::move(sr);
    return e;
}

Estimate oracle_estimate(const Tensor3& t, const Vec& z, std::optional<double> varsigma2) {
    if (z.size() != t.n3()) throw std::invalid_argument("oracle_estimate: z must have length n3");
    if (std::abs(z.norm() - 1.0) > 1e-10) {
        throw std::invalid_argument("oracle_estimate: z must be unit norm, got |z| = " + std::to_string(z.norm()));
    }
    if (varsigma2 && !(*varsigma2 > 0.0)) throw std::invalid_argument("oracle_estimate: varsigma2 must be positive");
    const Mat tbar = weighted_slice_sum(t, z);
    Mat g = gram(tbar.transpose());
    if (varsigma2) g /= *varsigma2;
    SpectrumResult sr = sym_eigen(g);
    sr.centering = varsigma2 ? Centering::Oracle : Centering::None;
    Estimate e;
    e.vector = sr.top_vector();
    e.method = Method::Oracle;
    e.iterations_used = sr.sweeps;
    e.spectrum = std::move(sr);
    return e;
}

Rank1Estimate tensor_rank1_estimate(const Tensor3& t, const Rank1Init& init, int max_iters, double tol) {
    if (max_iters < 1) throw std::invalid_argument("tensor_rank1_estimate: max_iters must be >= 1");
    if (!(tol > 0.0)) throw std::invalid_argument("tensor_rank1_estimate: tol must be positive");

    Triple x;
    if (std::holds_alternative<UnfoldingInit>(init)) {
        x.u = unfolding_estimate(t, Mode::One).vector;
        x.v = unfolding_estimate(t, Mode::Two).vector;
        x.w = unfolding_estimate(t, Mode::Three).vector;
    } else if (const auto* r = std::get_if<RandomInit>(&init)) {
        x.u = random_unit(derive_seed(r->seed, 1), t.n1());
        x.v = random_unit(derive_seed(r->seed, 2), t.n2());
        x.w = random_unit(derive_seed(r->seed, 3), t.n3());
    } else {
        const auto& p = std::get<ProvidedInit>(init);
        if (p.u.size() != t.n1() || p.v.size() != t.n2() || p.w.size() != t.n3()) {
            throw std::invalid_argument("tensor_rank1_estimate: provided vectors do not match tensor dims");
        }
        if (p.u.norm() == 0.0 || p.v.norm() == 0.0 || p.w.norm() == 0.0) {
            throw std::invalid_argument("tensor_rank1_estimate: provided vectors must be nonzero");
        }
        x = {p.u.normalized(), p.v.normalized(), p.w.normalized()};
    }

    Rank1Estimate out;
    int sweeps = 0;
    if (!hopm(t, x, max_iters, tol, out.history, sweeps)) {
        const std::uint64_t seed = derive_seed(kRestartStream, static_cast<std::uint64_t>(t.size()));
        x = {random_unit(derive_seed(seed, 1), t.n1()), random_unit(derive_seed(seed, 2), t.n2()),
             random_unit(derive_seed(seed, 3), t.n3())};
        out.history.clear();
        if (!hopm(t, x, max_iters, tol, out.history, sweeps)) {
            throw NumericError("tensor_rank1_estimate: contraction vanished after restart");
        }
    }

    flip_to_positive_peak(x.u, x.w);
    flip_to_positive_peak(x.v, x.w);
    const double objective = inner_rank1(t, x.u, x.v, x.w);
    for (auto* e : {&out.u, &out.v, &out.w}) {
        e->method = Method::Tensor;
        e->iterations_used = sweeps;
        e->objective = objective;
    }
    out.u.vector = std::move(x.u);
    out.v.vector = std::move(x.v);
    out.w.vector = std::move(x.w);
    return out;
}

double alignment(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw std::invalid_argument("alignment: length mismatch");
    const double d = a.dot(b);
    return d * d;
}

ClusterResult cluster_accuracy(const Vec& yhat, const Vec& labels, double zeta) {
    if (yhat.size() != labels.size() || yhat.size() == 0) {
        throw std::invalid_argument("cluster_accuracy: yhat and labels must have the same nonzero length");
    }
    for (Index j = 0; j < labels.size(); ++j) {
        if (labels(j) != 1.0 && labels(j) != -1.0) throw std::invalid_argument("cluster_accuracy: labels must be +-1");
    }
    if (!(zeta >= 0.0 && zeta < 1.0)) throw std::invalid_argument("cluster_accuracy: zeta must lie in [0, 1)");
    const double norm = yhat.norm();
    if (norm == 0.0) throw std::invalid_argument("cluster_accuracy: yhat is zero");

    const Index n = yhat.size();
    const double rn = std::sqrt(static_cast<double>(n));
    ClusterResult r;
    r.predicted_labels.resize(n);
    Index matches = 0;
    for (Index j = 0; j < n; ++j) {
        double s = 1.0;
        if (yhat(j) < 0.0) s = -1.0;
        if (yhat(j) == 0.0) ++r.ties;
        r.predicted_labels(j) = s;
        if (s == labels(j)) ++matches;
    }
    const double agree = static_cast<double>(matches) / static_cast<double>(n);
    if (agree < 0.5) r.predicted_labels = -r.predicted_labels;
    r.accuracy = std::max(agree, 1.0 - agree);

    const Vec unit = yhat / norm;
    const double overlap = unit.dot(labels) / rn;
    r.alignment = overlap * overlap;
    const Vec oriented = overlap < 0.0 ? Vec(-unit) : unit;
    r.residuals = std::sqrt(static_cast<double>(n) / (1.0 - zeta)) * (oriented - std::sqrt(zeta) / rn * labels);
    return r;
}

ClusterResult cluster_accuracy(const Vec& yhat, const Vec& labels) {
    const double norm = yhat.norm();
    if (yhat.size() != labels.size() || norm == 0.0) return cluster_accuracy(yhat, labels, 0.0);
    const double overlap = yhat.dot(labels) / (norm * std::sqrt(static_cast<double>(labels.size())));
    return cluster_accuracy(yhat, labels, std::min(overlap * overlap, std::nextafter(1.0, 0.0)));
}

}  // namespace nested
