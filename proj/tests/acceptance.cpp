// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails. Reference values come from oracles.hpp
// or plain arithmetic, never from the library's closed forms.

#include "nested_spectra/estimators.hpp"
#include "nested_spectra/experiments.hpp"
#include "nested_spectra/rng.hpp"
#include "nested_spectra/spectra.hpp"
#include "nested_spectra/stats.hpp"
#include "nested_spectra/theory.hpp"
#include "oracles.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace nested;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::vector<std::string> notes;

    void check(bool ok, std::string what) {
        if (!ok) pass = false;
        notes.push_back((ok ? "" : "!! ") + std::move(what));
    }
};

int failures = 0;

void report(const std::string& id, const Outcome& o, double seconds) {
    std::string detail;
    for (const auto& n : o.notes) detail += (detail.empty() ? "" : "; ") + n;
    fmt::print("{} {} ({:.0f} s) {}\n", id, o.pass ? "PASS" : "FAIL", seconds, detail);
    std::fflush(stdout);
    if (!o.pass) ++failures;
}

template <class F>
void run(const std::string& id, F&& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        body(o);
    } catch (const std::exception& e) {
        o.check(false, fmt::format("exception: {}", e.what()));
    }
    report(id, o, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
}

fs::path workdir(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("nested_spectra_acceptance_" + name);
    fs::remove_all(d);
    return d;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

double max_ks(const std::vector<TrialRecord>& trials) {
    double m = 0.0;
    for (const auto& t : trials) m = std::max(m, t.ks);
    return m;
}

// Shape ratios of (600, 400, 200).
constexpr double kC1 = 0.5, kC2 = 1.0 / 3.0, kC3 = 1.0 / 6.0;

double residue_zeta(double rho, double beta) { return oracle::spike2_residue(rho, beta, kC1, kC2, kC3).zeta; }

// rho_T where the residue-form alignment crosses zero.
double oracle_rho_star(double beta) {
    return oracle::bisect([&](double r) { return residue_zeta(r, beta); }, 1e-3, 100.0);
}

void ac1(Outcome& o) {
    ExperimentConfig cfg = preset("fig1-left");
    cfg.output_dir = workdir("ac1");
    const SpectralRunResult r = run_esd2(cfg);
    const auto ref = oracle::spike2_residue(2.0, 1.5, kC1, kC2, kC3);
    const double ks = max_ks(r.trials);
    o.check(ks < 0.05, fmt::format("(a) max KS over {} trials {:.4f} < 0.05", r.trials.size(), ks));
    const double rel = std::abs(r.spike.mean - ref.xi) / ref.xi;
    o.check(rel < 0.05, fmt::format("(b) mean top {:.4f} vs {:.4f}, rel err {:.4f}", r.spike.mean, ref.xi, rel));
    const double gap = std::abs(r.alignment.mean - ref.zeta);
    o.check(gap <= 0.05, fmt::format("(c) mean alignment {:.4f} vs {:.4f}", r.alignment.mean, ref.zeta));
    fs::remove_all(cfg.output_dir);
}

void ac2(Outcome& o) {
    ExperimentConfig cfg = preset("fig1-right");
    cfg.output_dir = workdir("ac2");
    const SpectralRunResult r = run_esd3(cfg);
    const double loc = 4.0 + 1.0 / 4.0, zeta = 1.0 - 1.0 / 16.0;
    const double ks = max_ks(r.trials);
    o.check(ks < 0.05, fmt::format("max KS vs semicircle {:.4f} < 0.05", ks));
    const double rel = std::abs(r.spike.mean - loc) / loc;
    o.check(rel < 0.05, fmt::format("mean spike {:.4f} vs {:.4f}", r.spike.mean, loc));
    o.check(std::abs(r.alignment.mean - zeta) <= 0.05, fmt::format("mean alignment {:.4f} vs {:.4f}", r.alignment.mean, zeta));
    fs::remove_all(cfg.output_dir);
}

void ac3(Outcome& o) {
    ExperimentConfig cfg = preset("fig2");
    cfg.rho_grid = {1.0};
    cfg.beta_grid = {1.0};
    cfg.output_dir = workdir("ac3");
    for (double beta : {0.8, 1.0, 1.5}) {
        const double rs = oracle_rho_star(beta);
        cfg.validation.emplace_back(0.8 * rs, beta);
        cfg.validation.emplace_back(1.5 * rs, beta);
    }
    const AlignmentMapResult r = run_alignment_map(cfg);
    for (std::size_t i = 0; i < r.validation.size(); ++i) {
        const ValidationPoint& v = r.validation[i];
        const bool below = i % 2 == 0;
        const bool ok = below ? v.alignment.mean < 0.05 : v.alignment.mean > 0.1;
        o.check(ok, fmt::format("beta_M {} rho_T {:.4f}: {:.4f} {} ", v.beta_M, v.rho, v.alignment.mean,
                                below ? "< 0.05" : "> 0.1"));
    }
    fs::remove_all(cfg.output_dir);
}

void ac4(Outcome& o) {
    GeneralParams p;
    p.n1 = 600;
    p.n2 = 400;
    p.n3 = 200;
    // x = beta_T^2 beta_M^2 / (beta_T^2 + n_M/n_T) = 1 at beta_M = 1.5.
    const double nm_nt = 1000.0 / 1200.0;
    const double bt2 = nm_nt / 1.25;
    p.snr = BetaT{std::sqrt(bt2)};
    const double s2 = bt2 + nm_nt;
    const ShapeRatios c = p.ratios();
    const Law mp = mp_law(c);
    const int trials = 10;

    double worst = 0.0;
    p.beta_M = 0.0;
    for (int t = 0; t < trials; ++t) {
        p.seed = derive_seed(4001, static_cast<std::uint64_t>(t));
        const GeneralSample s = sample_general(p);
        const Estimate e = oracle_estimate(s.tensor, s.signals.z, s2);
        std::vector<double> ev(e.spectrum->eigenvalues.data(), e.spectrum->eigenvalues.data() + e.spectrum->size());
        worst = std::max(worst, ks_distance(ev, [&](double x) { return mp.cdf(x); }));
    }
    o.check(worst < 0.05, fmt::format("beta_M=0 max KS vs MP {:.4f} < 0.05", worst));

    p.beta_M = 1.5;
    double top = 0.0, align = 0.0;
    for (int t = 0; t < trials; ++t) {
        p.seed = derive_seed(4002, static_cast<std::uint64_t>(t));
        const GeneralSample s = sample_general(p);
        const Estimate e = oracle_estimate(s.tensor, s.signals.z, s2);
        top += e.spectrum->top_value() / trials;
        align += alignment(e.vector, s.signals.y) / trials;
    }
    const double loc = 1.6 * 1.4, zeta = 1.0 - 0.4 * 1.6 / 1.4;
    o.check(std::abs(top - loc) / loc < 0.05, fmt::format("spike {:.4f} vs {:.4f}", top, loc));
    o.check(std::abs(align - zeta) <= 0.05, fmt::format("alignment {:.4f} vs {:.5f}", align, zeta));
}

void ac5(Outcome& o) {
    ExperimentConfig cfg = preset("fig3");
    cfg.output_dir = workdir("ac5");
    const BenchmarkResult r = run_benchmark(cfg);
    const double tot = static_cast<double>(cfg.p + cfg.n + cfg.m);
    const double c1 = cfg.p / tot, c2 = cfg.n / tot, c3 = cfg.m / tot;
    const double ab = c1 * c2 / ((1 - c3) * (1 - c3));
    int theory_checked = 0;
    for (const BenchmarkPoint& pt : r.points) {
        const double rho = pt.h_norm * pt.h_norm * tot / std::sqrt(static_cast<double>(cfg.p) * cfg.n * cfg.m);
        const double mu = pt.mu_norm;
        const std::string at = fmt::format("(mu {:.1f}, h {:.1f})", mu, pt.h_norm);
        if (mu > 0.0 && mu * mu * mu * mu > ab) {
            const double zeta = oracle::spike2_residue(rho, mu, c1, c2, c3).zeta;
            if (zeta >= 0.2) {
                ++theory_checked;
                const double th = oracle::normal_cdf(std::sqrt(zeta / (1 - zeta)));
                const double gap = std::abs(pt.acc_U.mean - th);
                if (gap > 0.03 || std::abs(pt.acc_U_th - th) > 1e-9)
                    o.check(false, fmt::format("U {} sim {:.4f} vs th {:.4f}", at, pt.acc_U.mean, th));
            }
        }
        if (pt.acc_U.mean > pt.acc_T.mean + 0.02)
            o.check(false, fmt::format("order U<=T {} {:.4f} > {:.4f}", at, pt.acc_U.mean, pt.acc_T.mean));
        if (pt.acc_T.mean > pt.acc_O.mean + 0.02)
            o.check(false, fmt::format("order T<=O {} {:.4f} > {:.4f}", at, pt.acc_T.mean, pt.acc_O.mean));
        if (pt.h_norm == 1.5 && mu >= 3.0 && std::abs(pt.acc_T.mean - pt.acc_O.mean) >= 0.02)
            o.check(false, fmt::format("T~O {} |{:.4f} - {:.4f}|", at, pt.acc_T.mean, pt.acc_O.mean));
    }
    o.check(r.points.size() >= 20, fmt::format("{} grid points, {} with zeta >= 0.2", r.points.size(), theory_checked));
    fs::remove_all(cfg.output_dir);
}

void ac6(Outcome& o) {
    std::mt19937_64 gen(6);
    // Unfolding and Kronecker identities.
    double worst = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
        const Tensor3 t = oracle::random_tensor(2, 3, 4, gen);
        for (int mode = 1; mode <= 3; ++mode) worst = std::max(worst, (unfold(t, mode) - oracle::unfold(t, mode)).cwiseAbs().maxCoeff());
        const Mat a = oracle::random_mat(2, 2, gen), b = oracle::random_mat(2, 2, gen);
        const Mat cc = oracle::random_mat(2, 2, gen), d = oracle::random_mat(2, 2, gen);
        worst = std::max(worst, (kronecker(a, b) * kronecker(cc, d) - kronecker(a * cc, b * d)).cwiseAbs().maxCoeff());
        const Vec u = oracle::random_vec(2, gen), v = oracle::random_vec(3, gen), w = oracle::random_vec(4, gen);
        worst = std::max(worst, (unfold(outer_vvv(u, v, w), 2) - v * oracle::kron(u, w).transpose()).cwiseAbs().maxCoeff());
    }
    o.check(worst <= 1e-12, fmt::format("identities max err {:.1e}", worst));

    // Cubic residual.
    std::uniform_real_distribution<double> re(-10.0, 10.0), im(1e-3, 5.0), rho(0.0, 5.0), share(0.05, 1.0);
    double resid = 0.0;
    for (int rep = 0; rep < 1000; ++rep) {
        const double x = share(gen), y = share(gen), z = share(gen);
        const ShapeRatios c = ShapeRatios::make(x / (x + y + z), y / (x + y + z), 1.0 - (x + y) / (x + y + z));
        const Complex s(re(gen), im(gen));
        const double r = rho(gen);
        const Complex m = stieltjes_mode2(s, r, c);
        resid = std::max(resid, std::abs(Mode2Cubic::at(s, r, c)(m)) / (1.0 + std::pow(std::abs(s), 3)));
    }
    o.check(resid < 1e-12, fmt::format("cubic residual {:.1e}", resid));

    // Fixed point at the spike.
    const ShapeRatios c = ShapeRatios::make(kC1, kC2, kC3);
    const auto ref = oracle::spike2_residue(2.0, 1.5, kC1, kC2, kC3);
    const double fp = std::abs(stieltjes_mode2(Complex(ref.xi, 0.0), 2.0, c).real() + 1.0 / (2.0 * (0.4 + 2.25)));
    o.check(fp < 1e-8, fmt::format("fixed point err {:.1e}", fp));

    // Mass of the three laws.
    const double m2 = lsd_density_mode2({}, 2.0, c).mass(), msc = semicircle_law().mass(), mmp = mp_law(c).mass();
    o.check(std::abs(m2 - 1) <= 1e-3 && std::abs(msc - 1) <= 1e-3 && std::abs(mmp - 1) <= 1e-3,
            fmt::format("masses {:.5f} {:.5f} {:.5f}", m2, msc, mmp));

    // HOPM monotone.
    int bad = 0;
    for (int rep = 0; rep < 100; ++rep) {
        const Rank1Estimate r = tensor_rank1_estimate(oracle::random_tensor(5, 6, 7, gen), RandomInit{static_cast<std::uint64_t>(rep)});
        for (std::size_t k = 1; k < r.history.size(); ++k)
            if (r.history[k] < r.history[k - 1] - 1e-12) ++bad;
    }
    o.check(bad == 0, fmt::format("HOPM decreases {}", bad));

    // Byte-identical rerun.
    ExperimentConfig cfg = preset("fig1-left");
    cfg.n1 = 60;
    cfg.n2 = 40;
    cfg.n3 = 20;
    cfg.trials = 3;
    cfg.output_dir = workdir("ac6a");
    const auto a = run_esd2(cfg).files;
    cfg.output_dir = workdir("ac6b");
    const auto b = run_esd2(cfg).files;
    bool same = a.size() == b.size() && !a.empty();
    for (std::size_t i = 0; same && i < a.size(); ++i) same = slurp(a[i]) == slurp(b[i]);
    o.check(same, fmt::format("{} CSVs identical on rerun", a.size()));
    fs::remove_all(workdir("ac6a"));
    fs::remove_all(workdir("ac6b"));
}

void ac7(Outcome& o) {
    std::vector<double> pooled;
    for (std::uint64_t s = 0; s < 5; ++s) {
        const MultiViewParams mv = MultiViewParams::with_norms(150, 300, 60, 2.0, 1.5, derive_seed(7001, s));
        const MultiViewSample x = sample_multiview(mv);
        const Estimate e = unfolding_estimate(x.tensor, Mode::Two);
        const ClusterResult r = cluster_accuracy(e.vector, x.labels);
        pooled.insert(pooled.end(), r.residuals.data(), r.residuals.data() + r.residuals.size());
    }
    std::sort(pooled.begin(), pooled.end());
    const double d = ks_distance(pooled, [](double x) { return oracle::normal_cdf(x); });
    const double p = ks_pvalue(d, pooled.size());
    o.check(p > 0.01, fmt::format("KS {:.4f} over {} residuals, p = {:.3f} > 0.01", d, pooled.size(), p));
}

}  // namespace

int main() {
    run("AC1", ac1);
    run("AC2", ac2);
    run("AC3", ac3);
    run("AC4", ac4);
    run("AC5", ac5);
    run("AC6", ac6);
    run("AC7", ac7);
    fmt::print("{} of 7 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
