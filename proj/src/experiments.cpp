#include "nested_spectra/experiments.hpp"

#include "nested_spectra/errors.hpp"
#include "nested_spectra/estimators.hpp"
#include "nested_spectra/rng.hpp"
#include "nested_spectra/spectra.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <limits>
#include <thread>
#include <unistd.h>

namespace nested {

namespace fs = std::filesystem;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string value(double v) { return fmt::format("{:.17g}", v); }
std::string summary(double v) { return fmt::format("{:.6f}", v); }

// One CSV file: a provenance comment, a header row, then rows. Written in
// one go so that a failed run never leaves a half-written file behind.
class CsvFile {
public:
    CsvFile(const ExperimentConfig& cfg, std::string name, std::vector<std::string> header)
        : path_(cfg.output_dir / name), columns_(header.size()) {
        text_ = fmt::format("# nested-spectra {} experiment={} config_hash={:016x} master_seed={}\n", kVersion,
                            to_string(cfg.experiment), cfg.hash(), cfg.master_seed);
        add(header);
    }

    void add(const std::vector<std::string>& cells) {
        if (cells.size() != columns_) throw std::logic_error("CsvFile: row width does not match header");
        for (std::size_t i = 0; i < cells.size(); ++i) {
            text_ += cells[i];
            text_ += i + 1 == cells.size() ? '\n' : ',';
        }
    }

    fs::path write() const {
        std::error_code ec;
        fs::create_directories(path_.parent_path(), ec);
        if (ec) throw IoError(fmt::format("cannot create directory '{}': {}", path_.parent_path().string(), ec.message()));
        std::ofstream out(path_, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path_.string()));
        out << text_;
        out.close();
        if (!out) throw IoError(fmt::format("write to '{}' failed", path_.string()));
        return path_;
    }

private:
    fs::path path_;
    std::size_t columns_;
    std::string text_;
};

double physical_memory_bytes() {
    const long pages = sysconf(_SC_PHYS_PAGES);
    const long size = sysconf(_SC_PAGE_SIZE);
    if (pages <= 0 || size <= 0) return 4.0 * (1ULL << 30);
    return static_cast<double>(pages) * static_cast<double>(size);
}

// Runs task(i) for i in [0, count) on a pool of workers. Results are stored
// by index, so their order never depends on scheduling. The first exception
// (lowest index) is rethrown after all workers stop.
template <class R, class F>
std::vector<R> run_pool(int count, int workers, F&& task) {
    std::vector<R> results(static_cast<std::size_t>(count));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
            try {
                results[static_cast<std::size_t>(i)] = task(i);
            } catch (...) {
                errors[static_cast<std::size_t>(i)] = std::current_exception();
            }
        }
    };
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return results;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void report(const ProgressFn& progress, const std::string& message) {
    if (progress) progress(message);
}

std::vector<double> linspace(double lo, double hi, int count) {
    std::vector<double> out(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (count - 1);
    return out;
}

void write_histogram(const ExperimentConfig& cfg, const std::string& name, const std::vector<double>& pooled,
                     std::vector<fs::path>& files) {
    const EsdSummary hist(Eigen::Map<const Vec>(pooled.data(), static_cast<Index>(pooled.size())), cfg.bins);
    CsvFile csv(cfg, name, {"bin_lower", "bin_upper", "mass", "density"});
    const auto dens = hist.densities();
    for (std::size_t b = 0; b < hist.masses().size(); ++b) {
        csv.add({value(hist.edges()[b]), value(hist.edges()[b + 1]), value(hist.masses()[b]), value(dens[b])});
    }
    files.push_back(csv.write());
}

void write_law(const ExperimentConfig& cfg, const std::string& name, const Law& law, double hi,
               std::vector<fs::path>& files) {
    CsvFile csv(cfg, name, {"x", "density"});
    for (double x : linspace(law.lower_edge() - 0.5, std::max(hi, law.upper_edge()) + 0.5, 512)) {
        csv.add({value(x), value(law.density(x))});
    }
    files.push_back(csv.write());
}

void write_spikes(const ExperimentConfig& cfg, const std::string& name, const SpectralRunResult& r,
                  std::vector<fs::path>& files) {
    CsvFile csv(cfg, name,
                {"trial", "seed", "top_eigenvalue", "predicted_location", "alignment", "predicted_alignment",
                 "detectable", "bulk_right_edge", "ks_bulk"});
    const double location = r.prediction.detectable ? r.prediction.location : kNaN;
    for (const auto& t : r.trials) {
        csv.add({std::to_string(t.trial), std::to_string(t.seed), value(t.spike), value(location), value(t.alignment),
                 value(r.prediction.alignment), r.prediction.detectable ? "1" : "0", value(r.bulk.upper), value(t.ks)});
    }
    files.push_back(csv.write());
}

void write_summary(const ExperimentConfig& cfg, const std::string& name, const SpectralRunResult& r,
                   std::vector<fs::path>& files) {
    CsvFile csv(cfg, name,
                {"trials", "top_eigenvalue_mean", "top_eigenvalue_std", "predicted_location", "alignment_mean",
                 "alignment_std", "predicted_alignment", "ks_bulk_mean", "ks_bulk_max"});
    double ks_max = 0.0;
    for (const auto& t : r.trials) ks_max = std::max(ks_max, t.ks);
    csv.add({std::to_string(r.trials.size()), summary(r.spike.mean), summary(r.spike.std),
             summary(r.prediction.detectable ? r.prediction.location : kNaN), summary(r.alignment.mean),
             summary(r.alignment.std), summary(r.prediction.alignment), summary(r.ks.mean), summary(ks_max)});
    files.push_back(csv.write());
}

void finish_summary(SpectralRunResult& r) {
    std::vector<double> spikes, aligns, ks;
    for (const auto& t : r.trials) {
        spikes.push_back(t.spike);
        aligns.push_back(t.alignment);
        ks.push_back(t.ks);
    }
    r.spike = mean_std(spikes);
    r.alignment = mean_std(aligns);
    r.ks = mean_std(ks);
}

void write_plot_script(const ExperimentConfig& cfg, const std::string& body, std::vector<fs::path>& files) {
    const fs::path path = cfg.output_dir / fmt::format("plot_{}.py", to_string(cfg.experiment));
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
    out << "#!/usr/bin/env python3\n"
           "# Renders the CSV outputs in this directory. Requires pandas and matplotlib.\n"
           "import os\n"
           "import matplotlib\n"
           "matplotlib.use('Agg')\n"
           "import matplotlib.pyplot as plt\n"
           "import pandas as pd\n\n"
           "here = os.path.dirname(os.path.abspath(__file__))\n"
           "def load(name):\n"
           "    return pd.read_csv(os.path.join(here, name), comment='#')\n\n"
        << body;
    if (!out) throw IoError(fmt::format("write to '{}' failed", path.string()));
    files.push_back(path);
}

std::string spectral_plot_body(const std::string& stem) {
    return fmt::format(
        "hist = load('{0}_histogram.csv')\n"
        "law = load('{0}_theory.csv')\n"
        "spikes = load('{0}_spikes.csv')\n"
        "fig, ax = plt.subplots(figsize=(6, 4))\n"
        "ax.bar(hist.bin_lower, hist.density, width=hist.bin_upper - hist.bin_lower, align='edge', alpha=0.5, label='ESD')\n"
        "ax.plot(law.x, law.density, 'r', label='LSD')\n"
        "if spikes.detectable.iloc[0]:\n"
        "    ax.axvline(spikes.predicted_location.iloc[0], color='k', ls='--', label='predicted spike')\n"
        "ax.legend()\n"
        "fig.savefig(os.path.join(here, '{0}.png'), dpi=150, bbox_inches='tight')\n",
        stem);
}

double spectral_trial_bytes(const ExperimentConfig& cfg) {
    const double entries = static_cast<double>(cfg.n1) * static_cast<double>(cfg.n2) * static_cast<double>(cfg.n3);
    const double side = static_cast<double>(std::max({cfg.n1, cfg.n2, cfg.n3}));
    return 8.0 * (entries + static_cast<double>(cfg.n1) * static_cast<double>(cfg.n2) + 6.0 * side * side) + (64 << 20);
}

}  // namespace

int worker_count(const ExperimentConfig& cfg, int tasks, double bytes_per_trial) {
    int workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    if (const char* env = std::getenv("NESTED_SPECTRA_THREADS")) {
        const int cap = std::atoi(env);
        if (cap >= 1) workers = std::min(workers, cap);
    }
    if (cfg.threads > 0) workers = std::min(workers, cfg.threads);
    // Leave half of physical memory to the rest of the system.
    const double budget = 0.5 * physical_memory_bytes();
    const int by_memory = static_cast<int>(std::max(1.0, std::floor(budget / std::max(bytes_per_trial, 1.0))));
    return std::max(1, std::min({workers, by_memory, tasks}));
}

SpectralRunResult run_esd2(const ExperimentConfig& cfg, const ProgressFn& progress) {
    cfg.validate();
    const GeneralParams base = cfg.general(cfg.master_seed);
    const double rho = rho_from_beta(base);
    const ShapeRatios c = base.ratios();

    SpectralRunResult r;
    if (rho > 0.0 && base.beta_M > 0.0) r.prediction = spike2(rho, base.beta_M, c);
    const Law law = lsd_density_mode2({}, rho, c, cfg.eta);
    r.bulk = {law.lower_edge(), law.upper_edge()};

    struct Out {
        TrialRecord record;
        std::vector<double> eigenvalues;
    };
    const int workers = worker_count(cfg, cfg.trials, spectral_trial_bytes(cfg));
    auto outs = run_pool<Out>(cfg.trials, workers, [&](int t) {
        const auto start = std::chrono::steady_clock::now();
        GeneralParams p = base;
        p.seed = derive_seed(cfg.master_seed, static_cast<std::uint64_t>(t));
        const GeneralSample s = sample_general(p);
        SpectrumResult sr = sym_eigen(center_scale_mode2(gram_unfolding(s.tensor, Mode::Two), p));
        sr.centering = Centering::Mode2;
        Out o;
        o.record.trial = t;
        o.record.seed = p.seed;
        o.record.spike = sr.top_value();
        o.record.alignment = alignment(sr.top_vector(), s.signals.y);
        const std::span<const double> bulk(sr.eigenvalues.data(), static_cast<std::size_t>(sr.size() - 1));
        o.record.ks = ks_distance(bulk, [&](double x) { return law.cdf(x); });
        o.eigenvalues.assign(sr.eigenvalues.data(), sr.eigenvalues.data() + sr.size());
        o.record.wall_seconds = seconds_since(start);
        report(progress, fmt::format("esd2 trial {}/{}: top {:.4f} alignment {:.4f} ({:.1f} s)", t + 1, cfg.trials,
                                     o.record.spike, o.record.alignment, o.record.wall_seconds));
        return o;
    });

    std::vector<double> pooled;
    for (auto& o : outs) {
        r.trials.push_back(o.record);
        pooled.insert(pooled.end(), o.eigenvalues.begin(), o.eigenvalues.end());
    }
    finish_summary(r);

    write_histogram(cfg, "esd2_histogram.csv", pooled, r.files);
    write_law(cfg, "esd2_theory.csv", law, r.prediction.detectable ? r.prediction.location : law.upper_edge(), r.files);
    write_spikes(cfg, "esd2_spikes.csv", r, r.files);
    write_summary(cfg, "esd2_summary.csv", r, r.files);
    if (cfg.emit_plots) write_plot_script(cfg, spectral_plot_body("esd2"), r.files);
    return r;
}

SpectralRunResult run_esd3(const ExperimentConfig& cfg, const ProgressFn& progress) {
    cfg.validate();
    const GeneralParams base = cfg.general(cfg.master_seed);
    const double vr = varrho(base);

    SpectralRunResult r;
    if (vr > 0.0) r.prediction = spike3(vr);
    const Law law = semicircle_law();
    r.bulk = {law.lower_edge(), law.upper_edge()};

    struct Out {
        TrialRecord record;
        std::vector<double> eigenvalues;
    };
    const int workers = worker_count(cfg, cfg.trials, spectral_trial_bytes(cfg));
    auto outs = run_pool<Out>(cfg.trials, workers, [&](int t) {
        const auto start = std::chrono::steady_clock::now();
        GeneralParams p = base;
        p.seed = derive_seed(cfg.master_seed, static_cast<std::uint64_t>(t));
        const GeneralSample s = sample_general(p);
        SpectrumResult sr = sym_eigen(center_scale_mode3(gram_unfolding(s.tensor, Mode::Three), p));
        sr.centering = Centering::Mode3;
        Out o;
        o.record.trial = t;
        o.record.seed = p.seed;
        o.record.spike = sr.top_value();
        o.record.alignment = alignment(sr.top_vector(), s.signals.z);
        const std::span<const double> bulk(sr.eigenvalues.data(), static_cast<std::size_t>(sr.size() - 1));
        o.record.ks = ks_distance(bulk, [&](double x) { return law.cdf(x); });
        o.eigenvalues.assign(sr.eigenvalues.data(), sr.eigenvalues.data() + sr.size());
        o.record.wall_seconds = seconds_since(start);
        report(progress, fmt::format("esd3 trial {}/{}: top {:.4f} alignment {:.4f} ({:.1f} s)", t + 1, cfg.trials,
                                     o.record.spike, o.record.alignment, o.record.wall_seconds));
        return o;
    });

    std::vector<double> pooled;
    for (auto& o : outs) {
        r.trials.push_back(o.record);
        pooled.insert(pooled.end(), o.eigenvalues.begin(), o.eigenvalues.end());
    }
    finish_summary(r);

    write_histogram(cfg, "esd3_histogram.csv", pooled, r.files);
    write_law(cfg, "esd3_theory.csv", law, r.prediction.detectable ? r.prediction.location : law.upper_edge(), r.files);
    write_spikes(cfg, "esd3_spikes.csv", r, r.files);
    write_summary(cfg, "esd3_summary.csv", r, r.files);
    if (cfg.emit_plots) write_plot_script(cfg, spectral_plot_body("esd3"), r.files);
    return r;
}

namespace {

double zeta_plus(double rho, double beta_M, const ShapeRatios& c) {
    if (!(rho > 0.0) || !(beta_M > 0.0)) return 0.0;
    return spike2(rho, beta_M, c).alignment;
}

std::vector<PhaseRow> phase_rows(const std::vector<double>& betas, const ShapeRatios& c) {
    std::vector<PhaseRow> rows;
    for (double b : betas) {
        PhaseRow row;
        row.beta_M = b;
        try {
            const double rho = phase_transition_rho(b, c);
            row.rho_star = rho;
            row.zeta_check = spike2(rho, b, c).zeta;
            row.status = "ok";
        } catch (const DomainError&) {
            row.zeta_check = kNaN;
            row.status = "below_asymptote";
        }
        rows.push_back(row);
    }
    return rows;
}

void write_phase(const ExperimentConfig& cfg, const std::string& name, const std::vector<PhaseRow>& rows,
                 double asymptote, std::vector<fs::path>& files) {
    CsvFile csv(cfg, name, {"beta_M", "rho_star", "zeta_at_rho_star", "asymptote", "status"});
    for (const auto& row : rows) {
        csv.add({value(row.beta_M), value(row.rho_star.value_or(kNaN)), value(row.zeta_check), value(asymptote),
                 row.status});
    }
    files.push_back(csv.write());
}

}  // namespace

AlignmentMapResult run_alignment_map(const ExperimentConfig& cfg, const ProgressFn& progress) {
    cfg.validate();
    const ShapeRatios c = ShapeRatios::from_dims(cfg.n1, cfg.n2, cfg.n3);
    AlignmentMapResult r;
    r.asymptote = phase_transition_asymptote(c);

    CsvFile grid(cfg, "alignment_map.csv", {"rho_T", "beta_M", "zeta_plus", "zeta"});
    for (double b : cfg.beta_grid) {
        for (double rho : cfg.rho_grid) {
            AlignmentCell cell{rho, b, kNaN, 0.0};
            if (rho > 0.0 && b > 0.0) {
                const SpikePrediction s = spike2(rho, b, c);
                cell.zeta = s.zeta;
                cell.zeta_plus = s.alignment;
            }
            grid.add({value(rho), value(b), value(cell.zeta_plus), value(cell.zeta)});
            r.cells.push_back(cell);
        }
    }
    r.files.push_back(grid.write());

    r.curve = phase_rows(cfg.beta_grid, c);
    write_phase(cfg, "alignment_map_phase.csv", r.curve, r.asymptote, r.files);

    if (!cfg.validation.empty()) {
        const int points = static_cast<int>(cfg.validation.size());
        const int tasks = points * cfg.trials;
        const int workers = worker_count(cfg, tasks, spectral_trial_bytes(cfg));
        auto records = run_pool<TrialRecord>(tasks, workers, [&](int task) {
            const auto start = std::chrono::steady_clock::now();
            const int point = task / cfg.trials;
            const int t = task % cfg.trials;
            const auto [rho, b] = cfg.validation[static_cast<std::size_t>(point)];
            GeneralParams p = cfg.general();
            p.beta_M = b;
            p.snr = RhoT{rho};
            p.seed = derive_seed(derive_seed(cfg.master_seed, static_cast<std::uint64_t>(point)),
                                 static_cast<std::uint64_t>(t));
            const GeneralSample s = sample_general(p);
            const Estimate e = unfolding_estimate(s.tensor, Mode::Two);
            TrialRecord rec;
            rec.trial = t;
            rec.seed = p.seed;
            rec.spike = e.spectrum->top_value();
            rec.alignment = alignment(e.vector, s.signals.y);
            rec.wall_seconds = seconds_since(start);
            report(progress, fmt::format("alignment-map point ({:.4g}, {:.4g}) trial {}/{}: alignment {:.4f} ({:.1f} s)",
                                         rho, b, t + 1, cfg.trials, rec.alignment, rec.wall_seconds));
            return rec;
        });
        CsvFile csv(cfg, "alignment_map_validation.csv",
                    {"rho_T", "beta_M", "zeta_plus", "alignment_mean", "alignment_std", "trials"});
        for (int point = 0; point < points; ++point) {
            ValidationPoint v;
            std::tie(v.rho, v.beta_M) = cfg.validation[static_cast<std::size_t>(point)];
            v.zeta_plus = zeta_plus(v.rho, v.beta_M, c);
            std::vector<double> aligns;
            for (int t = 0; t < cfg.trials; ++t) {
                v.trials.push_back(records[static_cast<std::size_t>(point * cfg.trials + t)]);
                aligns.push_back(v.trials.back().alignment);
            }
            v.alignment = mean_std(aligns);
            csv.add({value(v.rho), value(v.beta_M), value(v.zeta_plus), summary(v.alignment.mean),
                     summary(v.alignment.std), std::to_string(cfg.trials)});
            r.validation.push_back(std::move(v));
        }
        r.files.push_back(csv.write());
    }

    if (cfg.emit_plots) {
        write_plot_script(cfg,
                          "grid = load('alignment_map.csv')\n"
                          "curve = load('alignment_map_phase.csv')\n"
                          "table = grid.pivot(index='beta_M', columns='rho_T', values='zeta_plus')\n"
                          "fig, ax = plt.subplots(figsize=(6, 4))\n"
                          "mesh = ax.pcolormesh(table.columns, table.index, table.values, shading='auto')\n"
                          "fig.colorbar(mesh, label='zeta+')\n"
                          "ok = curve[curve.status == 'ok']\n"
                          "ax.plot(ok.rho_star, ok.beta_M, 'w')\n"
                          "ax.axhline(curve.asymptote.iloc[0], color='r', ls='--')\n"
                          "ax.set_xlim(table.columns.min(), table.columns.max())\n"
                          "ax.set_xlabel('rho_T')\n"
                          "ax.set_ylabel('beta_M')\n"
                          "fig.savefig(os.path.join(here, 'alignment_map.png'), dpi=150, bbox_inches='tight')\n",
                          r.files);
    }
    return r;
}

PhaseResult run_phase(const ExperimentConfig& cfg, const ProgressFn& progress) {
    cfg.validate();
    const ShapeRatios c = ShapeRatios::from_dims(cfg.n1, cfg.n2, cfg.n3);
    PhaseResult r;
    r.asymptote = phase_transition_asymptote(c);
    r.rows = phase_rows(cfg.beta_grid, c);
    write_phase(cfg, "phase.csv", r.rows, r.asymptote, r.files);
    report(progress, fmt::format("phase: {} grid values, asymptote {:.6f}", r.rows.size(), r.asymptote));
    if (cfg.emit_plots) {
        write_plot_script(cfg,
                          "curve = load('phase.csv')\n"
                          "ok = curve[curve.status == 'ok']\n"
                          "fig, ax = plt.subplots(figsize=(6, 4))\n"
                          "ax.plot(ok.rho_star, ok.beta_M)\n"
                          "ax.axhline(curve.asymptote.iloc[0], color='r', ls='--')\n"
                          "ax.set_xscale('log')\n"
                          "ax.set_xlabel('rho_T*')\n"
                          "ax.set_ylabel('beta_M')\n"
                          "fig.savefig(os.path.join(here, 'phase.png'), dpi=150, bbox_inches='tight')\n",
                          r.files);
    }
    return r;
}

BenchmarkResult run_benchmark(const ExperimentConfig& cfg, const ProgressFn& progress) {
    cfg.validate();
    struct GridPoint {
        double mu, h;
    };
    std::vector<GridPoint> grid;
    for (double h : cfg.h_grid)
        for (double mu : cfg.mu_grid) grid.push_back({mu, h});

    struct Out {
        TrialRecord u, o, t;
    };
    const int points = static_cast<int>(grid.size());
    const int tasks = points * cfg.trials;
    const double bytes = 8.0 * static_cast<double>(cfg.p * cfg.n * cfg.m) * 1.5 + (64 << 20);
    const int workers = worker_count(cfg, tasks, bytes);
    auto outs = run_pool<Out>(tasks, workers, [&](int task) {
        const auto start = std::chrono::steady_clock::now();
        const int point = task / cfg.trials;
        const int t = task % cfg.trials;
        const GridPoint g = grid[static_cast<std::size_t>(point)];
        const std::uint64_t seed =
            derive_seed(derive_seed(cfg.master_seed, static_cast<std::uint64_t>(point)), static_cast<std::uint64_t>(t));
        const MultiViewParams mv = MultiViewParams::with_norms(cfg.p, cfg.n, cfg.m, g.mu, g.h, seed);
        const MultiViewSample s = sample_multiview(mv);

        const Estimate u2 = unfolding_estimate(s.tensor, Mode::Two);
        const Estimate oracle = oracle_estimate(s.tensor, mv.h.normalized());
        const Vec u1 = unfolding_estimate(s.tensor, Mode::One).vector;
        const Vec u3 = unfolding_estimate(s.tensor, Mode::Three).vector;
        const Rank1Estimate tensor = tensor_rank1_estimate(s.tensor, ProvidedInit{u1, u2.vector, u3});

        Out o;
        for (auto* rec : {&o.u, &o.o, &o.t}) {
            rec->trial = t;
            rec->seed = seed;
        }
        const ClusterResult cu = cluster_accuracy(u2.vector, s.labels);
        const ClusterResult co = cluster_accuracy(oracle.vector, s.labels);
        const ClusterResult ct = cluster_accuracy(tensor.v.vector, s.labels);
        o.u.accuracy = cu.accuracy;
        o.u.alignment = cu.alignment;
        o.o.accuracy = co.accuracy;
        o.o.alignment = co.alignment;
        o.t.accuracy = ct.accuracy;
        o.t.alignment = ct.alignment;
        o.t.spike = tensor.v.objective;
        const double elapsed = seconds_since(start);
        for (auto* rec : {&o.u, &o.o, &o.t}) rec->wall_seconds = elapsed;
        report(progress, fmt::format("benchmark |mu|={:.3g} |h|={:.3g} trial {}/{}: U {:.3f} O {:.3f} T {:.3f} ({:.1f} s)",
                                     g.mu, g.h, t + 1, cfg.trials, cu.accuracy, co.accuracy, ct.accuracy, elapsed));
        return o;
    });

    BenchmarkResult r;
    CsvFile table(cfg, "benchmark.csv",
                  {"mu_norm", "h_norm", "acc_U_th", "acc_O_th", "acc_U_sim_mean", "acc_U_sim_std", "acc_O_sim_mean",
                   "acc_O_sim_std", "acc_T_sim_mean", "acc_T_sim_std", "trials"});
    CsvFile trials(cfg, "benchmark_trials.csv",
                   {"mu_norm", "h_norm", "trial", "seed", "acc_U", "acc_O", "acc_T", "align_U", "align_O", "align_T"});
    for (int point = 0; point < points; ++point) {
        const GridPoint g = grid[static_cast<std::size_t>(point)];
        BenchmarkPoint b;
        b.mu_norm = g.mu;
        b.h_norm = g.h;
        b.trials = cfg.trials;
        const MultiViewParams mv = MultiViewParams::with_norms(cfg.p, cfg.n, cfg.m, g.mu, g.h, 0);
        b.zeta_U = g.mu > 0.0 ? multiview_zeta(mv) : 0.0;
        b.acc_U_th = accuracy_from_alignment(std::max(b.zeta_U, 0.0)).accuracy;
        b.acc_O_th = accuracy_from_alignment(multiview_oracle(mv).alignment).accuracy;
        std::vector<double> au, ao, at;
        for (int t = 0; t < cfg.trials; ++t) {
            const Out& o = outs[static_cast<std::size_t>(point * cfg.trials + t)];
            au.push_back(o.u.accuracy);
            ao.push_back(o.o.accuracy);
            at.push_back(o.t.accuracy);
            trials.add({value(g.mu), value(g.h), std::to_string(t), std::to_string(o.u.seed), value(o.u.accuracy),
                        value(o.o.accuracy), value(o.t.accuracy), value(o.u.alignment), value(o.o.alignment),
                        value(o.t.alignment)});
        }
        b.acc_U = mean_std(au);
        b.acc_O = mean_std(ao);
        b.acc_T = mean_std(at);
        table.add({value(b.mu_norm), value(b.h_norm), value(b.acc_U_th), value(b.acc_O_th), summary(b.acc_U.mean),
                   summary(b.acc_U.std), summary(b.acc_O.mean), summary(b.acc_O.std), summary(b.acc_T.mean),
                   summary(b.acc_T.std), std::to_string(b.trials)});
        r.points.push_back(b);
    }
    r.files.push_back(table.write());
    r.files.push_back(trials.write());

    if (cfg.emit_plots) {
        write_plot_script(cfg,
                          "df = load('benchmark.csv')\n"
                          "hs = sorted(df.h_norm.unique())\n"
                          "fig, axes = plt.subplots(1, len(hs), figsize=(5 * len(hs), 4), squeeze=False)\n"
                          "for ax, h in zip(axes[0], hs):\n"
                          "    d = df[df.h_norm == h]\n"
                          "    ax.plot(d.mu_norm, d.acc_O_th, 'k-', label='O (th)')\n"
                          "    ax.plot(d.mu_norm, d.acc_U_th, 'b--', label='U (th)')\n"
                          "    ax.errorbar(d.mu_norm, d.acc_O_sim_mean, d.acc_O_sim_std, fmt='ko', label='O (sim)')\n"
                          "    ax.errorbar(d.mu_norm, d.acc_U_sim_mean, d.acc_U_sim_std, fmt='bs', label='U (sim)')\n"
                          "    ax.errorbar(d.mu_norm, d.acc_T_sim_mean, d.acc_T_sim_std, fmt='g^', label='T (sim)')\n"
                          "    ax.set_title(f'|h| = {h}')\n"
                          "    ax.set_xlabel('|mu|')\n"
                          "    ax.set_ylabel('accuracy')\n"
                          "    ax.legend()\n"
                          "fig.savefig(os.path.join(here, 'benchmark.png'), dpi=150, bbox_inches='tight')\n",
                          r.files);
    }
    return r;
}

}  // namespace nested
