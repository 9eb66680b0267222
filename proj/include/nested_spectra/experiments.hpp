#pragma once

#include "nested_spectra/model.hpp"
#include "nested_spectra/stats.hpp"
#include "nested_spectra/theory.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace nested {

inline constexpr const char* kVersion = "0.1.0";

enum class Experiment { Esd2, Esd3, AlignmentMap, Benchmark, Phase };

const char* to_string(Experiment e) noexcept;
/// Accepts the subcommand spellings esd2, esd3, alignment-map, benchmark, phase.
Experiment experiment_from_string(const std::string& name);

/// "start:stop:count" (inclusive, evenly spaced) or a comma-separated list.
std::vector<double> parse_grid(const std::string& text);

/**
 * Everything needed to reproduce one experiment.
 *
 * On disk this is an INI file:
 *
 *   experiment = esd2
 *   [general]      n1 n2 n3 beta_M and exactly one of beta_T / rho_T / varrho
 *   [multiview]    p n m
 *   [grid]         rho_T beta_M mu_norm h_norm validate_rho_T validate_beta_M
 *   [run]          trials seed out bins eta emit_plots threads
 */
struct ExperimentConfig {
    Experiment experiment = Experiment::Esd2;

    Index n1 = 600;
    Index n2 = 400;
    Index n3 = 200;
    double beta_M = 1.5;
    TensorSnr snr = RhoT{2.0};

    Index p = 150;
    Index n = 300;
    Index m = 60;

    std::vector<double> rho_grid;
    std::vector<double> beta_grid;
    std::vector<double> mu_grid;
    std::vector<double> h_grid;
    /// Paired (rho_T, beta_M) points checked by simulation in the alignment map.
    std::vector<std::pair<double, double>> validation;

    int trials = 10;
    std::uint64_t master_seed = 1;
    std::filesystem::path output_dir = "results";
    int bins = 60;
    double eta = 1e-6;
    bool emit_plots = false;
    /// Worker cap; 0 means NESTED_SPECTRA_THREADS or the hardware count.
    int threads = 0;

    /// General-model parameters with the given seed.
    GeneralParams general(std::uint64_t seed = 0) const;

    /// Fixed-order text of every field that influences results.
    std::string canonical() const;
    /// FNV-1a of canonical().
    std::uint64_t hash() const;

    /// Throws ConfigError when a field is out of range for the chosen experiment.
    void validate() const;
};

ExperimentConfig parse_config(const std::string& text);
/// Overlays the keys present in `text` onto `base`.
ExperimentConfig merge_config(ExperimentConfig base, const std::string& text);
/// Reads a config file on top of `base`.
ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base = {});

/// fig1-left, fig1-right, fig2, fig3, phase.
ExperimentConfig preset(const std::string& name);
std::vector<std::string> preset_names();

struct TrialRecord {
    int trial = 0;
    std::uint64_t seed = 0;
    double spike = 0.0;
    double alignment = 0.0;
    /// Benchmark only.
    double accuracy = 0.0;
    /// KS distance of the bulk (top eigenvalue removed) to the limiting law.
    double ks = 0.0;
    double wall_seconds = 0.0;
};

using ProgressFn = std::function<void(const std::string&)>;

struct SpectralRunResult {
    SpikePrediction prediction;
    /// Edges of the limiting bulk.
    Support bulk{0.0, 0.0};
    std::vector<TrialRecord> trials;
    MeanStd spike;
    MeanStd alignment;
    MeanStd ks;
    std::vector<std::filesystem::path> files;
};

/// Mode-2 unfolding: centered-scaled ESD, limiting law, spike and alignment report.
SpectralRunResult run_esd2(const ExperimentConfig& cfg, const ProgressFn& progress = {});
/// Mode-3 unfolding: centered-scaled ESD against the semicircle, spike and alignment report.
SpectralRunResult run_esd3(const ExperimentConfig& cfg, const ProgressFn& progress = {});

struct AlignmentCell {
    double rho = 0.0;
    double beta_M = 0.0;
    double zeta = 0.0;
    double zeta_plus = 0.0;
};

struct PhaseRow {
    double beta_M = 0.0;
    std::optional<double> rho_star;
    double zeta_check = 0.0;
    std::string status;
};

struct ValidationPoint {
    double rho = 0.0;
    double beta_M = 0.0;
    double zeta_plus = 0.0;
    std::vector<TrialRecord> trials;
    MeanStd alignment;
};

struct AlignmentMapResult {
    std::vector<AlignmentCell> cells;
    std::vector<PhaseRow> curve;
    double asymptote = 0.0;
    std::vector<ValidationPoint> validation;
    std::vector<std::filesystem::path> files;
};

/// Grid of zeta+ over (rho_T, beta_M), the phase curve and optional simulated points.
AlignmentMapResult run_alignment_map(const ExperimentConfig& cfg, const ProgressFn& progress = {});

struct PhaseResult {
    std::vector<PhaseRow> rows;
    double asymptote = 0.0;
    std::vector<std::filesystem::path> files;
};

PhaseResult run_phase(const ExperimentConfig& cfg, const ProgressFn& progress = {});

struct BenchmarkPoint {
    double mu_norm = 0.0;
    double h_norm = 0.0;
    /// Unclipped multi-view zeta.
    double zeta_U = 0.0;
    double acc_U_th = 0.0;
    double acc_O_th = 0.0;
    MeanStd acc_U;
    MeanStd acc_O;
    MeanStd acc_T;
    int trials = 0;
};

struct BenchmarkResult {
    std::vector<BenchmarkPoint> points;
    std::vector<std::filesystem::path> files;
};

/// Clustering accuracy of the unfolding, oracle and tensor estimators against theory.
BenchmarkResult run_benchmark(const ExperimentConfig& cfg, const ProgressFn& progress = {});

/// Number of trial workers: threads setting, NESTED_SPECTRA_THREADS, hardware
/// and a memory budget for `bytes_per_trial`, never more than `tasks`.
int worker_count(const ExperimentConfig& cfg, int tasks, double bytes_per_trial);

}  // namespace nested
