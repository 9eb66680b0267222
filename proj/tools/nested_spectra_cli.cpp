// nested-spectra: runs one experiment and writes its CSV files.

#include "nested_spectra/errors.hpp"
#include "nested_spectra/experiments.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <optional>

namespace {

enum ExitCode { kOk = 0, kConfig = 2, kNumeric = 3, kIo = 4 };

struct Overrides {
    std::string config;
    std::string preset;
    std::optional<int> trials;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<int> bins;
    std::optional<double> eta;
    bool emit_plots = false;
    bool quiet = false;
};

nested::ExperimentConfig resolve(const std::string& subcommand, const Overrides& o) {
    using namespace nested;
    if (o.config.empty() && o.preset.empty()) throw ConfigError("give --config, --preset or both");
    ExperimentConfig cfg;
    if (!o.preset.empty()) {
        cfg = preset(o.preset);
        if (cfg.experiment != experiment_from_string(subcommand)) {
            throw ConfigError(fmt::format("preset '{}' is for experiment '{}', not '{}'", o.preset,
                                          to_string(cfg.experiment), subcommand));
        }
    }
    cfg.experiment = experiment_from_string(subcommand);
    if (!o.config.empty()) {
        cfg = load_config(o.config, cfg);
        if (cfg.experiment != experiment_from_string(subcommand)) {
            throw ConfigError(fmt::format("config '{}' is for experiment '{}', not '{}'", o.config,
                                          to_string(cfg.experiment), subcommand));
        }
    }
    if (o.trials) cfg.trials = *o.trials;
    if (o.seed) cfg.master_seed = *o.seed;
    if (o.out) cfg.output_dir = *o.out;
    if (o.bins) cfg.bins = *o.bins;
    if (o.eta) cfg.eta = *o.eta;
    if (o.emit_plots) cfg.emit_plots = true;
    cfg.validate();
    return cfg;
}

std::vector<std::filesystem::path> run(const nested::ExperimentConfig& cfg, const nested::ProgressFn& progress) {
    using namespace nested;
    switch (cfg.experiment) {
        case Experiment::Esd2: {
            const auto r = run_esd2(cfg, progress);
            fmt::print("top eigenvalue {:.6f} +- {:.6f} (predicted {:.6f}), alignment {:.6f} (predicted {:.6f})\n",
                       r.spike.mean, r.spike.std, r.prediction.location, r.alignment.mean, r.prediction.alignment);
            return r.files;
        }
        case Experiment::Esd3: {
            const auto r = run_esd3(cfg, progress);
            fmt::print("top eigenvalue {:.6f} +- {:.6f} (predicted {:.6f}), alignment {:.6f} (predicted {:.6f})\n",
                       r.spike.mean, r.spike.std, r.prediction.location, r.alignment.mean, r.prediction.alignment);
            return r.files;
        }
        case Experiment::AlignmentMap: return run_alignment_map(cfg, progress).files;
        case Experiment::Benchmark: return run_benchmark(cfg, progress).files;
        case Experiment::Phase: return run_phase(cfg, progress).files;
    }
    return {};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monte Carlo experiments for the nested matrix-tensor model"};
    app.set_version_flag("--version", nested::kVersion);
    app.require_subcommand(1);

    Overrides o;
    std::string names;
    for (const auto& n : nested::preset_names()) names += (names.empty() ? "" : ", ") + n;
    for (const char* name : {"esd2", "esd3", "alignment-map", "benchmark", "phase"}) {
        auto* sub = app.add_subcommand(name, fmt::format("run the {} experiment", name));
        sub->add_option("--config", o.config, "INI config file");
        sub->add_option("--preset", o.preset, "built-in parameter set: " + names);
        sub->add_option("--trials", o.trials, "Monte Carlo trials per point")->check(CLI::PositiveNumber);
        sub->add_option("--seed", o.seed, "master seed");
        sub->add_option("--out", o.out, "output directory");
        sub->add_option("--bins", o.bins, "histogram bins")->check(CLI::PositiveNumber);
        sub->add_option("--eta", o.eta, "imaginary offset for density evaluation")->check(CLI::PositiveNumber);
        sub->add_flag("--emit-plots", o.emit_plots, "also write a matplotlib script");
        sub->add_flag("-q,--quiet", o.quiet, "no per-trial progress on stderr");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    const std::string subcommand = app.get_subcommands().front()->get_name();
    try {
        const nested::ExperimentConfig cfg = resolve(subcommand, o);
        nested::ProgressFn progress;
        if (!o.quiet) progress = [](const std::string& line) { fmt::print(stderr, "{}\n", line); };
        for (const auto& path : run(cfg, progress)) fmt::print("wrote {}\n", path.string());
        return kOk;
    } catch (const nested::ConfigError& e) {
        fmt::print(stderr, "config error: {}\n", e.what());
        return kConfig;
    } catch (const nested::IoError& e) {
        fmt::print(stderr, "i/o error: {}\n", e.what());
        return kIo;
    } catch (const std::filesystem::filesystem_error& e) {
        fmt::print(stderr, "i/o error: {}\n", e.what());
        return kIo;
    } catch (const std::invalid_argument& e) {
        fmt::print(stderr, "config error: {}\n", e.what());
        return kConfig;
    } catch (const std::exception& e) {
        fmt::print(stderr, "numeric error: {}\n", e.what());
        return kNumeric;
    }
}
