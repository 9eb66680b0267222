#include "nested_spectra/errors.hpp"
#include "nested_spectra/experiments.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace nested {

namespace {

namespace pt = boost::property_tree;

std::string trim(std::string s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

double parse_double(const std::string& key, const std::string& raw) {
    const std::string s = trim(raw);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
        throw ConfigError(fmt::format("{}: expected a number, got '{}'", key, raw));
    }
    return v;
}

long long parse_int(const std::string& key, const std::string& raw) {
    const std::string s = trim(raw);
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
        throw ConfigError(fmt::format("{}: expected an integer, got '{}'", key, raw));
    }
    return v;
}

std::uint64_t parse_u64(const std::string& key, const std::string& raw) {
    const std::string s = trim(raw);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
        throw ConfigError(fmt::format("{}: expected an unsigned integer, got '{}'", key, raw));
    }
    return v;
}

bool parse_bool(const std::string& key, const std::string& raw) {
    const std::string s = trim(raw);
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    throw ConfigError(fmt::format("{}: expected a boolean, got '{}'", key, raw));
}

std::vector<double> parse_grid_key(const std::string& key, const std::string& raw) {
    try {
        return parse_grid(raw);
    } catch (const ConfigError& e) {
        throw ConfigError(fmt::format("{}: {}", key, e.what()));
    }
}

const std::set<std::string> kKnownKeys = {
    "experiment",
    "general.n1", "general.n2", "general.n3", "general.beta_M", "general.beta_T", "general.rho_T", "general.varrho",
    "multiview.p", "multiview.n", "multiview.m",
    "grid.rho_T", "grid.beta_M", "grid.mu_norm", "grid.h_norm", "grid.validate_rho_T", "grid.validate_beta_M",
    "run.trials", "run.seed", "run.out", "run.bins", "run.eta", "run.emit_plots", "run.threads",
};

void apply_tree(ExperimentConfig& cfg, const pt::ptree& tree) {
    std::vector<double> validate_rho;
    std::vector<double> validate_beta;
    bool have_validate_rho = false;
    bool have_validate_beta = false;
    int snr_keys = 0;

    for (const auto& [section, node] : tree) {
        const bool is_leaf = node.empty();
        if (is_leaf) {
            if (!kKnownKeys.contains(section)) throw ConfigError(fmt::format("unknown key '{}'", section));
            if (section == "experiment") cfg.experiment = experiment_from_string(trim(node.data()));
            continue;
        }
        for (const auto& [name, leaf] : node) {
            const std::string key = section + "." + name;
            if (!kKnownKeys.contains(key)) throw ConfigError(fmt::format("unknown key '{}'", key));
            const std::string& v = leaf.data();
            if (key == "general.n1") cfg.n1 = parse_int(key, v);
            else if (key == "general.n2") cfg.n2 = parse_int(key, v);
            else if (key == "general.n3") cfg.n3 = parse_int(key, v);
            else if (key == "general.beta_M") cfg.beta_M = parse_double(key, v);
            else if (key == "general.beta_T") { cfg.snr = BetaT{parse_double(key, v)}; ++snr_keys; }
            else if (key == "general.rho_T") { cfg.snr = RhoT{parse_double(key, v)}; ++snr_keys; }
            else if (key == "general.varrho") { cfg.snr = VarRho{parse_double(key, v)}; ++snr_keys; }
            else if (key == "multiview.p") cfg.p = parse_int(key, v);
            else if (key == "multiview.n") cfg.n = parse_int(key, v);
            else if (key == "multiview.m") cfg.m = parse_int(key, v);
            else if (key == "grid.rho_T") cfg.rho_grid = parse_grid_key(key, v);
            else if (key == "grid.beta_M") cfg.beta_grid = parse_grid_key(key, v);
            else if (key == "grid.mu_norm") cfg.mu_grid = parse_grid_key(key, v);
            else if (key == "grid.h_norm") cfg.h_grid = parse_grid_key(key, v);
            else if (key == "grid.validate_rho_T") { validate_rho = parse_grid_key(key, v); have_validate_rho = true; }
            else if (key == "grid.validate_beta_M") { validate_beta = parse_grid_key(key, v); have_validate_beta = true; }
            else if (key == "run.trials") cfg.trials = static_cast<int>(parse_int(key, v));
            else if (key == "run.seed") cfg.master_seed = parse_u64(key, v);
            else if (key == "run.out") cfg.output_dir = trim(v);
            else if (key == "run.bins") cfg.bins = static_cast<int>(parse_int(key, v));
            else if (key == "run.eta") cfg.eta = parse_double(key, v);
            else if (key == "run.emit_plots") cfg.emit_plots = parse_bool(key, v);
            else if (key == "run.threads") cfg.threads = static_cast<int>(parse_int(key, v));
        }
    }
    if (snr_keys > 1) throw ConfigError("[general]: give only one of beta_T, rho_T, varrho");
    if (have_validate_rho != have_validate_beta) {
        throw ConfigError("[grid]: validate_rho_T and validate_beta_M must be given together");
    }
    if (have_validate_rho) {
        if (validate_rho.size() != validate_beta.size()) {
            throw ConfigError("[grid]: validate_rho_T and validate_beta_M must have the same length");
        }
        cfg.validation.clear();
        for (std::size_t i = 0; i < validate_rho.size(); ++i) cfg.validation.emplace_back(validate_rho[i], validate_beta[i]);
    }
}

std::string join(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += fmt::format("{}{:.17g}", i ? "," : "", v[i]);
    return out;
}

}  // namespace

const char* to_string(Experiment e) noexcept {
    switch (e) {
        case Experiment::Esd2: return "esd2";
        case Experiment::Esd3: return "esd3";
        case Experiment::AlignmentMap: return "alignment-map";
        case Experiment::Benchmark: return "benchmark";
        case Experiment::Phase: return "phase";
    }
    return "unknown";
}

Experiment experiment_from_string(const std::string& name) {
    if (name == "esd2") return Experiment::Esd2;
    if (name == "esd3") return Experiment::Esd3;
    if (name == "alignment-map") return Experiment::AlignmentMap;
    if (name == "benchmark") return Experiment::Benchmark;
    if (name == "phase") return Experiment::Phase;
    throw ConfigError(fmt::format("unknown experiment '{}'", name));
}

std::vector<double> parse_grid(const std::string& text) {
    const std::string s = trim(text);
    if (s.empty()) throw ConfigError("empty grid");
    std::vector<double> out;
    if (s.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::stringstream ss(s);
        for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
        if (parts.size() != 3) throw ConfigError(fmt::format("grid '{}' must be start:stop:count", text));
        const double start = parse_double("grid start", parts[0]);
        const double stop = parse_double("grid stop", parts[1]);
        const long long count = parse_int("grid count", parts[2]);
        if (count < 1) throw ConfigError(fmt::format("grid '{}' needs count >= 1", text));
        if (count == 1) return {start};
        for (long long i = 0; i < count; ++i) {
            out.push_back(i == count - 1 ? stop : start + (stop - start) * static_cast<double>(i) / (count - 1));
        }
        return out;
    }
    std::stringstream ss(s);
    for (std::string part; std::getline(ss, part, ',');) out.push_back(parse_double("grid value", part));
    return out;
}

GeneralParams ExperimentConfig::general(std::uint64_t seed) const {
    GeneralParams g;
    g.n1 = n1;
    g.n2 = n2;
    g.n3 = n3;
    g.beta_M = beta_M;
    g.snr = snr;
    g.seed = seed;
    return g;
}

std::string ExperimentConfig::canonical() const {
    const char* snr_name = std::holds_alternative<BetaT>(snr) ? "beta_T" : std::holds_alternative<RhoT>(snr) ? "rho_T" : "varrho";
    const double snr_value = std::visit([](const auto& s) { return s.value; }, snr);
    std::string out = fmt::format("experiment={};n=({},{},{});beta_M={:.17g};{}={:.17g};mv=({},{},{});", to_string(experiment),
                                  n1, n2, n3, beta_M, snr_name, snr_value, p, n, m);
    out += fmt::format("rho_grid={};beta_grid={};mu_grid={};h_grid={};validation=", join(rho_grid), join(beta_grid),
                       join(mu_grid), join(h_grid));
    for (const auto& [r, b] : validation) out += fmt::format("({:.17g},{:.17g})", r, b);
    out += fmt::format(";trials={};seed={};bins={};eta={:.17g}", trials, master_seed, bins, eta);
    return out;
}

std::uint64_t ExperimentConfig::hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : canonical()) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

void ExperimentConfig::validate() const {
    if (trials < 1) throw ConfigError("trials must be >= 1");
    if (bins < 1) throw ConfigError("bins must be >= 1");
    if (!(eta > 0.0)) throw ConfigError("eta must be positive");
    if (threads < 0) throw ConfigError("threads must be >= 0");
    auto require_grid = [](const std::vector<double>& g, const char* name) {
        if (g.empty()) throw ConfigError(fmt::format("[grid] {} is required and must be nonempty", name));
    };
    auto require_nonnegative = [](const std::vector<double>& g, const char* name) {
        for (double v : g)
            if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError(fmt::format("[grid] {} values must be finite and >= 0", name));
    };
    switch (experiment) {
        case Experiment::Esd2:
        case Experiment::Esd3:
            try {
                general().validate();
            } catch (const std::invalid_argument& e) {
                throw ConfigError(e.what());
            }
            break;
        case Experiment::AlignmentMap:
            if (n1 <= 0 || n2 <= 0 || n3 <= 0) throw ConfigError("n1, n2, n3 must be positive");
            require_grid(rho_grid, "rho_T");
            require_grid(beta_grid, "beta_M");
            require_nonnegative(rho_grid, "rho_T");
            require_nonnegative(beta_grid, "beta_M");
            for (const auto& [r, b] : validation) {
                if (!(r > 0.0) || !(b > 0.0)) throw ConfigError("validation points need rho_T > 0 and beta_M > 0");
            }
            break;
        case Experiment::Benchmark:
            if (p <= 0 || n <= 0 || m <= 0) throw ConfigError("p, n, m must be positive");
            if (n % 2 != 0) throw ConfigError("n must be even for balanced classes");
            require_grid(mu_grid, "mu_norm");
            require_grid(h_grid, "h_norm");
            require_nonnegative(mu_grid, "mu_norm");
            for (double h : h_grid)
                if (!(h > 0.0)) throw ConfigError("[grid] h_norm values must be positive (the oracle needs a direction)");
            break;
        case Experiment::Phase:
            if (n1 <= 0 || n2 <= 0 || n3 <= 0) throw ConfigError("n1, n2, n3 must be positive");
            require_grid(beta_grid, "beta_M");
            require_nonnegative(beta_grid, "beta_M");
            break;
    }
}

ExperimentConfig merge_config(ExperimentConfig base, const std::string& text) {
    pt::ptree tree;
    std::istringstream in(text);
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(fmt::format("line {}: {}", e.line(), e.message()));
    }
    apply_tree(base, tree);
    return base;
}

ExperimentConfig parse_config(const std::string& text) { return merge_config(ExperimentConfig{}, text); }

ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base) {
    std::ifstream in(path);
    if (!in) throw IoError(fmt::format("cannot open config '{}'", path.string()));
    std::stringstream buffer;
    buffer << in.rdbuf();
    try {
        return merge_config(std::move(base), buffer.str());
    } catch (const ConfigError& e) {
        throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
    }
}

std::vector<std::string> preset_names() { return {"fig1-left", "fig1-right", "fig2", "fig3", "phase"}; }

ExperimentConfig preset(const std::string& name) {
    ExperimentConfig cfg;
    if (name == "fig1-left") {
        // Mode-2 spectrum with one outlier above the bulk.
        cfg.experiment = Experiment::Esd2;
        cfg.n1 = 600, cfg.n2 = 400, cfg.n3 = 200;
        cfg.beta_M = 1.5;
        cfg.snr = RhoT{2.0};
        cfg.bins = 60;
    } else if (name == "fig1-right") {
        // Mode-3 spectrum: shifted semicircle plus outlier at varrho + 1/varrho.
        cfg.experiment = Experiment::Esd3;
        cfg.n1 = 600, cfg.n2 = 400, cfg.n3 = 200;
        cfg.beta_M = 3.0;
        cfg.snr = VarRho{4.0};
        cfg.bins = 60;
    } else if (name == "fig2") {
        // Alignment map at ratios (1/2, 1/3, 1/6).
        cfg.experiment = Experiment::AlignmentMap;
        cfg.n1 = 600, cfg.n2 = 400, cfg.n3 = 200;
        cfg.rho_grid = parse_grid("0:4:81");
        cfg.beta_grid = parse_grid("0:2:81");
    } else if (name == "fig3") {
        // Two-class multi-view benchmark.
        cfg.experiment = Experiment::Benchmark;
        cfg.p = 150, cfg.n = 300, cfg.m = 60;
        cfg.mu_grid = parse_grid("0:5:11");
        cfg.h_grid = {0.5, 1.5};
    } else if (name == "phase") {
        cfg.experiment = Experiment::Phase;
        cfg.n1 = 600, cfg.n2 = 400, cfg.n3 = 200;
        cfg.beta_grid = parse_grid("0.5:3:51");
    } else {
        throw ConfigError(fmt::format("unknown preset '{}'", name));
    }
    return cfg;
}

}  // namespace nested
