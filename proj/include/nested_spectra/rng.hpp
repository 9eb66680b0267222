#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace nested {

/// SplitMix64 finalizer; used to derive independent stream seeds.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Seed for stream `index` of `master`. Trial t of an experiment uses
/// derive_seed(master_seed, t), so results never depend on execution order.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept;

/**
 * Portable Gaussian source.
 *
 * Uniforms come from std::mt19937_64 (whose output sequence is fixed by the
 * standard) converted to doubles with the top 53 bits. Normals use the
 * Box-Muller transform with both outputs consumed in order. The distribution
 * code is ours rather than std::normal_distribution because the latter is
 * implementation defined.
 */
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1).
    double uniform() noexcept {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double normal() noexcept;

    void fill_normal(std::span<double> out, double scale = 1.0) noexcept;

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) noexcept;

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace nested
