#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace advmask {

/// Deterministic RNG with portable derived distributions.
///
/// mt19937_64 output is fixed by the standard; the uniform/gaussian mappings
/// here are explicit (no std::*_distribution, whose streams differ between
/// standard libraries), so identical seeds give identical draws everywhere.
/// Named substreams let one global experiment seed fan out to independent
/// render/sampling/gallery streams without coupling their consumption.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1).
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [lo, hi] inclusive.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<std::int64_t>(next_u64() % span);
    }

    /// Standard normal via explicit Box-Muller (portable, two draws per pair).
    double gaussian();

    /// Independent stream derived from (seed, name); parent state untouched.
    Rng substream(std::string_view name) const;

    /// Substream keyed by (name, index), for per-item streams.
    Rng substream(std::string_view name, std::uint64_t index) const;

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace advmask
