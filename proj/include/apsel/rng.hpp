#pragma once

#include <cstdint>
#include <random>

namespace apsel {

/// Named sub-streams. Each purpose draws from its own generator so that
/// switching one feature on or off leaves the other draws untouched.
enum class Stream : std::uint64_t {
    Placement = 1,
    Shadowing = 2,
    Loads = 3,
    Agents = 4,
    Mobility = 5,
    Arrivals = 6,
    Roles = 7,
    Order = 8,
};

std::uint64_t splitmix64(std::uint64_t x);

/// Seedable generator with platform-independent uniform mappings.
///
/// std::uniform_*_distribution output differs between standard library
/// implementations; the mappings here are fixed so traces are reproducible
/// everywhere.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    /// Stream for (master seed, seed index, purpose[, sub-stream such as a STA id]).
    static Rng derive(std::uint64_t master, std::uint64_t seed_index, Stream purpose, std::uint64_t sub = 0);

    std::uint64_t next() { return engine_(); }

    /// Uniform on [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer on [0, n). n must be > 0.
    std::uint64_t index(std::uint64_t n);

    /// Uniform integer on [lo, hi].
    std::int64_t integer(std::int64_t lo, std::int64_t hi)
    {
        return lo + static_cast<std::int64_t>(index(static_cast<std::uint64_t>(hi - lo) + 1));
    }

    bool bernoulli(double p) { return uniform() < p; }

private:
    std::mt19937_64 engine_;
};

} // namespace apsel
