#include "apsel/rng.hpp"

#include <limits>

namespace apsel {

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

Rng Rng::derive(std::uint64_t master, std::uint64_t seed_index, Stream purpose, std::uint64_t sub)
{
    std::uint64_t h = splitmix64(master);
    h = splitmix64(h ^ (seed_index * 0xd1342543de82ef95ULL));
    h = splitmix64(h ^ static_cast<std::uint64_t>(purpose));
    if (sub != 0) {
        h = splitmix64(h ^ (sub * 0x9e3779b97f4a7c15ULL));
    }
    return Rng(h);
}

std::uint64_t Rng::index(std::uint64_t n)
{
    // Rejection sampling on the top of the range removes modulo bias.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - (std::numeric_limits<std::uint64_t>::max() % n);
    std::uint64_t v = engine_();
    while (v >= limit) {
        v = engine_();
    }
    return v % n;
}

} // namespace apsel
