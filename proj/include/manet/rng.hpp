#pragma once

// Seeded random streams. Each stream is keyed by (seed, stream, node) so runs
// are reproducible and independent consumers never share a generator.

#include <cstdint>
#include <random>

namespace manet {

enum class Stream : std::uint32_t {
    Placement = 1,
    Mobility = 2,
    AdversarySelection = 3,
    Flows = 4,
    FakeDestinations = 5,
    Scenario = 6,  // free for tests and tools
};

class Rng {
public:
    Rng(std::uint64_t seed, Stream stream, std::uint32_t node = 0);

    std::uint64_t next() { return engine_(); }

    // Uniform in [0, 1) with 53 bits of resolution. Defined here rather than
    // through std::uniform_real_distribution, whose output is not portable
    // across standard library implementations.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Uniform in [0, n). n must be nonzero.
    std::uint64_t index(std::uint64_t n);

private:
    std::mt19937_64 engine_;
};

}  // namespace manet
