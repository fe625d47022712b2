#include "manet/rng.hpp"

#include <cassert>

namespace manet {

namespace {

std::mt19937_64 make_engine(std::uint64_t seed, Stream stream, std::uint32_t node) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), node};
    return std::mt19937_64(seq);
}

}  // namespace

Rng::Rng(std::uint64_t seed, Stream stream, std::uint32_t node)
    : engine_(make_engine(seed, stream, node)) {}

std::uint64_t Rng::index(std::uint64_t n) {
    assert(n > 0);
    // Rejection sampling keeps the draw unbiased and portable.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
        x = engine_();
    } while (x >= limit);
    return x % n;
}

}  // namespace manet
