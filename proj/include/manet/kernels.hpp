#pragma once

// Data-parallel geometry kernels used by the channel on every transmission.
//
// Node motion is stored as one straight leg per node in structure-of-arrays
// form: position(t) = start + velocity * (clamp(t, t0, t1) - t0). Two kernels
// run over it:
//
//   positions_at     evaluate every node's position at time t
//   select_in_range  indices of nodes within a closed disk around a point
//
// Each kernel has a scalar reference and an AVX2 variant. The variants use
// the same operation order (no FMA) so their outputs are bit-identical; the
// active variant is picked once at startup from the CPU's capabilities and
// can be overridden for testing.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace manet::kernels {

struct LegArrays {
    std::span<const double> x0, y0;  // position at t0
    std::span<const double> vx, vy;  // m/s
    std::span<const double> t0, t1;  // leg start and end; t1 may be +inf

    std::size_t size() const noexcept { return x0.size(); }
};

using PositionsAtFn = void (*)(const LegArrays& legs, double t, std::span<double> x,
                               std::span<double> y);
// Writes the matching indices to `out` (which must hold x.size() entries) in
// increasing order and returns how many there are.
using SelectInRangeFn = std::size_t (*)(std::span<const double> x, std::span<const double> y,
                                        double cx, double cy, double range_sq,
                                        std::span<std::uint32_t> out);

enum class Isa : std::uint8_t { Scalar, Avx2 };

std::string_view to_string(Isa isa) noexcept;

struct KernelTable {
    Isa isa;
    PositionsAtFn positions_at;
    SelectInRangeFn select_in_range;
};

namespace scalar {
void positions_at(const LegArrays& legs, double t, std::span<double> x, std::span<double> y);
std::size_t select_in_range(std::span<const double> x, std::span<const double> y, double cx,
                            double cy, double range_sq, std::span<std::uint32_t> out);
}  // namespace scalar

namespace avx2 {
// Only callable when isa_available(Isa::Avx2).
void positions_at(const LegArrays& legs, double t, std::span<double> x, std::span<double> y);
std::size_t select_in_range(std::span<const double> x, std::span<const double> y, double cx,
                            double cy, double range_sq, std::span<std::uint32_t> out);
}  // namespace avx2

bool isa_available(Isa isa) noexcept;
Isa best_available_isa() noexcept;

const KernelTable& table_for(Isa isa);

// The table used by the simulator. Defaults to best_available_isa(), or to
// the value of MANETSIM_KERNEL ("scalar" / "avx2") when that is set.
const KernelTable& active();

// Throws std::invalid_argument if the ISA is not supported on this CPU.
void select_isa(Isa isa);

}  // namespace manet::kernels
