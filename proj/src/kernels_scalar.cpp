#include <algorithm>

#include "manet/kernels.hpp"

namespace manet::kernels::scalar {

void positions_at(const LegArrays& legs, double t, std::span<double> x, std::span<double> y) {
    const std::size_t n = legs.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double te = std::min(std::max(t, legs.t0[i]), legs.t1[i]);
        const double dt = te - legs.t0[i];
        x[i] = legs.x0[i] + legs.vx[i] * dt;
        y[i] = legs.y0[i] + legs.vy[i] * dt;
    }
}

std::size_t select_in_range(std::span<const double> x, std::span<const double> y, double cx,
                            double cy, double range_sq, std::span<std::uint32_t> out) {
    std::size_t count = 0;
    const std::size_t n = x.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - cx;
        const double dy = y[i] - cy;
        const double d2 = dx * dx + dy * dy;
        if (d2 <= range_sq) {
            out[count++] = static_cast<std::uint32_t>(i);
        }
    }
    return count;
}

}  // namespace manet::kernels::scalar
