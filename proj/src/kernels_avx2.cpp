#include "manet/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>

#define MANET_HAVE_AVX2_KERNELS 1
#define MANET_AVX2 __attribute__((target("avx2")))
#endif

namespace manet::kernels::avx2 {

#ifdef MANET_HAVE_AVX2_KERNELS

// max/min operand order matches std::max(t, t0) / std::min(., t1) in the
// scalar path; for non-NaN inputs the results are identical.
MANET_AVX2 void positions_at(const LegArrays& legs, double t, std::span<double> x,
                             std::span<double> y) {
    const std::size_t n = legs.size();
    const __m256d vt = _mm256_set1_pd(t);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d t0 = _mm256_loadu_pd(&legs.t0[i]);
        const __m256d t1 = _mm256_loadu_pd(&legs.t1[i]);
        const __m256d te = _mm256_min_pd(_mm256_max_pd(vt, t0), t1);
        const __m256d dt = _mm256_sub_pd(te, t0);
        const __m256d px = _mm256_add_pd(_mm256_loadu_pd(&legs.x0[i]),
                                         _mm256_mul_pd(_mm256_loadu_pd(&legs.vx[i]), dt));
        const __m256d py = _mm256_add_pd(_mm256_loadu_pd(&legs.y0[i]),
                                         _mm256_mul_pd(_mm256_loadu_pd(&legs.vy[i]), dt));
        _mm256_storeu_pd(&x[i], px);
        _mm256_storeu_pd(&y[i], py);
    }
    for (; i < n; ++i) {
        double te = t > legs.t0[i] ? t : legs.t0[i];
        te = te < legs.t1[i] ? te : legs.t1[i];
        const double dt = te - legs.t0[i];
        x[i] = legs.x0[i] + legs.vx[i] * dt;
        y[i] = legs.y0[i] + legs.vy[i] * dt;
    }
}

MANET_AVX2 std::size_t select_in_range(std::span<const double> x, std::span<const double> y,
                                       double cx, double cy, double range_sq,
                                       std::span<std::uint32_t> out) {
    const std::size_t n = x.size();
    const __m256d vcx = _mm256_set1_pd(cx);
    const __m256d vcy = _mm256_set1_pd(cy);
    const __m256d vr2 = _mm256_set1_pd(range_sq);
    std::size_t count = 0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(&x[i]), vcx);
        const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(&y[i]), vcy);
        const __m256d d2 = _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
        unsigned mask = static_cast<unsigned>(_mm256_movemask_pd(_mm256_cmp_pd(d2, vr2, _CMP_LE_OQ)));
        while (mask != 0) {
            const unsigned lane = static_cast<unsigned>(__builtin_ctz(mask));
            out[count++] = static_cast<std::uint32_t>(i + lane);
            mask &= mask - 1;
        }
    }
    for (; i < n; ++i) {
        const double dx = x[i] - cx;
        const double dy = y[i] - cy;
        const double d2 = dx * dx + dy * dy;
        if (d2 <= range_sq) {
            out[count++] = static_cast<std::uint32_t>(i);
        }
    }
    return count;
}

#else

void positions_at(const LegArrays& legs, double t, std::span<double> x, std::span<double> y) {
    scalar::positions_at(legs, t, x, y);
}

std::size_t select_in_range(std::span<const double> x, std::span<const double> y, double cx,
                            double cy, double range_sq, std::span<std::uint32_t> out) {
    return scalar::select_in_range(x, y, cx, cy, range_sq, out);
}

#endif

}  // namespace manet::kernels::avx2
