#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "manet/kernels.hpp"

namespace manet::kernels {

namespace {

constexpr KernelTable kScalar{Isa::Scalar, &scalar::positions_at, &scalar::select_in_range};
constexpr KernelTable kAvx2{Isa::Avx2, &avx2::positions_at, &avx2::select_in_range};

Isa initial_isa() {
    if (const char* env = std::getenv("MANETSIM_KERNEL")) {
        const std::string want(env);
        if (want == "scalar") return Isa::Scalar;
        if (want == "avx2" && isa_available(Isa::Avx2)) return Isa::Avx2;
    }
    return best_available_isa();
}

std::atomic<const KernelTable*>& active_slot() {
    static std::atomic<const KernelTable*> slot{&table_for(initial_isa())};
    return slot;
}

}  // namespace

std::string_view to_string(Isa isa) noexcept {
    switch (isa) {
        case Isa::Scalar: return "scalar";
        case Isa::Avx2: return "avx2";
    }
    return "?";
}

bool isa_available(Isa isa) noexcept {
    switch (isa) {
        case Isa::Scalar:
            return true;
        case Isa::Avx2:
#if (defined(__x86_64__) || defined(_M_X64)) && (defined(__GNUC__) || defined(__clang__))
            return __builtin_cpu_supports("avx2");
#else
            return false;
#endif
    }
    return false;
}

Isa best_available_isa() noexcept {
    return isa_available(Isa::Avx2) ? Isa::Avx2 : Isa::Scalar;
}

const KernelTable& table_for(Isa isa) {
    return isa == Isa::Avx2 ? kAvx2 : kScalar;
}

const KernelTable& active() {
    return *active_slot().load(std::memory_order_acquire);
}

void select_isa(Isa isa) {
    if (!isa_available(isa)) {
        throw std::invalid_argument("kernel ISA not supported on this CPU: " +
                                    std::string(to_string(isa)));
    }
    active_slot().store(&table_for(isa), std::memory_order_release);
}

}  // namespace manet::kernels
