#include "indnet/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

#include "kernels_impl.hpp"

namespace indnet::kernels {
namespace {

bool cpu_has_avx2() noexcept {
#if defined(INDNET_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Isa initial_isa() noexcept {
    if (const char* env = std::getenv("INDNET_SIMD"); env != nullptr && std::strcmp(env, "scalar") == 0) {
        return Isa::scalar;
    }
    return detect_isa();
}

std::atomic<Isa>& current() noexcept {
    static std::atomic<Isa> isa{initial_isa()};
    return isa;
}

}  // namespace

std::string_view isa_name(Isa isa) noexcept {
    switch (isa) {
        case Isa::avx2: return "avx2";
        case Isa::neon: return "neon";
        case Isa::scalar: break;
    }
    return "scalar";
}

Isa detect_isa() noexcept {
#if defined(INDNET_HAVE_NEON)
    return Isa::neon;
#else
    return cpu_has_avx2() ? Isa::avx2 : Isa::scalar;
#endif
}

Isa active_isa() noexcept { return current().load(std::memory_order_relaxed); }

void force_isa(Isa isa) noexcept {
    if (isa != Isa::scalar && isa != detect_isa()) isa = Isa::scalar;
    current().store(isa, std::memory_order_relaxed);
}

template <typename T>
const KernelTable<T>& table(Isa isa) noexcept {
    switch (isa) {
#if defined(INDNET_HAVE_AVX2)
        case Isa::avx2:
            if (cpu_has_avx2()) return detail::avx2_table<T>();
            break;
#endif
#if defined(INDNET_HAVE_NEON)
        case Isa::neon: return detail::neon_table<T>();
#endif
        default: break;
    }
    return detail::scalar_table<T>();
}

template <typename T>
const KernelTable<T>& active() noexcept {
    return table<T>(active_isa());
}

template <typename T>
void gemm_accumulate(const T* a, const T* b, T* c, std::size_t m, std::size_t k, std::size_t n) noexcept {
    const auto& kt = active<T>();
    for (std::size_t i = 0; i < m; ++i) {
        T* crow = c + i * n;
        for (std::size_t p = 0; p < k; ++p) {
            const T aip = a[i * k + p];
            if (aip != T(0)) kt.axpy(aip, b + p * n, crow, n);
        }
    }
}

template <typename T>
void gemv(const T* a, const T* x, T* y, std::size_t m, std::size_t k) noexcept {
    const auto& kt = active<T>();
    for (std::size_t i = 0; i < m; ++i) y[i] = kt.dot(a + i * k, x, k);
}

template const KernelTable<float>& table<float>(Isa) noexcept;
template const KernelTable<double>& table<double>(Isa) noexcept;
template const KernelTable<float>& active<float>() noexcept;
template const KernelTable<double>& active<double>() noexcept;
template void gemm_accumulate<float>(const float*, const float*, float*, std::size_t, std::size_t,
                                     std::size_t) noexcept;
template void gemm_accumulate<double>(const double*, const double*, double*, std::size_t, std::size_t,
                                      std::size_t) noexcept;
template void gemv<float>(const float*, const float*, float*, std::size_t, std::size_t) noexcept;
template void gemv<double>(const double*, const double*, double*, std::size_t, std::size_t) noexcept;

}  // namespace indnet::kernels
