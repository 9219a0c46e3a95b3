#pragma once

// Dense inner-loop kernels with a portable scalar reference and SIMD variants
// (AVX2+FMA on x86-64, NEON on AArch64). The variant is picked once at startup
// from CPU features; INDNET_SIMD=scalar in the environment forces the reference.

#include <cstddef>
#include <string_view>

namespace indnet::kernels {

template <typename T>
struct KernelTable {
    // sum_i a[i] * b[i]
    T (*dot)(const T* a, const T* b, std::size_t n) noexcept;
    // y[i] += alpha * x[i]
    void (*axpy)(T alpha, const T* x, T* y, std::size_t n) noexcept;
    // accum[i] += g[i]^2; param[i] -= lr * g[i] / (sqrt(accum[i]) + eps)
    void (*adagrad)(T* param, const T* grad, T* accum, T lr, T eps, std::size_t n) noexcept;
};

enum class Isa { scalar, avx2, neon };

std::string_view isa_name(Isa isa) noexcept;

/// Best ISA supported by the running CPU, ignoring the environment override.
Isa detect_isa() noexcept;

/// ISA currently used by active<T>().
Isa active_isa() noexcept;

/// Kernel table for a specific ISA. Returns the scalar table when the ISA is
/// not compiled in or not supported by this CPU.
template <typename T>
const KernelTable<T>& table(Isa isa) noexcept;

template <typename T>
const KernelTable<T>& active() noexcept;

/// Overrides the dispatch choice (tests and benchmarks).
void force_isa(Isa isa) noexcept;

// Convenience wrappers over the active table.
template <typename T>
inline T dot(const T* a, const T* b, std::size_t n) noexcept {
    return active<T>().dot(a, b, n);
}

template <typename T>
inline void axpy(T alpha, const T* x, T* y, std::size_t n) noexcept {
    active<T>().axpy(alpha, x, y, n);
}

template <typename T>
inline void adagrad(T* param, const T* grad, T* accum, T lr, T eps, std::size_t n) noexcept {
    active<T>().adagrad(param, grad, accum, lr, eps, n);
}

// C[m x n] += A[m x k] * B[k x n], row-major.
template <typename T>
void gemm_accumulate(const T* a, const T* b, T* c, std::size_t m, std::size_t k, std::size_t n) noexcept;

// y[m] = A[m x k] * x[k], row-major.
template <typename T>
void gemv(const T* a, const T* x, T* y, std::size_t m, std::size_t k) noexcept;

}  // namespace indnet::kernels
