// Built with -mavx2 -mfma -ffp-contract=off; only reached when the CPU reports
// AVX2 and FMA.

#include <immintrin.h>

#include <cmath>

#include "kernels_impl.hpp"

namespace indnet::kernels::detail {
namespace {

inline float hsum(__m256 v) noexcept {
    __m128 lo = _mm256_castps256_ps128(v);
    __m128 hi = _mm256_extractf128_ps(v, 1);
    lo = _mm_add_ps(lo, hi);
    __m128 shuf = _mm_movehdup_ps(lo);
    __m128 sums = _mm_add_ps(lo, shuf);
    shuf = _mm_movehl_ps(shuf, sums);
    sums = _mm_add_ss(sums, shuf);
    return _mm_cvtss_f32(sums);
}

inline double hsum(__m256d v) noexcept {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d high64 = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, high64));
}

float dot_avx2(const float* a, const float* b, std::size_t n) noexcept {
    __m256 acc0 = _mm256_setzero_ps();
    __m256 acc1 = _mm256_setzero_ps();
    std::size_t i = 0;
    for (; i + 16 <= n; i += 16) {
        acc0 = _mm256_fmadd_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i), acc0);
        acc1 = _mm256_fmadd_ps(_mm256_loadu_ps(a + i + 8), _mm256_loadu_ps(b + i + 8), acc1);
    }
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i), acc0);
    }
    float acc = hsum(_mm256_add_ps(acc0, acc1));
    for (; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

double dot_avx2(const double* a, const double* b, std::size_t n) noexcept {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    }
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

void axpy_avx2(float alpha, const float* x, float* y, std::size_t n) noexcept {
    const __m256 va = _mm256_set1_ps(alpha);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        _mm256_storeu_ps(y + i, _mm256_fmadd_ps(va, _mm256_loadu_ps(x + i), _mm256_loadu_ps(y + i)));
    }
    for (; i < n; ++i) y[i] = std::fma(alpha, x[i], y[i]);
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) noexcept {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    }
    for (; i < n; ++i) y[i] = std::fma(alpha, x[i], y[i]);
}

// No FMA here: the update must match the scalar reference bit for bit.
void adagrad_avx2(float* param, const float* grad, float* accum, float lr, float eps,
                  std::size_t n) noexcept {
    const __m256 vlr = _mm256_set1_ps(lr);
    const __m256 veps = _mm256_set1_ps(eps);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256 g = _mm256_loadu_ps(grad + i);
        const __m256 acc = _mm256_add_ps(_mm256_loadu_ps(accum + i), _mm256_mul_ps(g, g));
        _mm256_storeu_ps(accum + i, acc);
        const __m256 step = _mm256_div_ps(_mm256_mul_ps(vlr, g), _mm256_add_ps(_mm256_sqrt_ps(acc), veps));
        _mm256_storeu_ps(param + i, _mm256_sub_ps(_mm256_loadu_ps(param + i), step));
    }
    for (; i < n; ++i) {
        const float g = grad[i];
        accum[i] += g * g;
        param[i] -= lr * g / (std::sqrt(accum[i]) + eps);
    }
}

void adagrad_avx2(double* param, const double* grad, double* accum, double lr, double eps,
                  std::size_t n) noexcept {
    const __m256d vlr = _mm256_set1_pd(lr);
    const __m256d veps = _mm256_set1_pd(eps);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d g = _mm256_loadu_pd(grad + i);
        const __m256d acc = _mm256_add_pd(_mm256_loadu_pd(accum + i), _mm256_mul_pd(g, g));
        _mm256_storeu_pd(accum + i, acc);
        const __m256d step = _mm256_div_pd(_mm256_mul_pd(vlr, g), _mm256_add_pd(_mm256_sqrt_pd(acc), veps));
        _mm256_storeu_pd(param + i, _mm256_sub_pd(_mm256_loadu_pd(param + i), step));
    }
    for (; i < n; ++i) {
        const double g = grad[i];
        accum[i] += g * g;
        param[i] -= lr * g / (std::sqrt(accum[i]) + eps);
    }
}

template <typename T>
T dot_fn(const T* a, const T* b, std::size_t n) noexcept {
    return dot_avx2(a, b, n);
}
template <typename T>
void axpy_fn(T alpha, const T* x, T* y, std::size_t n) noexcept {
    axpy_avx2(alpha, x, y, n);
}
template <typename T>
void adagrad_fn(T* param, const T* grad, T* accum, T lr, T eps, std::size_t n) noexcept {
    adagrad_avx2(param, grad, accum, lr, eps, n);
}

}  // namespace

template <typename T>
const KernelTable<T>& avx2_table() noexcept {
    static const KernelTable<T> table{&dot_fn<T>, &axpy_fn<T>, &adagrad_fn<T>};
    return table;
}

template const KernelTable<float>& avx2_table<float>() noexcept;
template const KernelTable<double>& avx2_table<double>() noexcept;

}  // namespace indnet::kernels::detail
