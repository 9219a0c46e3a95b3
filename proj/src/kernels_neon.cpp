#include <arm_neon.h>

#include <cmath>

#include "kernels_impl.hpp"

namespace indnet::kernels::detail {
namespace {

float dot_neon(const float* a, const float* b, std::size_t n) noexcept {
    float32x4_t acc0 = vdupq_n_f32(0.0f);
    float32x4_t acc1 = vdupq_n_f32(0.0f);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = vfmaq_f32(acc0, vld1q_f32(a + i), vld1q_f32(b + i));
        acc1 = vfmaq_f32(acc1, vld1q_f32(a + i + 4), vld1q_f32(b + i + 4));
    }
    float acc = vaddvq_f32(vaddq_f32(acc0, acc1));
    for (; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

double dot_neon(const double* a, const double* b, std::size_t n) noexcept {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
        acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
    }
    double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
    for (; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

void axpy_neon(float alpha, const float* x, float* y, std::size_t n) noexcept {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) vst1q_f32(y + i, vfmaq_n_f32(vld1q_f32(y + i), vld1q_f32(x + i), alpha));
    for (; i < n; ++i) y[i] = std::fma(alpha, x[i], y[i]);
}

void axpy_neon(double alpha, const double* x, double* y, std::size_t n) noexcept {
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_n_f64(vld1q_f64(y + i), vld1q_f64(x + i), alpha));
    for (; i < n; ++i) y[i] = std::fma(alpha, x[i], y[i]);
}

void adagrad_neon(float* param, const float* grad, float* accum, float lr, float eps,
                  std::size_t n) noexcept {
    const float32x4_t vlr = vdupq_n_f32(lr);
    const float32x4_t veps = vdupq_n_f32(eps);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const float32x4_t g = vld1q_f32(grad + i);
        const float32x4_t acc = vaddq_f32(vld1q_f32(accum + i), vmulq_f32(g, g));
        vst1q_f32(accum + i, acc);
        const float32x4_t step = vdivq_f32(vmulq_f32(vlr, g), vaddq_f32(vsqrtq_f32(acc), veps));
        vst1q_f32(param + i, vsubq_f32(vld1q_f32(param + i), step));
    }
    for (; i < n; ++i) {
        const float g = grad[i];
        accum[i] += g * g;
        param[i] -= lr * g / (std::sqrt(accum[i]) + eps);
    }
}

void adagrad_neon(double* param, const double* grad, double* accum, double lr, double eps,
                  std::size_t n) noexcept {
    const float64x2_t vlr = vdupq_n_f64(lr);
    const float64x2_t veps = vdupq_n_f64(eps);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t g = vld1q_f64(grad + i);
        const float64x2_t acc = vaddq_f64(vld1q_f64(accum + i), vmulq_f64(g, g));
        vst1q_f64(accum + i, acc);
        const float64x2_t step = vdivq_f64(vmulq_f64(vlr, g), vaddq_f64(vsqrtq_f64(acc), veps));
        vst1q_f64(param + i, vsubq_f64(vld1q_f64(param + i), step));
    }
    for (; i < n; ++i) {
        const double g = grad[i];
        accum[i] += g * g;
        param[i] -= lr * g / (std::sqrt(accum[i]) + eps);
    }
}

template <typename T>
T dot_fn(const T* a, const T* b, std::size_t n) noexcept {
    return dot_neon(a, b, n);
}
template <typename T>
void axpy_fn(T alpha, const T* x, T* y, std::size_t n) noexcept {
    axpy_neon(alpha, x, y, n);
}
template <typename T>
void adagrad_fn(T* param, const T* grad, T* accum, T lr, T eps, std::size_t n) noexcept {
    adagrad_neon(param, grad, accum, lr, eps, n);
}

}  // namespace

template <typename T>
const KernelTable<T>& neon_table() noexcept {
    static const KernelTable<T> table{&dot_fn<T>, &axpy_fn<T>, &adagrad_fn<T>};
    return table;
}

template const KernelTable<float>& neon_table<float>() noexcept;
template const KernelTable<double>& neon_table<double>() noexcept;

}  // namespace indnet::kernels::detail
