#include <cmath>

#include "kernels_impl.hpp"

namespace indnet::kernels::detail {
namespace {

template <typename T>
T dot_scalar(const T* a, const T* b, std::size_t n) noexcept {
    T acc = 0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

template <typename T>
void axpy_scalar(T alpha, const T* x, T* y, std::size_t n) noexcept {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

template <typename T>
void adagrad_scalar(T* param, const T* grad, T* accum, T lr, T eps, std::size_t n) noexcept {
    for (std::size_t i = 0; i < n; ++i) {
        const T g = grad[i];
        accum[i] += g * g;
        param[i] -= lr * g / (std::sqrt(accum[i]) + eps);
    }
}

}  // namespace

template <typename T>
const KernelTable<T>& scalar_table() noexcept {
    static const KernelTable<T> table{&dot_scalar<T>, &axpy_scalar<T>, &adagrad_scalar<T>};
    return table;
}

template const KernelTable<float>& scalar_table<float>() noexcept;
template const KernelTable<double>& scalar_table<double>() noexcept;

}  // namespace indnet::kernels::detail
