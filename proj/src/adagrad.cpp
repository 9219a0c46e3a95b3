#include "indnet/adagrad.hpp"

#include <cmath>
#include <string>

#include "indnet/errors.hpp"
#include "indnet/kernels.hpp"

namespace indnet {

template <typename T>
Adagrad<T>::Adagrad(AdagradConfig config) : config_(config) {
    if (!(config_.learning_rate > 0.0) || !std::isfinite(config_.learning_rate)) {
        throw ConfigError("adagrad: learning rate must be positive, got " + std::to_string(config_.learning_rate));
    }
    if (!(config_.epsilon >= 0.0)) {
        throw ConfigError("adagrad: epsilon must be nonnegative, got " + std::to_string(config_.epsilon));
    }
}

template <typename T>
void Adagrad<T>::step(std::span<Parameter<T>* const> params) {
    if (accum_.empty()) {
        accum_.reserve(params.size());
        for (const Parameter<T>* p : params) accum_.emplace_back(p->value.size(), T(0));
    }
    if (accum_.size() != params.size()) {
        throw ContractError("adagrad: bound to " + std::to_string(accum_.size()) + " parameters, given " +
                            std::to_string(params.size()));
    }
    const T lr = static_cast<T>(config_.learning_rate);
    const T eps = static_cast<T>(config_.epsilon);
    for (std::size_t i = 0; i < params.size(); ++i) {
        Parameter<T>& p = *params[i];
        if (!p.trainable) continue;
        if (p.grad.size() != p.value.size() || accum_[i].size() != p.value.size()) {
            throw DimensionError("adagrad: parameter " + p.name + " is not aligned with its gradient/accumulator");
        }
        kernels::adagrad(p.value.data(), p.grad.data(), accum_[i].data(), lr, eps, p.value.size());
    }
}

template class Adagrad<float>;
template class Adagrad<double>;

}  // namespace indnet
