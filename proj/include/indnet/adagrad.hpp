#pragma once

#include <span>
#include <vector>

#include "indnet/tensor.hpp"

namespace indnet {

struct AdagradConfig {
    double learning_rate = 0.01;
    double epsilon = 1e-8;
};

/// Per-parameter squared-gradient accumulators. Parameters are bound by
/// position: every step() must pass the same list in the same order.
template <typename T>
class Adagrad {
  public:
    explicit Adagrad(AdagradConfig config);

    const AdagradConfig& config() const noexcept { return config_; }

    /// accum += g^2; param -= lr * g / (sqrt(accum) + eps). Frozen parameters are skipped.
    void step(std::span<Parameter<T>* const> params);

    std::span<const std::vector<T>> accumulators() const noexcept { return accum_; }

  private:
    AdagradConfig config_;
    std::vector<std::vector<T>> accum_;
};

}  // namespace indnet
