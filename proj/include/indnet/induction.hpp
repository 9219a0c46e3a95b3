#pragma once

// Class-vector induction from a class's K support encodings: dynamic routing
// over transformed sample vectors, plus the sum and self-attention variants.

#include <span>
#include <vector>

#include "indnet/model.hpp"
#include "indnet/tape.hpp"

namespace indnet::induction {

/// x * |x| / (1 + |x|^2): keeps the direction, maps norm n to n^2 / (1 + n^2),
/// and is exactly zero at the origin.
template <typename T>
Var<T> squash(Var<T> x);

/// squash(W_s e + b_s).
template <typename T>
Var<T> transform(Var<T> sample, const InductionParams<T>& params);

/// Coupling coefficients of one class, one row per iteration.
template <typename T>
using CouplingLog = std::vector<std::vector<T>>;

/// Routing for one class. Logits start at zero; each iteration takes a
/// softmax over this class's K samples, forms the weighted sum, squashes it,
/// then adds each sample's agreement with the result to its logit.
template <typename T>
Var<T> route_class(std::span<const Var<T>> predictions, std::size_t iterations, CouplingLog<T>* log = nullptr);

/// route_class for every class. `predictions[i]` holds class i's K prediction vectors.
template <typename T>
std::vector<Var<T>> route(const std::vector<std::vector<Var<T>>>& predictions, std::size_t iterations,
                          std::vector<CouplingLog<T>>* logs = nullptr);

/// Transform every sample then route.
template <typename T>
std::vector<Var<T>> induce_routing(const std::vector<std::vector<Var<T>>>& samples, const InductionParams<T>& params,
                                   std::size_t iterations, std::vector<CouplingLog<T>>* logs = nullptr);

/// c_i = sum_j e_ij.
template <typename T>
std::vector<Var<T>> induce_sum(const std::vector<std::vector<Var<T>>>& samples);

/// c_i = attention-weighted sum of the class's samples, scored like the encoder's pooling.
template <typename T>
std::vector<Var<T>> induce_attention(const std::vector<std::vector<Var<T>>>& samples,
                                     const AttentionParams<T>& params);

}  // namespace indnet::induction
