#pragma once

// Differentiable primitives. Binary elementwise ops require identical shapes;
// the only broadcast is multiplication by a scalar.

#include <cstddef>
#include <span>
#include <vector>

#include "indnet/tape.hpp"

namespace indnet::ops {

enum class Elementwise { add, sub, mul, div, tanh, sigmoid, relu, scale };

template <typename T> Var<T> matmul(Var<T> a, Var<T> b);           // [m x k] * [k x n]
template <typename T> Var<T> matvec(Var<T> a, Var<T> x);           // [m x k] * [k]
template <typename T> Var<T> transpose(Var<T> a);                  // [m x n] -> [n x m]

template <typename T> Var<T> add(Var<T> a, Var<T> b);
template <typename T> Var<T> sub(Var<T> a, Var<T> b);
template <typename T> Var<T> mul(Var<T> a, Var<T> b);
template <typename T> Var<T> div(Var<T> a, Var<T> b);
template <typename T> Var<T> scale(Var<T> x, T factor);
template <typename T> Var<T> scale_by(Var<T> x, Var<T> factor);     // factor has shape {1}
template <typename T> Var<T> add_constant(Var<T> x, T c);

template <typename T> Var<T> tanh(Var<T> x);
template <typename T> Var<T> sigmoid(Var<T> x);
template <typename T> Var<T> relu(Var<T> x);

/// Dispatches the unary and binary elementwise kinds; `scale` reads `factor`.
template <typename T>
Var<T> elementwise(Elementwise kind, Var<T> a, Var<T> b = {}, T factor = T(1));

/// Softmax of a nonempty vector, max-shifted before exponentiation.
template <typename T> Var<T> softmax(Var<T> x);

template <typename T> Var<T> dot(Var<T> a, Var<T> b);   // -> {1}
template <typename T> Var<T> sum(Var<T> x);             // -> {1}, sequential in index order
/// Euclidean norm; the gradient at the origin is taken as zero.
template <typename T> Var<T> norm(Var<T> x);            // -> {1}

template <typename T> Var<T> concat(std::span<const Var<T>> parts);      // rank-1 pieces
template <typename T> Var<T> stack_rows(std::span<const Var<T>> rows);   // n equal vectors -> [n x d]
template <typename T> Var<T> row(Var<T> m, std::size_t index);
template <typename T> Var<T> slice(Var<T> x, std::size_t offset, std::size_t length);
template <typename T> Var<T> reshape(Var<T> x, Shape shape);

/// Rows of a [V x d] table selected by id, as [ids.size() x d].
template <typename T> Var<T> gather_rows(Var<T> table, std::vector<std::size_t> ids);

}  // namespace indnet::ops
