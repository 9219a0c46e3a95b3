#pragma once

#include "indnet/model.hpp"
#include "indnet/tape.hpp"

namespace indnet::relation {

/// M^k q for every slice, as [h x 2u]. Computed once per query and shared across classes.
template <typename T>
Var<T> project_query(Var<T> query, const RelationParams<T>& params);

/// c^T M^k q for each slice k, before the activation.
template <typename T>
Var<T> bilinear(Var<T> class_vector, Var<T> projected_query);

/// v_k = relu(c^T M^k q).
template <typename T>
Var<T> ntn(Var<T> class_vector, Var<T> query, const RelationParams<T>& params);

/// r = sigmoid(W_r . v + b_r), in (0, 1).
template <typename T>
Var<T> relation_score(Var<T> relation_vector, const RelationParams<T>& params);

/// c . q / (|c| |q|). A zero operand scores 0 and logs a warning.
template <typename T>
Var<T> cosine_score(Var<T> class_vector, Var<T> query);

}  // namespace indnet::relation
