#include "indnet/relation.hpp"

#include "indnet/log.hpp"
#include "indnet/ops.hpp"

namespace indnet::relation {

template <typename T>
Var<T> project_query(Var<T> query, const RelationParams<T>& params) {
    Tape<T>& tape = query.tape();
    const std::size_t h = params.slices();
    const std::size_t width = params.tensor.shape[1];
    if (query.shape() != Shape{width}) {
        throw DimensionError("ntn: query " + query.shape().str() + " does not match tensor slices " +
                             params.tensor.shape.str());
    }
    return ops::reshape(ops::matvec(tape.parameter(params.tensor), query), Shape{h, width});
}

template <typename T>
Var<T> bilinear(Var<T> class_vector, Var<T> projected_query) {
    if (class_vector.shape() != Shape{projected_query.shape()[1]}) {
        throw DimensionError("ntn: class vector " + class_vector.shape().str() + " does not match " +
                             projected_query.shape().str());
    }
    return ops::matvec(projected_query, class_vector);
}

template <typename T>
Var<T> ntn(Var<T> class_vector, Var<T> query, const RelationParams<T>& params) {
    return ops::relu(bilinear(class_vector, project_query(query, params)));
}

template <typename T>
Var<T> relation_score(Var<T> relation_vector, const RelationParams<T>& params) {
    Tape<T>& tape = relation_vector.tape();
    Var<T> logit = ops::add(ops::dot(tape.parameter(params.weight), relation_vector), tape.parameter(params.bias));
    return ops::sigmoid(logit);
}

template <typename T>
Var<T> cosine_score(Var<T> class_vector, Var<T> query) {
    Var<T> nc = ops::norm(class_vector);
    Var<T> nq = ops::norm(query);
    if (nc.item() == T(0) || nq.item() == T(0)) {
        log::warn("cosine score with a zero vector; scoring 0");
        return class_vector.tape().scalar(T(0));
    }
    return ops::div(ops::dot(class_vector, query), ops::mul(nc, nq));
}

#define INDNET_INSTANTIATE_RELATION(T)                                         \
    template Var<T> project_query(Var<T>, const RelationParams<T>&);           \
    template Var<T> bilinear(Var<T>, Var<T>);                                  \
    template Var<T> ntn(Var<T>, Var<T>, const RelationParams<T>&);             \
    template Var<T> relation_score(Var<T>, const RelationParams<T>&);          \
    template Var<T> cosine_score(Var<T>, Var<T>);

INDNET_INSTANTIATE_RELATION(float)
INDNET_INSTANTIATE_RELATION(double)

}  // namespace indnet::relation
