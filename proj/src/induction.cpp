#include "indnet/induction.hpp"

#include <string>

#include "indnet/encoder.hpp"
#include "indnet/ops.hpp"

namespace indnet::induction {
namespace {

template <typename T>
void require_nonempty(const std::vector<std::vector<Var<T>>>& samples, const char* op) {
    if (samples.empty()) throw ContractError(std::string(op) + ": no classes");
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (samples[i].empty()) throw ContractError(std::string(op) + ": class " + std::to_string(i) + " is empty");
    }
}

}  // namespace

template <typename T>
Var<T> squash(Var<T> x) {
    Var<T> length = ops::norm(x);
    Var<T> denom = ops::add_constant(ops::dot(x, x), T(1));
    return ops::scale_by(x, ops::div(length, denom));
}

template <typename T>
Var<T> transform(Var<T> sample, const InductionParams<T>& params) {
    Tape<T>& tape = sample.tape();
    return squash(ops::add(ops::matvec(tape.parameter(params.weight), sample), tape.parameter(params.bias)));
}

template <typename T>
Var<T> route_class(std::span<const Var<T>> predictions, std::size_t iterations, CouplingLog<T>* log) {
    if (predictions.empty()) throw ContractError("route: class has no samples");
    if (iterations < 1) throw ConfigError("route: iterations must be at least 1");
    Tape<T>& tape = predictions.front().tape();
    const std::size_t k = predictions.size();

    Var<T> stacked = ops::stack_rows(predictions);  // [K x 2u]
    Var<T> stacked_t = ops::transpose(stacked);
    Var<T> logits = tape.zeros(Shape{k});
    Var<T> class_vector;
    for (std::size_t it = 0; it < iterations; ++it) {
        Var<T> coupling = ops::softmax(logits);
        if (log != nullptr) log->push_back(coupling.to_vector());
        class_vector = squash(ops::matvec(stacked_t, coupling));
        logits = ops::add(logits, ops::matvec(stacked, class_vector));
    }
    return class_vector;
}

template <typename T>
std::vector<Var<T>> route(const std::vector<std::vector<Var<T>>>& predictions, std::size_t iterations,
                          std::vector<CouplingLog<T>>* logs) {
    require_nonempty(predictions, "route");
    if (iterations < 1) throw ConfigError("route: iterations must be at least 1");
    if (logs != nullptr) logs->assign(predictions.size(), {});
    std::vector<Var<T>> out;
    out.reserve(predictions.size());
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        out.push_back(route_class<T>(predictions[i], iterations, logs != nullptr ? &(*logs)[i] : nullptr));
    }
    return out;
}

template <typename T>
std::vector<Var<T>> induce_routing(const std::vector<std::vector<Var<T>>>& samples, const InductionParams<T>& params,
                                   std::size_t iterations, std::vector<CouplingLog<T>>* logs) {
    require_nonempty(samples, "induce_routing");
    std::vector<std::vector<Var<T>>> predictions(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        for (const Var<T>& e : samples[i]) predictions[i].push_back(transform(e, params));
    }
    return route(predictions, iterations, logs);
}

template <typename T>
std::vector<Var<T>> induce_sum(const std::vector<std::vector<Var<T>>>& samples) {
    require_nonempty(samples, "induce_sum");
    std::vector<Var<T>> out;
    for (const auto& cls : samples) {
        Var<T> acc = cls.front();
        for (std::size_t j = 1; j < cls.size(); ++j) acc = ops::add(acc, cls[j]);
        out.push_back(acc);
    }
    return out;
}

template <typename T>
std::vector<Var<T>> induce_attention(const std::vector<std::vector<Var<T>>>& samples,
                                     const AttentionParams<T>& params) {
    require_nonempty(samples, "induce_attention");
    std::vector<Var<T>> out;
    for (const auto& cls : samples) {
        Var<T> stacked = ops::stack_rows<T>(cls);
        Var<T> weights = encoder::attention_weights(stacked, params);
        out.push_back(ops::matvec(ops::transpose(stacked), weights));
    }
    return out;
}

#define INDNET_INSTANTIATE_INDUCTION(T)                                                                        \
    template Var<T> squash(Var<T>);                                                                            \
    template Var<T> transform(Var<T>, const InductionParams<T>&);                                              \
    template Var<T> route_class(std::span<const Var<T>>, std::size_t, CouplingLog<T>*);                        \
    template std::vector<Var<T>> route(const std::vector<std::vector<Var<T>>>&, std::size_t,                   \
                                       std::vector<CouplingLog<T>>*);                                          \
    template std::vector<Var<T>> induce_routing(const std::vector<std::vector<Var<T>>>&,                       \
                                                const InductionParams<T>&, std::size_t,                        \
                                                std::vector<CouplingLog<T>>*);                                 \
    template std::vector<Var<T>> induce_sum(const std::vector<std::vector<Var<T>>>&);                          \
    template std::vector<Var<T>> induce_attention(const std::vector<std::vector<Var<T>>>&,                     \
                                                  const AttentionParams<T>&);

INDNET_INSTANTIATE_INDUCTION(float)
INDNET_INSTANTIATE_INDUCTION(double)

}  // namespace indnet::induction
