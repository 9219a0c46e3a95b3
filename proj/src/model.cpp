#include "indnet/model.hpp"

#include <cmath>

#include "indnet/errors.hpp"
#include "indnet/random.hpp"

namespace indnet {

std::string to_string(InductionKind kind) {
    switch (kind) {
        case InductionKind::routing: return "routing";
        case InductionKind::sum: return "sum";
        case InductionKind::attention: return "attention";
    }
    return "?";
}

std::string to_string(RelationKind kind) { return kind == RelationKind::ntn ? "ntn" : "cosine"; }

InductionKind parse_induction(const std::string& name) {
    if (name == "routing") return InductionKind::routing;
    if (name == "sum") return InductionKind::sum;
    if (name == "attention") return InductionKind::attention;
    throw ConfigError("unknown induction variant '" + name + "' (expected routing, sum or attention)");
}

RelationKind parse_relation(const std::string& name) {
    if (name == "ntn" || name == "relation") return RelationKind::ntn;
    if (name == "cosine") return RelationKind::cosine;
    throw ConfigError("unknown relation variant '" + name + "' (expected ntn or cosine)");
}

void ModelConfig::validate() const {
    auto positive = [](std::size_t v, const char* what) {
        if (v == 0) throw ConfigError(std::string(what) + " must be positive");
    };
    positive(vocab_rows, "vocabulary size");
    positive(embedding_dim, "embedding dimension");
    positive(hidden, "hidden size");
    positive(attention_dim, "attention dimension");
    positive(slices, "tensor slices");
    positive(max_length, "max length");
    if (iterations < 1 || iterations > 10) {
        throw ConfigError("routing iterations must be in 1..10, got " + std::to_string(iterations));
    }
}

template <typename T>
std::vector<Parameter<T>*> ModelParams<T>::all() {
    return {&embeddings,
            &encoder.forward.input_weights,
            &encoder.forward.recurrent_weights,
            &encoder.forward.bias,
            &encoder.backward.input_weights,
            &encoder.backward.recurrent_weights,
            &encoder.backward.bias,
            &encoder.attention.projection,
            &encoder.attention.score,
            &induction.weight,
            &induction.bias,
            &induction_attention.projection,
            &induction_attention.score,
            &relation.tensor,
            &relation.weight,
            &relation.bias};
}

template <typename T>
std::vector<const Parameter<T>*> ModelParams<T>::all() const {
    auto mutable_list = const_cast<ModelParams<T>*>(this)->all();
    return {mutable_list.begin(), mutable_list.end()};
}

template <typename T>
void ModelParams<T>::zero_grad() {
    for (Parameter<T>* p : all()) p->zero_grad();
}

template <typename T>
void ModelParams<T>::mask_oov_grad() {
    const std::size_t d = config.embedding_dim;
    if (embeddings.grad.size() != embeddings.value.size()) return;
    std::fill(embeddings.grad.end() - static_cast<std::ptrdiff_t>(d), embeddings.grad.end(), T(0));
}

template <typename T>
ModelParams<T> make_params(const ModelConfig& c) {
    c.validate();
    const std::size_t d = c.embedding_dim, u = c.hidden, two_u = 2 * u, da = c.attention_dim, h = c.slices;
    ModelParams<T> p;
    p.config = c;
    p.embeddings = Parameter<T>("embedding.table", Shape{c.vocab_rows, d}, c.train_embeddings);
    auto lstm = [&](const std::string& prefix) {
        return LstmParams<T>{Parameter<T>(prefix + ".input_weights", Shape{4 * u, d}),
                             Parameter<T>(prefix + ".recurrent_weights", Shape{4 * u, u}),
                             Parameter<T>(prefix + ".bias", Shape{4 * u})};
    };
    auto attention = [&](const std::string& prefix) {
        return AttentionParams<T>{Parameter<T>(prefix + ".projection", Shape{da, two_u}),
                                  Parameter<T>(prefix + ".score", Shape{da})};
    };
    p.encoder.forward = lstm("encoder.forward");
    p.encoder.backward = lstm("encoder.backward");
    p.encoder.attention = attention("encoder.attention");
    p.induction.weight = Parameter<T>("induction.weight", Shape{two_u, two_u});
    p.induction.bias = Parameter<T>("induction.bias", Shape{two_u});
    p.induction_attention = attention("induction_attention");
    p.relation.tensor = Parameter<T>("relation.tensor", Shape{h * two_u, two_u});
    p.relation.weight = Parameter<T>("relation.weight", Shape{h});
    p.relation.bias = Parameter<T>("relation.bias", Shape{1});
    return p;
}

template <typename T>
ModelParams<T> init_params(const ModelConfig& config, std::span<const float> embedding_matrix, std::uint64_t seed) {
    ModelParams<T> p = make_params<T>(config);
    if (embedding_matrix.size() != p.embeddings.value.size()) {
        throw DimensionError("embedding matrix has " + std::to_string(embedding_matrix.size()) +
                             " values, expected " + p.embeddings.shape.str());
    }
    for (std::size_t i = 0; i < embedding_matrix.size(); ++i) p.embeddings.value[i] = embedding_matrix[i];
    const std::size_t d = config.embedding_dim;
    std::fill(p.embeddings.value.end() - static_cast<std::ptrdiff_t>(d), p.embeddings.value.end(), T(0));

    Random rng(seed);
    auto uniform = [&rng](Parameter<T>& param, double bound) {
        for (T& v : param.value) v = static_cast<T>(rng.uniform(-bound, bound));
    };
    const std::size_t u = config.hidden;
    const double lstm_bound = 1.0 / std::sqrt(static_cast<double>(u));
    for (LstmParams<T>* dir : {&p.encoder.forward, &p.encoder.backward}) {
        uniform(dir->input_weights, lstm_bound);
        uniform(dir->recurrent_weights, lstm_bound);
        std::fill(dir->bias.value.begin() + static_cast<std::ptrdiff_t>(u),
                  dir->bias.value.begin() + static_cast<std::ptrdiff_t>(2 * u), T(1));
    }
    const double two_u = static_cast<double>(2 * u);
    for (AttentionParams<T>* att : {&p.encoder.attention, &p.induction_attention}) {
        uniform(att->projection, 1.0 / std::sqrt(two_u));
        uniform(att->score, 1.0 / std::sqrt(static_cast<double>(config.attention_dim)));
    }
    uniform(p.induction.weight, 1.0 / std::sqrt(two_u));
    uniform(p.relation.tensor, 1.0 / two_u);
    uniform(p.relation.weight, 1.0 / two_u);
    return p;
}

template <typename To, typename From>
ModelParams<To> convert_params(const ModelParams<From>& params) {
    ModelParams<To> out = make_params<To>(params.config);
    auto src = params.all();
    auto dst = out.all();
    for (std::size_t i = 0; i < src.size(); ++i) *dst[i] = convert<To>(*src[i]);
    return out;
}

template struct ModelParams<float>;
template struct ModelParams<double>;
template ModelParams<float> make_params<float>(const ModelConfig&);
template ModelParams<double> make_params<double>(const ModelConfig&);
template ModelParams<float> init_params<float>(const ModelConfig&, std::span<const float>, std::uint64_t);
template ModelParams<double> init_params<double>(const ModelConfig&, std::span<const float>, std::uint64_t);
template ModelParams<double> convert_params<double, float>(const ModelParams<float>&);
template ModelParams<float> convert_params<float, double>(const ModelParams<double>&);
template ModelParams<float> convert_params<float, float>(const ModelParams<float>&);

}  // namespace indnet
