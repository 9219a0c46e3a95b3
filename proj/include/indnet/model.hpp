#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "indnet/tensor.hpp"

namespace indnet {

enum class InductionKind { routing, sum, attention };
enum class RelationKind { ntn, cosine };

std::string to_string(InductionKind kind);
std::string to_string(RelationKind kind);
InductionKind parse_induction(const std::string& name);
RelationKind parse_relation(const std::string& name);

struct ModelConfig {
    std::size_t vocab_rows = 1;  // including the OOV row
    std::size_t embedding_dim = 300;
    std::size_t hidden = 128;         // u, per LSTM direction
    std::size_t attention_dim = 64;   // d_a
    std::size_t slices = 100;         // h
    std::size_t iterations = 3;
    std::size_t max_length = 64;
    InductionKind induction = InductionKind::routing;
    RelationKind relation = RelationKind::ntn;
    bool train_embeddings = false;

    std::size_t encoding_dim() const noexcept { return 2 * hidden; }
    void validate() const;
};

/// One LSTM direction with fused gates in the order input, forget, output, candidate.
template <typename T>
struct LstmParams {
    Parameter<T> input_weights;      // [4u x d]
    Parameter<T> recurrent_weights;  // [4u x u]
    Parameter<T> bias;               // [4u]
};

/// Scoring weights of the form softmax(w2 . tanh(W1 X^T)).
template <typename T>
struct AttentionParams {
    Parameter<T> projection;  // [d_a x 2u]
    Parameter<T> score;       // [d_a]
};

template <typename T>
struct EncoderParams {
    LstmParams<T> forward;
    LstmParams<T> backward;
    AttentionParams<T> attention;

    std::size_t hidden() const { return forward.recurrent_weights.shape[1]; }
};

template <typename T>
struct InductionParams {
    Parameter<T> weight;  // W_s [2u x 2u]
    Parameter<T> bias;    // b_s [2u]
};

template <typename T>
struct RelationParams {
    Parameter<T> tensor;  // h slices of [2u x 2u] stacked as [h*2u x 2u]
    Parameter<T> weight;  // W_r [h]
    Parameter<T> bias;    // b_r [1]

    std::size_t slices() const { return weight.shape[0]; }
};

template <typename T>
struct ModelParams {
    ModelConfig config;
    Parameter<T> embeddings;  // [V x d], OOV row last
    EncoderParams<T> encoder;
    InductionParams<T> induction;
    AttentionParams<T> induction_attention;
    RelationParams<T> relation;

    /// Every parameter, in a fixed order. Names are unique.
    std::vector<Parameter<T>*> all();
    std::vector<const Parameter<T>*> all() const;

    void zero_grad();
    /// Clears the gradient of the OOV embedding row so it stays zero.
    void mask_oov_grad();
};

/// Zero-filled parameters with the shapes implied by `config`.
template <typename T>
ModelParams<T> make_params(const ModelConfig& config);

/// Random initialization. `embedding_matrix` (vocab_rows x embedding_dim)
/// fills the table; its last row is forced to zero.
template <typename T>
ModelParams<T> init_params(const ModelConfig& config, std::span<const float> embedding_matrix, std::uint64_t seed);

template <typename To, typename From>
ModelParams<To> convert_params(const ModelParams<From>& params);

}  // namespace indnet
