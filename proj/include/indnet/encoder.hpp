#pragma once

// Text encoder: embedding lookup, bidirectional LSTM and self-attention pooling
// into a fixed 2u-dimensional vector. Texts are encoded one at a time at their
// true length, so no padding or masking is involved.

#include "indnet/embeddings.hpp"
#include "indnet/model.hpp"
#include "indnet/tape.hpp"

namespace indnet::encoder {

/// [T x d] rows of the table for each token id.
template <typename T>
Var<T> embed(Tape<T>& tape, const TokenizedText& text, const Parameter<T>& table);

/// One LSTM direction over the rows of `inputs` ([T x d]) from zero state.
/// Returns the T hidden states in input order; `reverse` reads the rows last to first.
template <typename T>
std::vector<Var<T>> lstm(Var<T> inputs, const LstmParams<T>& params, bool reverse);

/// [T x 2u]; row t is the forward state at t followed by the backward state at t.
template <typename T>
Var<T> bilstm(Var<T> embedded, const EncoderParams<T>& params);

/// softmax(score . tanh(projection * rows^T)) over the rows of `rows` ([T x n]).
template <typename T>
Var<T> attention_weights(Var<T> rows, const AttentionParams<T>& params);

/// e = sum_t a_t h_t over the rows of `hidden`.
template <typename T>
Var<T> attend(Var<T> hidden, const EncoderParams<T>& params);

/// embed -> bilstm -> attend.
template <typename T>
Var<T> encode(Tape<T>& tape, const TokenizedText& text, const Parameter<T>& table, const EncoderParams<T>& params);

}  // namespace indnet::encoder
