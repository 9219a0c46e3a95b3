#include "indnet/encoder.hpp"

#include "indnet/ops.hpp"

namespace indnet::encoder {

template <typename T>
Var<T> embed(Tape<T>& tape, const TokenizedText& text, const Parameter<T>& table) {
    if (text.ids.empty()) throw ContractError("embed: empty text");
    return ops::gather_rows(tape.parameter(table), text.ids);
}

template <typename T>
std::vector<Var<T>> lstm(Var<T> inputs, const LstmParams<T>& params, bool reverse) {
    Tape<T>& tape = inputs.tape();
    const std::size_t steps = inputs.shape()[0];
    const std::size_t u = params.recurrent_weights.shape[1];
    if (params.input_weights.shape[1] != inputs.shape()[1]) {
        throw DimensionError("lstm: input width " + inputs.shape().str() + " does not match weights " +
                             params.input_weights.shape.str());
    }
    Var<T> w = tape.parameter(params.input_weights);
    Var<T> rec = tape.parameter(params.recurrent_weights);
    Var<T> bias = tape.parameter(params.bias);

    // Input contributions for all steps at once: [T x 4u], flattened.
    Var<T> projected = ops::matmul(inputs, ops::transpose(w));
    projected = ops::reshape(projected, Shape{steps * 4 * u});

    Var<T> h = tape.zeros(Shape{u});
    Var<T> c = tape.zeros(Shape{u});
    std::vector<Var<T>> states(steps);
    for (std::size_t k = 0; k < steps; ++k) {
        const std::size_t t = reverse ? steps - 1 - k : k;
        Var<T> z = ops::add(ops::add(ops::slice(projected, t * 4 * u, 4 * u), ops::matvec(rec, h)), bias);
        Var<T> in_gate = ops::sigmoid(ops::slice(z, 0, u));
        Var<T> forget_gate = ops::sigmoid(ops::slice(z, u, u));
        Var<T> out_gate = ops::sigmoid(ops::slice(z, 2 * u, u));
        Var<T> candidate = ops::tanh(ops::slice(z, 3 * u, u));
        c = ops::add(ops::mul(forget_gate, c), ops::mul(in_gate, candidate));
        h = ops::mul(out_gate, ops::tanh(c));
        states[t] = h;
    }
    return states;
}

template <typename T>
Var<T> bilstm(Var<T> embedded, const EncoderParams<T>& params) {
    if (embedded.shape().rank() != 2) throw DimensionError("bilstm: expected [T x d], got " + embedded.shape().str());
    std::vector<Var<T>> fwd = lstm(embedded, params.forward, false);
    std::vector<Var<T>> bwd = lstm(embedded, params.backward, true);
    std::vector<Var<T>> rows;
    rows.reserve(fwd.size());
    for (std::size_t t = 0; t < fwd.size(); ++t) {
        const Var<T> halves[] = {fwd[t], bwd[t]};
        rows.push_back(ops::concat<T>(halves));
    }
    return ops::stack_rows<T>(rows);
}

template <typename T>
Var<T> attention_weights(Var<T> rows, const AttentionParams<T>& params) {
    Tape<T>& tape = rows.tape();
    Var<T> hidden = ops::tanh(ops::matmul(tape.parameter(params.projection), ops::transpose(rows)));  // [d_a x T]
    Var<T> scores = ops::matvec(ops::transpose(hidden), tape.parameter(params.score));             // [T]
    return ops::softmax(scores);
}

template <typename T>
Var<T> attend(Var<T> hidden, const EncoderParams<T>& params) {
    return ops::matvec(ops::transpose(hidden), attention_weights(hidden, params.attention));
}

template <typename T>
Var<T> encode(Tape<T>& tape, const TokenizedText& text, const Parameter<T>& table, const EncoderParams<T>& params) {
    return attend(bilstm(embed(tape, text, table), params), params);
}

#define INDNET_INSTANTIATE_ENCODER(T)                                                             \
    template Var<T> embed(Tape<T>&, const TokenizedText&, const Parameter<T>&);                   \
    template std::vector<Var<T>> lstm(Var<T>, const LstmParams<T>&, bool);                        \
    template Var<T> bilstm(Var<T>, const EncoderParams<T>&);                                      \
    template Var<T> attention_weights(Var<T>, const AttentionParams<T>&);                         \
    template Var<T> attend(Var<T>, const EncoderParams<T>&);                                      \
    template Var<T> encode(Tape<T>&, const TokenizedText&, const Parameter<T>&, const EncoderParams<T>&);

INDNET_INSTANTIATE_ENCODER(float)
INDNET_INSTANTIATE_ENCODER(double)

}  // namespace indnet::encoder
