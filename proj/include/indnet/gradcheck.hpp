#pragma once

// Finite-difference verification of the autodiff gradients, run in 64-bit.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "indnet/model.hpp"
#include "indnet/tape.hpp"

namespace indnet {

struct GradCheckEntry {
    std::string scope;
    std::string parameter;
    std::size_t size = 0;
    double max_abs_error = 0.0;
    /// max_i |autodiff_i - numeric_i| / max(max_i |autodiff_i|, max_i |numeric_i|);
    /// zero when both gradients vanish.
    double rel_error = 0.0;
};

struct GradCheckReport {
    std::vector<GradCheckEntry> entries;

    double max_rel_error() const;
    double max_rel_error(const std::string& scope) const;
};

using LossBuilder = std::function<Var<double>(Tape<double>&)>;

/// Compares autodiff gradients of `loss` w.r.t. each parameter with central
/// differences of step `step`. Parameter values are restored afterwards.
std::vector<GradCheckEntry> check_gradients(const std::string& scope, std::span<Parameter<double>* const> params,
                                            const LossBuilder& loss, double step);

struct GradCheckOptions {
    std::uint64_t seed = 1;
    double step = 1e-3;
    std::size_t embedding_dim = 6;
    std::size_t hidden = 4;
    std::size_t attention_dim = 4;
    std::size_t slices = 2;
    std::size_t vocab = 12;
    std::size_t iterations = 3;
};

/// Encoder, induction (routing unrolled and attention), relation, and the
/// end-to-end loss of a 2-way 2-shot micro-episode for every model variant.
GradCheckReport run_gradcheck(const GradCheckOptions& options = {});

}  // namespace indnet
