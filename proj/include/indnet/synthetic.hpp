#pragma once

#include <cstdint>

#include "indnet/corpus.hpp"
#include "indnet/embeddings.hpp"

namespace indnet {

/// Desk-scale stand-in for a real few-shot corpus. Each class owns a cluster
/// of tokens whose vectors are a class mean plus Gaussian jitter; texts draw
/// their tokens from the class cluster, except that each token is, with
/// probability `noise`, drawn from a uniformly chosen cluster (any class).
struct SyntheticConfig {
    std::size_t classes = 12;
    std::size_t samples_per_class = 60;
    std::size_t vocab_per_class = 20;
    std::size_t dim = 16;
    double noise = 0.2;
    std::uint64_t seed = 1;
    double token_spread = 0.5;  // jitter stddev relative to unit-variance class means
    std::size_t min_length = 3;
    std::size_t max_length = 10;

    void validate() const;
};

struct SyntheticData {
    Corpus corpus;
    EmbeddingTable table;
};

SyntheticData generate_synthetic(const SyntheticConfig& config);

/// Splits a corpus by class: the first `train_classes` labels (in class-index
/// order) form the training corpus, the rest the test corpus.
std::pair<Corpus, Corpus> split_classes(const Corpus& corpus, std::size_t train_classes);

}  // namespace indnet
