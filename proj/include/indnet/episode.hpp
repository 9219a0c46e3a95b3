#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "indnet/corpus.hpp"
#include "indnet/model.hpp"
#include "indnet/random.hpp"
#include "indnet/tape.hpp"

namespace indnet {

struct EpisodeSpec {
    std::size_t way = 5;                // C
    std::size_t shot = 5;               // K
    std::size_t queries_per_class = 20;

    void validate() const;
};

/// A sampled task. Class slots are 0-based; slot i corresponds to corpus
/// class `classes[i]`. Item indices point into EncodedCorpus::texts[class].
struct Episode {
    std::vector<std::size_t> classes;
    std::vector<std::vector<std::size_t>> support;  // [slot][K]
    std::vector<std::size_t> query_slot;            // label of each query
    std::vector<std::size_t> query_item;

    std::size_t way() const noexcept { return classes.size(); }
    std::size_t num_queries() const noexcept { return query_slot.size(); }
};

/// Throws DataError unless every class can supply shot + queries_per_class
/// distinct texts and there are at least `way` classes.
void require_sampleable(const EncodedCorpus& corpus, const EpisodeSpec& spec);

/// Classes without replacement, then K support and n query texts per class
/// without replacement. Queries are ordered by slot.
Episode sample_episode(const EncodedCorpus& corpus, const EpisodeSpec& spec, Random& rng);

/// The texts of an episode, copied out of the corpus.
struct EpisodeTexts {
    std::vector<std::vector<TokenizedText>> support;  // [slot][K]
    std::vector<TokenizedText> queries;
    std::vector<std::size_t> labels;  // slot per query
};

EpisodeTexts materialize(const EncodedCorpus& corpus, const Episode& episode);

template <typename T>
struct EpisodeForward {
    Var<T> scores;       // [C x n]: r_iq for ranking
    Var<T> loss_scores;  // what the loss regresses; cosine scores are mapped to (r + 1) / 2
    std::vector<Var<T>> samples;        // support encodings, class-major
    std::vector<Var<T>> class_vectors;  // C
    std::vector<Var<T>> queries;        // n
};

/// encode -> induce -> relate for every (class, query) pair. Support classes may
/// hold different numbers of texts.
template <typename T>
EpisodeForward<T> forward_episode(Tape<T>& tape, const ModelParams<T>& params, const EpisodeTexts& texts);

/// sum_i sum_q (r_iq - [y_q == i])^2 over a [C x n] score tensor.
template <typename T>
Var<T> episode_loss(Var<T> scores, std::span<const std::size_t> labels);

/// argmax_i r_iq per query, ties to the lowest class index. `scores` is [C x n] row-major.
template <typename T>
std::vector<std::size_t> predict(std::span<const T> scores, std::size_t way);

}  // namespace indnet
