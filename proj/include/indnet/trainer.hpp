#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "indnet/adagrad.hpp"
#include "indnet/corpus.hpp"
#include "indnet/episode.hpp"
#include "indnet/model.hpp"

namespace indnet {

struct TrainOptions {
    std::size_t episodes = 10000;
    EpisodeSpec spec{5, 5, 20};
    AdagradConfig optimizer;
    std::uint64_t seed = 1;
    std::size_t eval_every = 100;
    double val_fraction = 0.1;       // share of training classes held out; 0 disables validation
    std::size_t val_episodes = 100;
    std::size_t val_queries = 10;
    std::size_t patience = 20;       // evaluations without improvement before stopping

    void validate() const;
};

struct MetricsRecord {
    std::size_t episode = 0;
    double loss = 0.0;       // mean episode loss since the previous record
    double train_acc = 0.0;  // mean query accuracy since the previous record
    std::optional<double> val_acc;

    /// One JSON object on a single line.
    std::string to_json() const;
};

struct TrainHooks {
    std::function<void(const MetricsRecord&)> on_metrics;
    /// Called with the parameters selected so far (best validation accuracy, or
    /// the latest when validation is off).
    std::function<void(const ModelParams<float>&, std::size_t episode)> on_checkpoint;
};

struct TrainResult {
    ModelParams<float> params;
    std::vector<MetricsRecord> log;
    std::size_t episodes_run = 0;
    std::optional<double> best_val_acc;
    std::vector<std::string> val_labels;
};

/// Splits the validation classes off `corpus`: round(val_fraction * N), raised
/// to `way` when nonzero, or dropped when the remainder could not form an episode.
std::vector<std::size_t> validation_classes(std::size_t num_classes, const TrainOptions& options);

/// Episodic meta-training: one sampled episode, one Adagrad step. Throws
/// NumericError on a non-finite loss or gradient.
TrainResult train(const EncodedCorpus& corpus, ModelParams<float> params, const TrainOptions& options,
                  const TrainHooks& hooks = {});

struct EvalResult {
    double mean = 0.0;
    double stddev = 0.0;
    std::vector<double> per_episode;
};

/// Mean per-episode query accuracy over `episodes` sampled episodes. Episodes
/// are drawn sequentially from `seed`; scoring may use `threads` workers and is
/// reduced in episode order, so the result does not depend on `threads`.
EvalResult evaluate(const EncodedCorpus& corpus, const ModelParams<float>& params, const EpisodeSpec& spec,
                    std::size_t episodes, std::uint64_t seed, std::size_t threads = 1);

/// Query accuracy of a single episode.
double episode_accuracy(const ModelParams<float>& params, const EpisodeTexts& texts);

}  // namespace indnet
