#include "indnet/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <thread>

#include "indnet/errors.hpp"
#include "indnet/ops.hpp"

namespace indnet {
namespace {

EncodedCorpus subset(const EncodedCorpus& corpus, const std::vector<std::size_t>& classes) {
    EncodedCorpus out;
    for (std::size_t c : classes) {
        out.labels.push_back(corpus.labels[c]);
        out.texts.push_back(corpus.texts[c]);
        out.example_ids.push_back(corpus.example_ids[c]);
    }
    return out;
}

void require_finite(const ModelParams<float>& params, std::size_t episode) {
    for (const Parameter<float>* p : params.all()) {
        if (!p->trainable) continue;
        for (float g : p->grad) {
            if (!std::isfinite(g)) {
                throw NumericError("non-finite gradient in " + p->name + " at episode " + std::to_string(episode));
            }
        }
    }
}

// Name of the first parameter holding a non-finite value, else the loss itself.
std::string non_finite_source(const ModelParams<float>& params) {
    for (const Parameter<float>* p : params.all()) {
        for (float v : p->value) {
            if (!std::isfinite(v)) return p->name;
        }
    }
    return "episode loss";
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

}  // namespace

void TrainOptions::validate() const {
    spec.validate();
    if (eval_every == 0) throw ConfigError("eval_every must be positive");
    if (!(val_fraction >= 0.0 && val_fraction < 1.0)) throw ConfigError("val_fraction must be in [0, 1)");
    if (val_fraction > 0.0 && (val_episodes == 0 || val_queries == 0)) {
        throw ConfigError("validation needs positive val_episodes and val_queries");
    }
    if (!(optimizer.learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
}

std::string MetricsRecord::to_json() const {
    std::string s = "{\"episode\":" + std::to_string(episode) + ",\"loss\":" + format_double(loss) +
                    ",\"train_acc\":" + format_double(train_acc) + ",\"val_acc\":";
    s += val_acc ? format_double(*val_acc) : "null";
    return s + "}";
}

std::vector<std::size_t> validation_classes(std::size_t num_classes, const TrainOptions& options) {
    auto count = static_cast<std::size_t>(std::lround(options.val_fraction * static_cast<double>(num_classes)));
    if (count == 0) return {};
    count = std::max(count, options.spec.way);
    if (num_classes < count + options.spec.way) return {};
    Random rng(options.seed ^ 0x9e3779b97f4a7c15ULL);
    std::vector<std::size_t> picked = rng.choose(num_classes, count);
    std::sort(picked.begin(), picked.end());
    return picked;
}

double episode_accuracy(const ModelParams<float>& params, const EpisodeTexts& texts) {
    Tape<float> tape;
    EpisodeForward<float> out = forward_episode(tape, params, texts);
    std::vector<std::size_t> predicted = predict(out.scores.value(), texts.support.size());
    std::size_t correct = 0;
    for (std::size_t q = 0; q < predicted.size(); ++q) correct += predicted[q] == texts.labels[q] ? 1 : 0;
    return static_cast<double>(correct) / static_cast<double>(predicted.size());
}

TrainResult train(const EncodedCorpus& corpus, ModelParams<float> params, const TrainOptions& options,
                  const TrainHooks& hooks) {
    options.validate();
    TrainResult result;

    std::vector<std::size_t> val_ids = validation_classes(corpus.num_classes(), options);
    std::vector<std::size_t> train_ids;
    for (std::size_t c = 0; c < corpus.num_classes(); ++c) {
        if (!std::binary_search(val_ids.begin(), val_ids.end(), c)) train_ids.push_back(c);
    }
    const EncodedCorpus train_split = subset(corpus, train_ids);
    const EncodedCorpus val_split = subset(corpus, val_ids);
    const EpisodeSpec val_spec{options.spec.way, options.spec.shot, options.val_queries};
    const bool validating = !val_ids.empty();
    result.val_labels = val_split.labels;

    require_sampleable(train_split, options.spec);
    if (validating) require_sampleable(val_split, val_spec);

    Random rng(options.seed);
    Adagrad<float> optimizer(options.optimizer);
    std::vector<Parameter<float>*> trainable = params.all();
    std::optional<ModelParams<float>> best;
    std::size_t stale = 0;
    double window_loss = 0.0, window_acc = 0.0;
    std::size_t window = 0;

    for (std::size_t ep = 1; ep <= options.episodes; ++ep) {
        const EpisodeTexts texts = materialize(train_split, sample_episode(train_split, options.spec, rng));
        double loss_value = 0.0;
        std::vector<std::size_t> predicted;
        {
            Tape<float> tape;
            EpisodeForward<float> out = forward_episode(tape, params, texts);
            Var<float> loss = episode_loss(out.loss_scores, std::span<const std::size_t>(texts.labels));
            loss_value = loss.item();
            if (!std::isfinite(loss_value)) {
                throw NumericError("non-finite loss at episode " + std::to_string(ep) + " (" + non_finite_source(params) +
                                   ")");
            }
            predicted = predict(out.scores.value(), options.spec.way);
            params.zero_grad();
            tape.backward(loss);
            tape.accumulate_grads(trainable);
        }
        params.mask_oov_grad();
        require_finite(params, ep);
        optimizer.step(trainable);

        std::size_t correct = 0;
        for (std::size_t q = 0; q < predicted.size(); ++q) correct += predicted[q] == texts.labels[q] ? 1 : 0;
        window_loss += loss_value;
        window_acc += static_cast<double>(correct) / static_cast<double>(predicted.size());
        ++window;
        result.episodes_run = ep;

        if (ep % options.eval_every != 0 && ep != options.episodes) continue;

        MetricsRecord record;
        record.episode = ep;
        record.loss = window_loss / static_cast<double>(window);
        record.train_acc = window_acc / static_cast<double>(window);
        window_loss = window_acc = 0.0;
        window = 0;
        bool stop = false;
        if (validating) {
            record.val_acc = evaluate(val_split, params, val_spec, options.val_episodes, options.seed + 1).mean;
            if (!result.best_val_acc || *record.val_acc > *result.best_val_acc) {
                result.best_val_acc = record.val_acc;
                best = params;
                stale = 0;
                if (hooks.on_checkpoint) hooks.on_checkpoint(params, ep);
            } else if (++stale >= options.patience) {
                stop = true;
            }
        } else if (hooks.on_checkpoint) {
            hooks.on_checkpoint(params, ep);
        }
        result.log.push_back(record);
        if (hooks.on_metrics) hooks.on_metrics(record);
        if (stop) break;
    }

    result.params = best ? std::move(*best) : std::move(params);
    return result;
}

EvalResult evaluate(const EncodedCorpus& corpus, const ModelParams<float>& params, const EpisodeSpec& spec,
                    std::size_t episodes, std::uint64_t seed, std::size_t threads) {
    require_sampleable(corpus, spec);
    EvalResult result;
    if (episodes == 0) return result;

    Random rng(seed);
    std::vector<Episode> sampled;
    sampled.reserve(episodes);
    for (std::size_t e = 0; e < episodes; ++e) sampled.push_back(sample_episode(corpus, spec, rng));

    result.per_episode.assign(episodes, 0.0);
    auto work = [&](std::size_t begin, std::size_t stride) {
        for (std::size_t e = begin; e < episodes; e += stride) {
            result.per_episode[e] = episode_accuracy(params, materialize(corpus, sampled[e]));
        }
    };
    threads = std::clamp<std::size_t>(threads, 1, episodes);
    if (threads == 1) {
        work(0, 1);
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
    }

    double total = 0.0;
    for (double a : result.per_episode) total += a;
    result.mean = total / static_cast<double>(episodes);
    double sq = 0.0;
    for (double a : result.per_episode) sq += (a - result.mean) * (a - result.mean);
    result.stddev = std::sqrt(sq / static_cast<double>(episodes));
    return result;
}

}  // namespace indnet
