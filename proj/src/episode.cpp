#include "indnet/episode.hpp"

#include "indnet/encoder.hpp"
#include "indnet/induction.hpp"
#include "indnet/ops.hpp"
#include "indnet/relation.hpp"

namespace indnet {

void EpisodeSpec::validate() const {
    if (way < 2) throw ConfigError("way must be at least 2, got " + std::to_string(way));
    if (shot < 1) throw ConfigError("shot must be at least 1");
    if (queries_per_class < 1) throw ConfigError("queries per class must be at least 1");
}

void require_sampleable(const EncodedCorpus& corpus, const EpisodeSpec& spec) {
    spec.validate();
    if (corpus.num_classes() < spec.way) {
        throw DataError("corpus has " + std::to_string(corpus.num_classes()) + " classes, episodes need " +
                        std::to_string(spec.way));
    }
    const std::size_t need = spec.shot + spec.queries_per_class;
    for (std::size_t c = 0; c < corpus.num_classes(); ++c) {
        if (corpus.texts[c].size() < need) {
            throw DataError("class '" + corpus.labels[c] + "' has " + std::to_string(corpus.texts[c].size()) +
                            " examples, episodes need " + std::to_string(need));
        }
    }
}

Episode sample_episode(const EncodedCorpus& corpus, const EpisodeSpec& spec, Random& rng) {
    require_sampleable(corpus, spec);
    Episode ep;
    ep.classes = rng.choose(corpus.num_classes(), spec.way);
    ep.support.resize(spec.way);
    for (std::size_t slot = 0; slot < spec.way; ++slot) {
        const std::size_t cls = ep.classes[slot];
        std::vector<std::size_t> picked = rng.choose(corpus.texts[cls].size(), spec.shot + spec.queries_per_class);
        ep.support[slot].assign(picked.begin(), picked.begin() + static_cast<std::ptrdiff_t>(spec.shot));
        for (std::size_t q = spec.shot; q < picked.size(); ++q) {
            ep.query_slot.push_back(slot);
            ep.query_item.push_back(picked[q]);
        }
    }
    return ep;
}

EpisodeTexts materialize(const EncodedCorpus& corpus, const Episode& episode) {
    EpisodeTexts out;
    out.support.resize(episode.way());
    for (std::size_t slot = 0; slot < episode.way(); ++slot) {
        for (std::size_t item : episode.support[slot]) {
            out.support[slot].push_back(corpus.texts[episode.classes[slot]][item]);
        }
    }
    for (std::size_t q = 0; q < episode.num_queries(); ++q) {
        out.queries.push_back(corpus.texts[episode.classes[episode.query_slot[q]]][episode.query_item[q]]);
    }
    out.labels = episode.query_slot;
    return out;
}

template <typename T>
EpisodeForward<T> forward_episode(Tape<T>& tape, const ModelParams<T>& params, const EpisodeTexts& texts) {
    const ModelConfig& cfg = params.config;
    if (texts.support.empty()) throw ContractError("forward_episode: no support classes");
    if (texts.queries.empty()) throw ContractError("forward_episode: no queries");

    EpisodeForward<T> out;
    std::vector<std::vector<Var<T>>> samples(texts.support.size());
    for (std::size_t i = 0; i < texts.support.size(); ++i) {
        if (texts.support[i].empty()) throw ContractError("forward_episode: support class " + std::to_string(i) + " is empty");
        for (const TokenizedText& text : texts.support[i]) {
            samples[i].push_back(encoder::encode(tape, text, params.embeddings, params.encoder));
            out.samples.push_back(samples[i].back());
        }
    }
    for (const TokenizedText& text : texts.queries) {
        out.queries.push_back(encoder::encode(tape, text, params.embeddings, params.encoder));
    }

    switch (cfg.induction) {
        case InductionKind::routing:
            out.class_vectors = induction::induce_routing(samples, params.induction, cfg.iterations);
            break;
        case InductionKind::sum: out.class_vectors = induction::induce_sum(samples); break;
        case InductionKind::attention:
            out.class_vectors = induction::induce_attention(samples, params.induction_attention);
            break;
    }

    const std::size_t way = out.class_vectors.size();
    const std::size_t n = out.queries.size();
    std::vector<Var<T>> flat(way * n);
    std::vector<Var<T>> mapped(way * n);
    for (std::size_t q = 0; q < n; ++q) {
        if (cfg.relation == RelationKind::ntn) {
            Var<T> projected = relation::project_query(out.queries[q], params.relation);
            for (std::size_t i = 0; i < way; ++i) {
                Var<T> v = ops::relu(relation::bilinear(out.class_vectors[i], projected));
                flat[i * n + q] = mapped[i * n + q] = relation::relation_score(v, params.relation);
            }
        } else {
            for (std::size_t i = 0; i < way; ++i) {
                Var<T> r = relation::cosine_score(out.class_vectors[i], out.queries[q]);
                flat[i * n + q] = r;
                mapped[i * n + q] = ops::scale(ops::add_constant(r, T(1)), T(0.5));
            }
        }
    }
    out.scores = ops::reshape(ops::concat<T>(flat), Shape{way, n});
    out.loss_scores = cfg.relation == RelationKind::ntn ? out.scores
                                                         : ops::reshape(ops::concat<T>(mapped), Shape{way, n});
    return out;
}

template <typename T>
Var<T> episode_loss(Var<T> scores, std::span<const std::size_t> labels) {
    if (scores.shape().rank() != 2) throw DimensionError("episode_loss: scores must be [C x n], got " + scores.shape().str());
    const std::size_t way = scores.shape()[0], n = scores.shape()[1];
    if (labels.size() != n) {
        throw ContractError("episode_loss: " + std::to_string(labels.size()) + " labels for " + std::to_string(n) +
                            " queries");
    }
    std::vector<T> target(way * n, T(0));
    for (std::size_t q = 0; q < n; ++q) {
        if (labels[q] >= way) {
            throw ContractError("episode_loss: label " + std::to_string(labels[q]) + " out of range for " +
                                std::to_string(way) + " classes");
        }
        target[labels[q] * n + q] = T(1);
    }
    Var<T> residual = ops::sub(scores, scores.tape().constant(scores.shape(), std::move(target)));
    return ops::sum(ops::mul(residual, residual));
}

template <typename T>
std::vector<std::size_t> predict(std::span<const T> scores, std::size_t way) {
    if (way == 0 || scores.size() % way != 0) throw ContractError("predict: scores do not form [C x n]");
    const std::size_t n = scores.size() / way;
    std::vector<std::size_t> out(n, 0);
    for (std::size_t q = 0; q < n; ++q) {
        T best = scores[q];
        for (std::size_t i = 1; i < way; ++i) {
            if (scores[i * n + q] > best) {
                best = scores[i * n + q];
                out[q] = i;
            }
        }
    }
    return out;
}

template struct EpisodeForward<float>;
template struct EpisodeForward<double>;
template EpisodeForward<float> forward_episode(Tape<float>&, const ModelParams<float>&, const EpisodeTexts&);
template EpisodeForward<double> forward_episode(Tape<double>&, const ModelParams<double>&, const EpisodeTexts&);
template Var<float> episode_loss(Var<float>, std::span<const std::size_t>);
template Var<double> episode_loss(Var<double>, std::span<const std::size_t>);
template std::vector<std::size_t> predict(std::span<const float>, std::size_t);
template std::vector<std::size_t> predict(std::span<const double>, std::size_t);

}  // namespace indnet
