#include "indnet/synthetic.hpp"

#include <cstdio>

#include "indnet/errors.hpp"
#include "indnet/random.hpp"

namespace indnet {
namespace {

std::string numbered(const char* prefix, std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s%03zu", prefix, i);
    return buf;
}

std::string token_name(std::size_t cls, std::size_t j) { return numbered("c", cls) + numbered("w", j); }

}  // namespace

void SyntheticConfig::validate() const {
    if (classes == 0 || samples_per_class == 0 || vocab_per_class == 0 || dim == 0) {
        throw ConfigError("synthetic corpus counts must be positive");
    }
    if (!(noise >= 0.0 && noise <= 1.0)) throw ConfigError("synthetic noise must be in [0, 1]");
    if (min_length == 0 || min_length > max_length) throw ConfigError("synthetic text lengths must satisfy 1 <= min <= max");
    if (!(token_spread >= 0.0)) throw ConfigError("token spread must be nonnegative");
}

SyntheticData generate_synthetic(const SyntheticConfig& config) {
    config.validate();
    Random rng(config.seed);
    SyntheticData data{Corpus{}, EmbeddingTable(config.dim)};

    std::vector<float> row(config.dim);
    std::vector<double> mean(config.dim);
    for (std::size_t c = 0; c < config.classes; ++c) {
        for (double& m : mean) m = rng.normal();
        for (std::size_t j = 0; j < config.vocab_per_class; ++j) {
            for (std::size_t k = 0; k < config.dim; ++k) {
                row[k] = static_cast<float>(mean[k] + config.token_spread * rng.normal());
            }
            data.table.add(token_name(c, j), row);
        }
    }

    const std::size_t span = config.max_length - config.min_length + 1;
    for (std::size_t c = 0; c < config.classes; ++c) {
        for (std::size_t s = 0; s < config.samples_per_class; ++s) {
            const std::size_t length = config.min_length + rng.below(span);
            std::string text;
            for (std::size_t t = 0; t < length; ++t) {
                std::size_t cluster = c;
                if (rng.uniform() < config.noise) cluster = rng.below(config.classes);
                if (!text.empty()) text += ' ';
                text += token_name(cluster, rng.below(config.vocab_per_class));
            }
            data.corpus.add({std::move(text), numbered("class_", c)});
        }
    }
    return data;
}

std::pair<Corpus, Corpus> split_classes(const Corpus& corpus, std::size_t train_classes) {
    if (train_classes > corpus.num_classes()) {
        throw ConfigError("cannot take " + std::to_string(train_classes) + " training classes from " +
                          std::to_string(corpus.num_classes()));
    }
    const auto& labels = corpus.labels();
    std::vector<std::string> head(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(train_classes));
    std::vector<std::string> tail(labels.begin() + static_cast<std::ptrdiff_t>(train_classes), labels.end());
    return {corpus.filter(head), corpus.filter(tail)};
}

}  // namespace indnet
