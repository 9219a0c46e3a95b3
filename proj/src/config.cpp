#include "indnet/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>

#include "indnet/errors.hpp"

namespace indnet {
namespace {

template <typename V>
void read(const nlohmann::json& j, const char* key, V& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<V>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config field \"") + key + "\": " + e.what());
    }
}

void read_path(const nlohmann::json& j, const char* key, std::filesystem::path& out) {
    std::string s;
    read(j, key, s);
    if (!s.empty()) out = s;
}

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "train_data", "test_data", "embeddings", "vocab_limit", "checkpoint", "metrics", "episodes",
        "way", "shot", "queries", "seed", "induction", "relation", "iterations", "hidden", "attention_dim",
        "slices", "max_length", "train_embeddings", "learning_rate", "epsilon", "eval_every", "val_fraction",
        "val_episodes", "val_queries", "patience", "test_episodes", "test_queries", "threads",
        "embedding_dim", "vocab_rows"};
    return keys;
}

}  // namespace

nlohmann::json to_json(const ModelConfig& c) {
    return {{"vocab_rows", c.vocab_rows},       {"embedding_dim", c.embedding_dim},
            {"hidden", c.hidden},               {"attention_dim", c.attention_dim},
            {"slices", c.slices},               {"iterations", c.iterations},
            {"max_length", c.max_length},       {"induction", to_string(c.induction)},
            {"relation", to_string(c.relation)}, {"train_embeddings", c.train_embeddings}};
}

void from_json(const nlohmann::json& j, ModelConfig& c) {
    read(j, "vocab_rows", c.vocab_rows);
    read(j, "embedding_dim", c.embedding_dim);
    read(j, "hidden", c.hidden);
    read(j, "attention_dim", c.attention_dim);
    read(j, "slices", c.slices);
    read(j, "iterations", c.iterations);
    read(j, "max_length", c.max_length);
    read(j, "train_embeddings", c.train_embeddings);
    if (j.contains("induction")) {
        std::string s;
        read(j, "induction", s);
        c.induction = parse_induction(s);
    }
    if (j.contains("relation")) {
        std::string s;
        read(j, "relation", s);
        c.relation = parse_relation(s);
    }
}

void TrainConfig::validate() const {
    if (train_data.empty()) throw ConfigError("config: train_data is required");
    if (embeddings.empty()) throw ConfigError("config: embeddings is required");
    if (test_queries == 0) throw ConfigError("config: test_queries must be positive");
    if (threads == 0) throw ConfigError("config: threads must be positive");
    model.validate();
    options.validate();
}

nlohmann::json to_json(const TrainConfig& c) {
    nlohmann::json j = to_json(c.model);
    j.update({{"train_data", c.train_data.string()},
              {"test_data", c.test_data.string()},
              {"embeddings", c.embeddings.string()},
              {"vocab_limit", c.vocab_limit},
              {"checkpoint", c.checkpoint.string()},
              {"metrics", c.metrics.string()},
              {"episodes", c.options.episodes},
              {"way", c.options.spec.way},
              {"shot", c.options.spec.shot},
              {"queries", c.options.spec.queries_per_class},
              {"seed", c.options.seed},
              {"learning_rate", c.options.optimizer.learning_rate},
              {"epsilon", c.options.optimizer.epsilon},
              {"eval_every", c.options.eval_every},
              {"val_fraction", c.options.val_fraction},
              {"val_episodes", c.options.val_episodes},
              {"val_queries", c.options.val_queries},
              {"patience", c.options.patience},
              {"test_episodes", c.test_episodes},
              {"test_queries", c.test_queries},
              {"threads", c.threads}});
    return j;
}

TrainConfig train_config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    for (const auto& item : j.items()) {
        if (!known_keys().contains(item.key())) throw ConfigError("config: unknown field \"" + item.key() + "\"");
    }
    TrainConfig c;
    from_json(j, c.model);
    read_path(j, "train_data", c.train_data);
    read_path(j, "test_data", c.test_data);
    read_path(j, "embeddings", c.embeddings);
    read_path(j, "checkpoint", c.checkpoint);
    read_path(j, "metrics", c.metrics);
    read(j, "vocab_limit", c.vocab_limit);
    read(j, "episodes", c.options.episodes);
    read(j, "way", c.options.spec.way);
    read(j, "shot", c.options.spec.shot);
    read(j, "queries", c.options.spec.queries_per_class);
    read(j, "seed", c.options.seed);
    read(j, "learning_rate", c.options.optimizer.learning_rate);
    read(j, "epsilon", c.options.optimizer.epsilon);
    read(j, "eval_every", c.options.eval_every);
    read(j, "val_fraction", c.options.val_fraction);
    read(j, "val_episodes", c.options.val_episodes);
    read(j, "val_queries", c.options.val_queries);
    read(j, "patience", c.options.patience);
    read(j, "test_episodes", c.test_episodes);
    read(j, "test_queries", c.test_queries);
    read(j, "threads", c.threads);
    return c;
}

TrainConfig load_train_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot read config file " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError("config file " + path.string() + ": " + e.what());
    }
    return train_config_from_json(j);
}

std::filesystem::path resolve_data_path(const std::filesystem::path& path) {
    if (path.empty() || path.is_absolute()) return path;
    if (const char* dir = std::getenv("INDNET_DATA_DIR"); dir != nullptr && *dir != '\0') {
        return std::filesystem::path(dir) / path;
    }
    return path;
}

}  // namespace indnet
