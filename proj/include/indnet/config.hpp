#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"

#include "indnet/model.hpp"
#include "indnet/trainer.hpp"

namespace indnet {

/// Everything `indnet train` needs. The JSON config file uses the same
/// field names; unknown keys are rejected.
struct TrainConfig {
    std::filesystem::path train_data;
    std::filesystem::path test_data;   // optional; evaluated after training
    std::filesystem::path embeddings;
    std::size_t vocab_limit = 0;
    std::filesystem::path checkpoint;  // optional
    std::filesystem::path metrics;     // optional JSON-lines log
    ModelConfig model;
    TrainOptions options;
    std::size_t test_episodes = 600;
    std::size_t test_queries = 10;
    std::size_t threads = 1;

    void validate() const;
};

nlohmann::json to_json(const ModelConfig& config);
/// Fields absent from `j` keep the values already in `config`.
void from_json(const nlohmann::json& j, ModelConfig& config);

nlohmann::json to_json(const TrainConfig& config);
TrainConfig train_config_from_json(const nlohmann::json& j);
TrainConfig load_train_config(const std::filesystem::path& path);

/// Relative paths resolve against $INDNET_DATA_DIR when it is set.
std::filesystem::path resolve_data_path(const std::filesystem::path& path);

}  // namespace indnet
