#pragma once

// Checkpoint file layout (version 1):
//
//   indnet-checkpoint 1
//   config <one-line JSON>
//   vocab <N>
//   <token>                      N lines, embedding row order
//   tensors <M>
//   <name> <d0>x<d1>... <byte offset> <float count>    M lines
//   payload <bytes>
//   <payload: little-endian IEEE-754 float32 values>

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "indnet/embeddings.hpp"
#include "indnet/model.hpp"

namespace indnet {

inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
    ModelParams<float> params;
    std::vector<std::string> vocabulary;  // token of each embedding row except the OOV row
    nlohmann::json config;                // training config snapshot; "model" holds the ModelConfig

    /// Embedding table rebuilt from the vocabulary and the stored embedding rows.
    EmbeddingTable table() const;
};

void save_checkpoint(const std::filesystem::path& path, const ModelParams<float>& params,
                     const std::vector<std::string>& vocabulary, const nlohmann::json& config = nlohmann::json::object());

Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace indnet
