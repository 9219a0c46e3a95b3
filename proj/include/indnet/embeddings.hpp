#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace indnet {

/// Pretrained word vectors plus the token -> row map. The last row is the
/// reserved out-of-vocabulary row and is all zeros.
class EmbeddingTable {
  public:
    EmbeddingTable() = default;
    explicit EmbeddingTable(std::size_t dim);

    /// Appends a token row; returns false (and keeps the first row) for duplicates.
    bool add(std::string token, std::span<const float> row);

    std::size_t dim() const noexcept { return dim_; }
    std::size_t rows() const noexcept { return tokens_.size() + 1; }
    std::size_t oov_id() const noexcept { return tokens_.size(); }
    const std::vector<std::string>& tokens() const noexcept { return tokens_; }

    std::size_t lookup(std::string_view token) const;

    /// Row-major rows() x dim() matrix including the zero OOV row.
    std::vector<float> matrix() const;
    std::span<const float> row(std::size_t id) const;

  private:
    std::size_t dim_ = 0;
    std::vector<std::string> tokens_;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<float> values_;  // tokens_.size() x dim_
    std::vector<float> zero_row_;
};

/// GloVe text format: `token v1 ... vd` per line. `vocab_limit` of 0 keeps
/// every token; otherwise tokens past the first `vocab_limit` distinct ones are dropped.
EmbeddingTable load_embeddings(const std::filesystem::path& path, std::size_t vocab_limit = 0);

void save_embeddings(const EmbeddingTable& table, const std::filesystem::path& path);

/// A text as token ids, 1 <= ids.size() <= max length.
struct TokenizedText {
    std::vector<std::size_t> ids;
    std::size_t length() const noexcept { return ids.size(); }
};

/// Lowercases ASCII and splits on whitespace. Truncates to `max_length` tokens.
std::vector<std::string> tokenize(std::string_view text, std::size_t max_length);

TokenizedText to_ids(std::string_view text, const EmbeddingTable& table, std::size_t max_length);

}  // namespace indnet
