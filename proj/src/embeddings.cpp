#include "indnet/embeddings.hpp"

#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "indnet/errors.hpp"
#include "indnet/log.hpp"

namespace indnet {

EmbeddingTable::EmbeddingTable(std::size_t dim) : dim_(dim), zero_row_(dim, 0.0f) {
    if (dim == 0) throw ConfigError("embedding dimension must be positive");
}

bool EmbeddingTable::add(std::string token, std::span<const float> row) {
    if (row.size() != dim_) {
        throw DimensionError("embedding row for '" + token + "' has " + std::to_string(row.size()) +
                             " values, expected " + std::to_string(dim_));
    }
    if (index_.contains(token)) return false;
    index_.emplace(token, tokens_.size());
    tokens_.push_back(std::move(token));
    values_.insert(values_.end(), row.begin(), row.end());
    return true;
}

std::size_t EmbeddingTable::lookup(std::string_view token) const {
    auto it = index_.find(std::string(token));
    return it == index_.end() ? oov_id() : it->second;
}

std::vector<float> EmbeddingTable::matrix() const {
    std::vector<float> out = values_;
    out.insert(out.end(), dim_, 0.0f);
    return out;
}

std::span<const float> EmbeddingTable::row(std::size_t id) const {
    if (id == oov_id()) return zero_row_;
    if (id > oov_id()) throw DataError("token id " + std::to_string(id) + " out of range");
    return {values_.data() + id * dim_, dim_};
}

EmbeddingTable load_embeddings(const std::filesystem::path& path, std::size_t vocab_limit) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot read embeddings file " + path.string());

    EmbeddingTable table;
    std::string line;
    std::size_t line_no = 0;
    std::vector<float> row;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream fields(line);
        std::string token;
        if (!(fields >> token)) continue;

        row.clear();
        std::string number;
        while (fields >> number) {
            errno = 0;
            char* end = nullptr;
            const float v = std::strtof(number.c_str(), &end);
            if (end != number.c_str() + number.size() || errno == ERANGE || !std::isfinite(v)) {
                throw DataError(path.string() + ":" + std::to_string(line_no) + ": bad value '" + number + "'");
            }
            row.push_back(v);
        }
        if (row.empty()) {
            throw DataError(path.string() + ":" + std::to_string(line_no) + ": token '" + token + "' has no values");
        }
        if (table.dim() == 0) {
            table = EmbeddingTable(row.size());
        } else if (row.size() != table.dim()) {
            throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                            std::to_string(table.dim()) + " values, found " + std::to_string(row.size()));
        }
        if (vocab_limit != 0 && table.rows() - 1 >= vocab_limit) continue;
        if (!table.add(token, row)) {
            log::warn(path.string() + ":" + std::to_string(line_no) + ": duplicate token '" + token +
                      "', keeping the first occurrence");
        }
    }
    if (table.dim() == 0) throw DataError("embeddings file " + path.string() + " has no vectors");
    return table;
}

void save_embeddings(const EmbeddingTable& table, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write embeddings file " + path.string());
    out.precision(9);
    for (std::size_t r = 0; r < table.tokens().size(); ++r) {
        out << table.tokens()[r];
        for (float v : table.row(r)) out << ' ' << v;
        out << '\n';
    }
    if (!out) throw DataError("failed writing " + path.string());
}

std::vector<std::string> tokenize(std::string_view text, std::size_t max_length) {
    std::vector<std::string> tokens;
    std::string current;
    for (char ch : text) {
        const auto c = static_cast<unsigned char>(ch);
        if (std::isspace(c)) {
            if (!current.empty()) {
                tokens.push_back(std::move(current));
                current.clear();
                if (tokens.size() == max_length) return tokens;
            }
        } else {
            current.push_back(static_cast<char>(std::tolower(c)));
        }
    }
    if (!current.empty() && tokens.size() < max_length) tokens.push_back(std::move(current));
    return tokens;
}

TokenizedText to_ids(std::string_view text, const EmbeddingTable& table, std::size_t max_length) {
    TokenizedText out;
    for (const std::string& tok : tokenize(text, max_length)) out.ids.push_back(table.lookup(tok));
    if (out.ids.empty()) throw DataError("text has no tokens: '" + std::string(text) + "'");
    return out;
}

}  // namespace indnet
