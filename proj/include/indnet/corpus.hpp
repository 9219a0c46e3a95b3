#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "indnet/embeddings.hpp"

namespace indnet {

struct Example {
    std::string text;
    std::string label;
};

/// Labeled texts grouped by class. Class indices are dense, 0-based, in
/// order of first appearance of each label.
class Corpus {
  public:
    void add(Example example);

    std::size_t size() const noexcept { return examples_.size(); }
    std::size_t num_classes() const noexcept { return labels_.size(); }
    const std::vector<Example>& examples() const noexcept { return examples_; }
    const std::vector<std::string>& labels() const noexcept { return labels_; }
    /// Indices into examples() for one class.
    const std::vector<std::size_t>& class_examples(std::size_t cls) const { return by_class_.at(cls); }
    /// Class index of a label, or num_classes() when absent.
    std::size_t class_of(const std::string& label) const;

    /// Examples whose label is in `labels`, in original order.
    Corpus filter(std::span<const std::string> labels) const;

  private:
    std::vector<Example> examples_;
    std::vector<std::string> labels_;
    std::vector<std::vector<std::size_t>> by_class_;
};

/// JSON lines; each record an object with string fields "text" and "label".
Corpus load_corpus(const std::filesystem::path& path);
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);

/// Throws DataError naming the shared labels when the corpora overlap.
void require_disjoint_labels(const Corpus& train, const Corpus& test);
void require_disjoint_labels(std::span<const std::string> train_labels, const Corpus& test);

/// A corpus mapped through an embedding table's vocabulary.
struct EncodedCorpus {
    std::vector<std::string> labels;
    std::vector<std::vector<TokenizedText>> texts;     // [class][i]
    std::vector<std::vector<std::size_t>> example_ids;  // [class][i] -> Corpus::examples() index

    std::size_t num_classes() const noexcept { return labels.size(); }
};

EncodedCorpus encode_corpus(const Corpus& corpus, const EmbeddingTable& table, std::size_t max_length);

}  // namespace indnet
