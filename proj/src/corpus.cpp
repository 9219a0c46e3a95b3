#include "indnet/corpus.hpp"

#include <algorithm>
#include <fstream>
#include "json.hpp"
#include <set>

#include "indnet/errors.hpp"

namespace indnet {

void Corpus::add(Example example) {
    std::size_t cls = class_of(example.label);
    if (cls == labels_.size()) {
        labels_.push_back(example.label);
        by_class_.emplace_back();
    }
    by_class_[cls].push_back(examples_.size());
    examples_.push_back(std::move(example));
}

std::size_t Corpus::class_of(const std::string& label) const {
    auto it = std::find(labels_.begin(), labels_.end(), label);
    return static_cast<std::size_t>(it - labels_.begin());
}

Corpus Corpus::filter(std::span<const std::string> labels) const {
    std::set<std::string> keep(labels.begin(), labels.end());
    Corpus out;
    for (const Example& ex : examples_) {
        if (keep.contains(ex.label)) out.add(ex);
    }
    return out;
}

Corpus load_corpus(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot read corpus file " + path.string());
    Corpus corpus;
    std::string line;
    std::size_t line_no = 0;
    auto fail = [&](const std::string& why) {
        throw DataError(path.string() + ":" + std::to_string(line_no) + ": " + why);
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json record;
        try {
            record = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            fail(std::string("invalid JSON: ") + e.what());
        }
        if (!record.is_object()) fail("record is not a JSON object");
        for (const char* field : {"text", "label"}) {
            if (!record.contains(field)) fail(std::string("missing field \"") + field + "\"");
            if (!record[field].is_string()) fail(std::string("field \"") + field + "\" is not a string");
        }
        Example ex{record["text"].get<std::string>(), record["label"].get<std::string>()};
        if (ex.text.find_first_not_of(" \t\r\n") == std::string::npos) fail("empty text");
        if (ex.label.empty()) fail("empty label");
        corpus.add(std::move(ex));
    }
    return corpus;
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write corpus file " + path.string());
    for (const Example& ex : corpus.examples()) {
        out << nlohmann::json{{"text", ex.text}, {"label", ex.label}}.dump() << '\n';
    }
    if (!out) throw DataError("failed writing " + path.string());
}

void require_disjoint_labels(std::span<const std::string> train_labels, const Corpus& test) {
    std::string shared;
    for (const std::string& label : train_labels) {
        if (test.class_of(label) != test.num_classes()) shared += (shared.empty() ? "" : ", ") + label;
    }
    if (!shared.empty()) throw DataError("training and test classes overlap: " + shared);
}

void require_disjoint_labels(const Corpus& train, const Corpus& test) {
    require_disjoint_labels(train.labels(), test);
}

EncodedCorpus encode_corpus(const Corpus& corpus, const EmbeddingTable& table, std::size_t max_length) {
    EncodedCorpus out;
    out.labels = corpus.labels();
    out.texts.resize(corpus.num_classes());
    out.example_ids.resize(corpus.num_classes());
    for (std::size_t c = 0; c < corpus.num_classes(); ++c) {
        for (std::size_t idx : corpus.class_examples(c)) {
            out.texts[c].push_back(to_ids(corpus.examples()[idx].text, table, max_length));
            out.example_ids[c].push_back(idx);
        }
    }
    return out;
}

}  // namespace indnet
