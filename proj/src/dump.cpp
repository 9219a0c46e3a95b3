#include "indnet/dump.hpp"

#include <algorithm>
#include <cstdio>

#include "indnet/encoder.hpp"
#include "indnet/errors.hpp"
#include "indnet/induction.hpp"
#include "indnet/random.hpp"

namespace indnet {
namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string quoted = "\"";
    for (char c : s) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    return quoted + '"';
}

void write_row(std::ostream& out, const std::string& label, std::size_t id, std::span<const float> v) {
    out << csv_field(label) << ',' << id;
    char buf[32];
    for (float x : v) {
        std::snprintf(buf, sizeof buf, ",%.9g", static_cast<double>(x));
        out << buf;
    }
    out << '\n';
}

}  // namespace

DumpKind parse_dump_kind(const std::string& name) {
    if (name == "pre_transform" || name == "pre-transform") return DumpKind::pre_transform;
    if (name == "post_transform" || name == "post-transform") return DumpKind::post_transform;
    if (name == "query") return DumpKind::query;
    throw ConfigError("unknown vector kind '" + name + "' (expected pre_transform, post_transform or query)");
}

void dump_vectors(const ModelParams<float>& params, const EncodedCorpus& corpus, const EpisodeSpec& spec,
                  DumpKind kind, const std::optional<std::vector<std::string>>& class_filter, std::uint64_t seed,
                  std::ostream& out) {
    const std::size_t width = params.config.encoding_dim();
    out << "label,sample_id";
    for (std::size_t k = 0; k < width; ++k) out << ",v" << k;
    out << '\n';

    std::vector<std::size_t> candidates;
    for (std::size_t c = 0; c < corpus.num_classes(); ++c) {
        if (!class_filter ||
            std::find(class_filter->begin(), class_filter->end(), corpus.labels[c]) != class_filter->end()) {
            candidates.push_back(c);
        }
    }
    if (class_filter) {
        for (const std::string& label : *class_filter) {
            if (std::find(corpus.labels.begin(), corpus.labels.end(), label) == corpus.labels.end()) {
                throw DataError("dump-vectors: unknown class '" + label + "'");
            }
        }
    }
    if (candidates.empty()) return;
    if (spec.shot == 0 || (kind == DumpKind::query && spec.queries_per_class == 0)) {
        throw ConfigError("dump-vectors: shot and queries must be positive");
    }

    const std::size_t need = spec.shot + (kind == DumpKind::query ? spec.queries_per_class : 0);
    for (std::size_t c : candidates) {
        if (corpus.texts[c].size() < need) {
            throw DataError("class '" + corpus.labels[c] + "' has " + std::to_string(corpus.texts[c].size()) +
                            " examples, need " + std::to_string(need));
        }
    }

    Random rng(seed);
    const std::size_t way = std::min(spec.way, candidates.size());
    std::vector<std::size_t> slots = rng.choose(candidates.size(), way);
    for (std::size_t slot : slots) {
        const std::size_t cls = candidates[slot];
        std::vector<std::size_t> items = rng.choose(corpus.texts[cls].size(), need);
        const std::size_t begin = kind == DumpKind::query ? spec.shot : 0;
        for (std::size_t i = begin; i < items.size(); ++i) {
            const TokenizedText& text = corpus.texts[cls][items[i]];
            Tape<float> tape;
            Var<float> v = encoder::encode(tape, text, params.embeddings, params.encoder);
            if (kind == DumpKind::post_transform) v = induction::transform(v, params.induction);
            write_row(out, corpus.labels[cls], corpus.example_ids[cls][items[i]], v.value());
        }
    }
}

}  // namespace indnet
