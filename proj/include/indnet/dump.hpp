#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "indnet/corpus.hpp"
#include "indnet/episode.hpp"
#include "indnet/model.hpp"

namespace indnet {

enum class DumpKind {
    pre_transform,   // support encodings e^s
    post_transform,  // squash(W_s e^s + b_s)
    query            // query encodings e^q
};

DumpKind parse_dump_kind(const std::string& name);

/// Writes `label,sample_id,v0,...,v{2u-1}` rows for one sampled episode.
/// `class_filter`, when given, restricts the candidate classes; an empty
/// filter yields the header only. sample_id is the example's line index in the corpus.
void dump_vectors(const ModelParams<float>& params, const EncodedCorpus& corpus, const EpisodeSpec& spec,
                  DumpKind kind, const std::optional<std::vector<std::string>>& class_filter, std::uint64_t seed,
                  std::ostream& out);

}  // namespace indnet
