#include "indnet/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "indnet/config.hpp"
#include "indnet/errors.hpp"

namespace indnet {
namespace {

void append_le(std::string& out, float v) {
    std::uint32_t bits = std::bit_cast<std::uint32_t>(v);
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xffu));
}

float read_le(const char* p) {
    std::uint32_t bits = 0;
    for (int i = 0; i < 4; ++i) bits |= static_cast<std::uint32_t>(static_cast<unsigned char>(p[i])) << (8 * i);
    return std::bit_cast<float>(bits);
}

std::string dims_string(const Shape& shape) {
    std::string s;
    for (std::size_t i = 0; i < shape.rank(); ++i) s += (i ? "x" : "") + std::to_string(shape[i]);
    return s;
}

}  // namespace

EmbeddingTable Checkpoint::table() const {
    EmbeddingTable t(params.config.embedding_dim);
    const std::size_t d = params.config.embedding_dim;
    std::vector<float> row(d);
    for (std::size_t r = 0; r < vocabulary.size(); ++r) {
        std::copy_n(params.embeddings.value.begin() + static_cast<std::ptrdiff_t>(r * d), d, row.begin());
        t.add(vocabulary[r], row);
    }
    return t;
}

void save_checkpoint(const std::filesystem::path& path, const ModelParams<float>& params,
                     const std::vector<std::string>& vocabulary, const nlohmann::json& config) {
    if (vocabulary.size() + 1 != params.config.vocab_rows) {
        throw ContractError("checkpoint: vocabulary has " + std::to_string(vocabulary.size()) +
                            " tokens for a table of " + std::to_string(params.config.vocab_rows) + " rows");
    }
    nlohmann::json snapshot = config.is_object() ? config : nlohmann::json::object();
    snapshot["model"] = to_json(params.config);

    std::ostringstream header;
    header << "indnet-checkpoint " << kCheckpointVersion << '\n';
    header << "config " << snapshot.dump() << '\n';
    header << "vocab " << vocabulary.size() << '\n';
    for (const std::string& tok : vocabulary) header << tok << '\n';

    std::string payload;
    const auto tensors = params.all();
    header << "tensors " << tensors.size() << '\n';
    for (const Parameter<float>* p : tensors) {
        header << p->name << ' ' << dims_string(p->shape) << ' ' << payload.size() << ' ' << p->value.size() << '\n';
        for (float v : p->value) append_le(payload, v);
    }
    header << "payload " << payload.size() << '\n';

    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write checkpoint " + path.string());
    const std::string h = header.str();
    out.write(h.data(), static_cast<std::streamsize>(h.size()));
    out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    if (!out) throw DataError("failed writing checkpoint " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read checkpoint " + path.string());
    const std::string where = "checkpoint " + path.string() + ": ";
    std::string line;
    auto next_line = [&](const char* what) {
        if (!std::getline(in, line)) throw DataError(where + "truncated header, expected " + what);
    };
    auto expect_keyword = [&](const char* keyword) {
        const std::string prefix = std::string(keyword) + " ";
        if (line.rfind(prefix, 0) != 0) throw DataError(where + "expected '" + keyword + "' line, got '" + line + "'");
        return line.substr(prefix.size());
    };
    auto parse_count = [&](const std::string& s) {
        try {
            std::size_t used = 0;
            const unsigned long long v = std::stoull(s, &used);
            if (used != s.size()) throw std::invalid_argument(s);
            return static_cast<std::size_t>(v);
        } catch (const std::exception&) {
            throw DataError(where + "bad count '" + s + "'");
        }
    };

    next_line("magic");
    const std::string magic = "indnet-checkpoint ";
    if (line.rfind(magic, 0) != 0) throw DataError(where + "not an indnet checkpoint");
    if (line.substr(magic.size()) != std::to_string(kCheckpointVersion)) {
        throw DataError(where + "unsupported checkpoint version '" + line.substr(magic.size()) + "' (this build reads " +
                        std::to_string(kCheckpointVersion) + ")");
    }

    Checkpoint ckpt;
    next_line("config");
    try {
        ckpt.config = nlohmann::json::parse(expect_keyword("config"));
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError(where + "bad config JSON: " + e.what());
    }
    if (!ckpt.config.contains("model")) throw DataError(where + "config snapshot lacks the model section");
    ModelConfig model;
    try {
        from_json(ckpt.config["model"], model);
        ckpt.params = make_params<float>(model);
    } catch (const ConfigError& e) {
        throw DataError(where + e.what());
    }

    next_line("vocab");
    const std::size_t vocab = parse_count(expect_keyword("vocab"));
    for (std::size_t i = 0; i < vocab; ++i) {
        next_line("vocabulary token");
        ckpt.vocabulary.push_back(line);
    }
    if (vocab + 1 != model.vocab_rows) throw DataError(where + "vocabulary size does not match the embedding table");

    next_line("tensors");
    const std::size_t count = parse_count(expect_keyword("tensors"));
    struct Entry {
        std::string dims;
        std::size_t offset, floats;
    };
    std::map<std::string, Entry> manifest;
    for (std::size_t i = 0; i < count; ++i) {
        next_line("tensor entry");
        std::istringstream fields(line);
        std::string name, dims, offset, floats, extra;
        if (!(fields >> name >> dims >> offset >> floats) || (fields >> extra)) {
            throw DataError(where + "bad tensor entry '" + line + "'");
        }
        if (!manifest.emplace(name, Entry{dims, parse_count(offset), parse_count(floats)}).second) {
            throw DataError(where + "duplicate tensor '" + name + "'");
        }
    }
    next_line("payload");
    const std::size_t payload_bytes = parse_count(expect_keyword("payload"));

    std::string payload((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (payload.size() != payload_bytes) {
        throw DataError(where + "payload size mismatch: manifest says " + std::to_string(payload_bytes) +
                        " bytes, file has " + std::to_string(payload.size()));
    }

    auto params = ckpt.params.all();
    if (manifest.size() != params.size()) {
        throw DataError(where + "manifest lists " + std::to_string(manifest.size()) + " tensors, model has " +
                        std::to_string(params.size()));
    }
    for (Parameter<float>* p : params) {
        auto it = manifest.find(p->name);
        if (it == manifest.end()) throw DataError(where + "missing tensor '" + p->name + "'");
        const Entry& e = it->second;
        if (e.dims != dims_string(p->shape) || e.floats != p->value.size()) {
            throw DataError(where + "tensor '" + p->name + "' has shape " + e.dims + ", expected " +
                            dims_string(p->shape));
        }
        if (e.offset > payload.size() || (payload.size() - e.offset) / 4 < e.floats) {
            throw DataError(where + "payload size mismatch for tensor '" + p->name + "'");
        }
        for (std::size_t i = 0; i < e.floats; ++i) p->value[i] = read_le(payload.data() + e.offset + 4 * i);
    }
    return ckpt;
}

}  // namespace indnet
