#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include <unistd.h>

#include "indnet/episode.hpp"
#include "indnet/model.hpp"
#include "indnet/random.hpp"
#include "indnet/tape.hpp"

namespace testing {

inline std::vector<double> random_vector(indnet::Random& rng, std::size_t n, double scale = 1.0) {
    std::vector<double> v(n);
    for (double& x : v) x = rng.uniform(-scale, scale);
    return v;
}

inline std::vector<float> random_floats(indnet::Random& rng, std::size_t n, double scale = 1.0) {
    std::vector<float> v(n);
    for (float& x : v) x = static_cast<float>(rng.uniform(-scale, scale));
    return v;
}

template <typename T>
void randomize(indnet::Parameter<T>& p, indnet::Random& rng, double scale) {
    for (T& v : p.value) v = static_cast<T>(rng.uniform(-scale, scale));
}

inline indnet::ModelConfig micro_config(indnet::InductionKind ind = indnet::InductionKind::routing,
                                        indnet::RelationKind rel = indnet::RelationKind::ntn) {
    indnet::ModelConfig c;
    c.vocab_rows = 13;
    c.embedding_dim = 6;
    c.hidden = 4;
    c.attention_dim = 4;
    c.slices = 2;
    c.iterations = 3;
    c.induction = ind;
    c.relation = rel;
    return c;
}

// Parameters at a scale that keeps activations away from saturation.
template <typename T>
indnet::ModelParams<T> random_params(const indnet::ModelConfig& config, std::uint64_t seed, double scale = 0.5) {
    indnet::Random rng(seed);
    std::vector<float> table(config.vocab_rows * config.embedding_dim);
    for (float& v : table) v = static_cast<float>(rng.uniform(-1.0, 1.0));
    auto params = indnet::init_params<T>(config, table, seed);
    for (auto* p : params.all()) {
        if (p->name != "embedding.table") randomize(*p, rng, scale);
    }
    return params;
}

inline indnet::TokenizedText random_text(indnet::Random& rng, std::size_t vocab_rows, std::size_t max_len) {
    indnet::TokenizedText t;
    const std::size_t len = 1 + rng.below(max_len);
    for (std::size_t i = 0; i < len; ++i) t.ids.push_back(rng.below(vocab_rows));
    return t;
}

inline indnet::EpisodeTexts random_episode(indnet::Random& rng, std::size_t vocab_rows, std::size_t way,
                                           std::size_t shot, std::size_t per_class, std::size_t max_len = 5) {
    indnet::EpisodeTexts texts;
    texts.support.resize(way);
    for (std::size_t i = 0; i < way; ++i) {
        for (std::size_t k = 0; k < shot; ++k) texts.support[i].push_back(random_text(rng, vocab_rows, max_len));
        for (std::size_t q = 0; q < per_class; ++q) {
            texts.queries.push_back(random_text(rng, vocab_rows, max_len));
            texts.labels.push_back(i);
        }
    }
    return texts;
}

// Max relative error between autodiff and central differences for a scalar
// function of some double inputs.
inline double primitive_gradcheck(
    std::vector<std::vector<double>> inputs, const std::vector<indnet::Shape>& shapes,
    const std::function<indnet::Var<double>(indnet::Tape<double>&, std::vector<indnet::Var<double>>&)>& fn,
    double step = 1e-5) {
    std::vector<indnet::Parameter<double>> params;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        params.emplace_back("x" + std::to_string(i), shapes[i]);
        params.back().value = inputs[i];
    }
    auto run = [&](indnet::Tape<double>& tape) {
        std::vector<indnet::Var<double>> vars;
        for (auto& p : params) vars.push_back(tape.parameter(p));
        return fn(tape, vars);
    };
    indnet::Tape<double> tape;
    tape.backward(run(tape));
    std::vector<std::vector<double>> analytic;
    for (auto& p : params) analytic.push_back(tape.parameter(p).grad());

    double worst = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < params.size(); ++i) {
        for (std::size_t j = 0; j < params[i].value.size(); ++j) {
            const double saved = params[i].value[j];
            params[i].value[j] = saved + step;
            indnet::Tape<double> plus;
            const double fp = run(plus).item();
            params[i].value[j] = saved - step;
            indnet::Tape<double> minus;
            const double fm = run(minus).item();
            params[i].value[j] = saved;
            const double numeric = (fp - fm) / (2 * step);
            worst = std::max(worst, std::abs(numeric - analytic[i][j]));
            scale = std::max({scale, std::abs(numeric), std::abs(analytic[i][j])});
        }
    }
    return scale < 1e-12 ? 0.0 : worst / scale;
}

class TempDir {
  public:
    explicit TempDir(const std::string& tag) {
        path_ = std::filesystem::temp_directory_path() /
                ("indnet_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter()++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

  private:
    static int& counter() {
        static int c = 0;
        return c;
    }
    std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream(path, std::ios::binary) << content;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace testing
