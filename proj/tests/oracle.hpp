#pragma once
// Straight-line double-precision model used as an independent reference.
// Nothing here touches the tape or the ops library.

#include <cmath>
#include <cstddef>
#include <vector>

#include "indnet/episode.hpp"
#include "indnet/model.hpp"

namespace oracle {

using Vec = std::vector<double>;

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

inline double dotv(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double normv(const Vec& a) { return std::sqrt(dotv(a, a)); }

// y = W x for row-major W [rows x x.size()] starting at row `first`.
inline Vec apply(const std::vector<double>& w, const Vec& x, std::size_t rows, std::size_t first = 0) {
    Vec y(rows, 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < x.size(); ++c) y[r] += w[(first + r) * x.size() + c] * x[c];
    }
    return y;
}

inline Vec softmax(const Vec& x) {
    double m = x[0];
    for (double v : x) m = v > m ? v : m;
    Vec out(x.size());
    double z = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) z += out[i] = std::exp(x[i] - m);
    for (double& v : out) v /= z;
    return out;
}

inline Vec squash(const Vec& x) {
    const double n2 = dotv(x, x);
    const double k = std::sqrt(n2) / (1.0 + n2);
    Vec out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] * k;
    return out;
}

inline std::vector<Vec> lstm(const std::vector<Vec>& xs, const indnet::LstmParams<double>& p, bool reverse) {
    const std::size_t u = p.recurrent_weights.shape[1];
    const std::size_t steps = xs.size();
    std::vector<Vec> out(steps);
    Vec h(u, 0.0), c(u, 0.0);
    for (std::size_t s = 0; s < steps; ++s) {
        const std::size_t t = reverse ? steps - 1 - s : s;
        Vec zx = apply(p.input_weights.value, xs[t], 4 * u);
        Vec zh = apply(p.recurrent_weights.value, h, 4 * u);
        for (std::size_t j = 0; j < u; ++j) {
            const double ig = sigmoid(zx[j] + zh[j] + p.bias.value[j]);
            const double fg = sigmoid(zx[u + j] + zh[u + j] + p.bias.value[u + j]);
            const double og = sigmoid(zx[2 * u + j] + zh[2 * u + j] + p.bias.value[2 * u + j]);
            const double gg = std::tanh(zx[3 * u + j] + zh[3 * u + j] + p.bias.value[3 * u + j]);
            c[j] = fg * c[j] + ig * gg;
            h[j] = og * std::tanh(c[j]);
        }
        out[t] = h;
    }
    return out;
}

inline std::vector<Vec> embed(const indnet::TokenizedText& text, const indnet::Parameter<double>& table) {
    const std::size_t d = table.shape[1];
    std::vector<Vec> rows;
    for (std::size_t id : text.ids) rows.emplace_back(table.value.begin() + id * d, table.value.begin() + (id + 1) * d);
    return rows;
}

inline std::vector<Vec> bilstm(const std::vector<Vec>& xs, const indnet::EncoderParams<double>& p) {
    auto f = lstm(xs, p.forward, false);
    auto b = lstm(xs, p.backward, true);
    std::vector<Vec> rows(xs.size());
    for (std::size_t t = 0; t < xs.size(); ++t) {
        rows[t] = f[t];
        rows[t].insert(rows[t].end(), b[t].begin(), b[t].end());
    }
    return rows;
}

inline Vec attention_weights(const std::vector<Vec>& rows, const indnet::AttentionParams<double>& p) {
    const std::size_t da = p.score.shape[0];
    Vec scores(rows.size());
    for (std::size_t t = 0; t < rows.size(); ++t) {
        Vec z = apply(p.projection.value, rows[t], da);
        double s = 0.0;
        for (std::size_t k = 0; k < da; ++k) s += p.score.value[k] * std::tanh(z[k]);
        scores[t] = s;
    }
    return softmax(scores);
}

inline Vec pool(const std::vector<Vec>& rows, const Vec& a) {
    Vec e(rows[0].size(), 0.0);
    for (std::size_t t = 0; t < rows.size(); ++t) {
        for (std::size_t j = 0; j < e.size(); ++j) e[j] += a[t] * rows[t][j];
    }
    return e;
}

inline Vec encode(const indnet::TokenizedText& text, const indnet::ModelParams<double>& p) {
    auto h = bilstm(embed(text, p.embeddings), p.encoder);
    return pool(h, attention_weights(h, p.encoder.attention));
}

inline Vec transform(const Vec& e, const indnet::InductionParams<double>& p) {
    Vec z = apply(p.weight.value, e, e.size());
    for (std::size_t i = 0; i < z.size(); ++i) z[i] += p.bias.value[i];
    return squash(z);
}

// Routing over one class; `couplings` receives d for every iteration.
inline Vec route(const std::vector<Vec>& predictions, std::size_t iterations, std::vector<Vec>* couplings = nullptr) {
    const std::size_t k = predictions.size();
    Vec b(k, 0.0), c;
    for (std::size_t it = 0; it < iterations; ++it) {
        Vec d = softmax(b);
        if (couplings) couplings->push_back(d);
        Vec chat(predictions[0].size(), 0.0);
        for (std::size_t j = 0; j < k; ++j) {
            for (std::size_t m = 0; m < chat.size(); ++m) chat[m] += d[j] * predictions[j][m];
        }
        c = squash(chat);
        for (std::size_t j = 0; j < k; ++j) b[j] += dotv(predictions[j], c);
    }
    return c;
}

inline Vec ntn(const Vec& c, const Vec& q, const indnet::RelationParams<double>& p) {
    const std::size_t h = p.slices(), n = q.size();
    Vec v(h);
    for (std::size_t k = 0; k < h; ++k) {
        double s = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            double mq = 0.0;
            for (std::size_t col = 0; col < n; ++col) mq += p.tensor.value[(k * n + r) * n + col] * q[col];
            s += c[r] * mq;
        }
        v[k] = s > 0.0 ? s : 0.0;
    }
    return v;
}

inline double relation_score(const Vec& v, const indnet::RelationParams<double>& p) {
    return sigmoid(dotv(p.weight.value, v) + p.bias.value[0]);
}

inline double cosine(const Vec& a, const Vec& b) {
    const double na = normv(a), nb = normv(b);
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dotv(a, b) / (na * nb);
}

// [C x n] scores, row-major.
inline Vec episode_scores(const indnet::ModelParams<double>& p, const indnet::EpisodeTexts& texts) {
    const auto& cfg = p.config;
    std::vector<Vec> classes;
    for (const auto& support : texts.support) {
        std::vector<Vec> enc;
        for (const auto& t : support) enc.push_back(encode(t, p));
        switch (cfg.induction) {
            case indnet::InductionKind::routing: {
                std::vector<Vec> pred;
                for (const Vec& e : enc) pred.push_back(transform(e, p.induction));
                classes.push_back(route(pred, cfg.iterations));
                break;
            }
            case indnet::InductionKind::sum: {
                Vec c(enc[0].size(), 0.0);
                for (const Vec& e : enc) {
                    for (std::size_t m = 0; m < c.size(); ++m) c[m] += e[m];
                }
                classes.push_back(c);
                break;
            }
            case indnet::InductionKind::attention:
                classes.push_back(pool(enc, attention_weights(enc, p.induction_attention)));
                break;
        }
    }
    std::vector<Vec> queries;
    for (const auto& t : texts.queries) queries.push_back(encode(t, p));
    Vec scores;
    for (const Vec& c : classes) {
        for (const Vec& q : queries) {
            scores.push_back(cfg.relation == indnet::RelationKind::ntn ? relation_score(ntn(c, q, p.relation), p.relation)
                                                                      : cosine(c, q));
        }
    }
    return scores;
}

inline double loss(const std::vector<float>& scores, const std::vector<std::size_t>& labels, std::size_t way) {
    const std::size_t n = labels.size();
    float total = 0.0f;
    for (std::size_t i = 0; i < way; ++i) {
        for (std::size_t q = 0; q < n; ++q) {
            const float target = labels[q] == i ? 1.0f : 0.0f;
            const float diff = scores[i * n + q] - target;
            total += diff * diff;
        }
    }
    return total;
}

}  // namespace oracle
