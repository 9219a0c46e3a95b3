#include "indnet/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "indnet/encoder.hpp"
#include "indnet/episode.hpp"
#include "indnet/induction.hpp"
#include "indnet/ops.hpp"
#include "indnet/random.hpp"
#include "indnet/relation.hpp"

namespace indnet {
namespace {

std::vector<double> random_vector(Random& rng, std::size_t n, double scale) {
    std::vector<double> v(n);
    for (double& x : v) x = scale * rng.normal();
    return v;
}

TokenizedText random_text(Random& rng, std::size_t vocab_rows, std::size_t min_len, std::size_t max_len) {
    TokenizedText t;
    const std::size_t len = min_len + rng.below(max_len - min_len + 1);
    // Excludes the OOV row so every token carries signal.
    for (std::size_t i = 0; i < len; ++i) t.ids.push_back(rng.below(vocab_rows - 1));
    return t;
}

}  // namespace

double GradCheckReport::max_rel_error() const {
    double worst = 0.0;
    for (const auto& e : entries) worst = std::max(worst, e.rel_error);
    return worst;
}

double GradCheckReport::max_rel_error(const std::string& scope) const {
    double worst = 0.0;
    for (const auto& e : entries) {
        if (e.scope == scope) worst = std::max(worst, e.rel_error);
    }
    return worst;
}

std::vector<GradCheckEntry> check_gradients(const std::string& scope, std::span<Parameter<double>* const> params,
                                            const LossBuilder& loss, double step) {
    for (Parameter<double>* p : params) p->zero_grad();
    {
        Tape<double> tape;
        Var<double> l = loss(tape);
        tape.backward(l);
        tape.accumulate_grads(params);
    }

    auto evaluate = [&loss]() {
        Tape<double> tape;
        return loss(tape).item();
    };

    std::vector<GradCheckEntry> out;
    for (Parameter<double>* p : params) {
        GradCheckEntry e{scope, p->name, p->value.size(), 0.0, 0.0};
        double max_analytic = 0.0, max_numeric = 0.0;
        for (std::size_t i = 0; i < p->value.size(); ++i) {
            const double saved = p->value[i];
            p->value[i] = saved + step;
            const double up = evaluate();
            p->value[i] = saved - step;
            const double down = evaluate();
            p->value[i] = saved;
            const double numeric = (up - down) / (2.0 * step);
            const double analytic = p->grad[i];
            e.max_abs_error = std::max(e.max_abs_error, std::abs(analytic - numeric));
            max_analytic = std::max(max_analytic, std::abs(analytic));
            max_numeric = std::max(max_numeric, std::abs(numeric));
        }
        const double scale = std::max(max_analytic, max_numeric);
        e.rel_error = scale > 1e-12 ? e.max_abs_error / scale : 0.0;
        out.push_back(std::move(e));
    }
    return out;
}

GradCheckReport run_gradcheck(const GradCheckOptions& o) {
    GradCheckReport report;
    Random rng(o.seed);

    ModelConfig config;
    config.vocab_rows = o.vocab + 1;
    config.embedding_dim = o.embedding_dim;
    config.hidden = o.hidden;
    config.attention_dim = o.attention_dim;
    config.slices = o.slices;
    config.iterations = o.iterations;
    config.train_embeddings = true;

    std::vector<float> table(config.vocab_rows * config.embedding_dim);
    for (float& v : table) v = static_cast<float>(rng.normal());
    ModelParams<double> params = init_params<double>(config, table, rng.next());
    // Biases start at constants; randomize them so every gradient path is exercised.
    for (Parameter<double>* p : {&params.induction.bias, &params.relation.bias}) {
        for (double& v : p->value) v = 0.1 * rng.normal();
    }
    const std::size_t width = config.encoding_dim();

    auto append = [&report](std::vector<GradCheckEntry> entries) {
        report.entries.insert(report.entries.end(), entries.begin(), entries.end());
    };

    // Encoder: loss = w . encode(text).
    {
        const TokenizedText text = random_text(rng, config.vocab_rows, 3, 5);
        const std::vector<double> w = random_vector(rng, width, 1.0);
        std::vector<Parameter<double>*> ps = {&params.embeddings,
                                              &params.encoder.forward.input_weights,
                                              &params.encoder.forward.recurrent_weights,
                                              &params.encoder.forward.bias,
                                              &params.encoder.backward.input_weights,
                                              &params.encoder.backward.recurrent_weights,
                                              &params.encoder.backward.bias,
                                              &params.encoder.attention.projection,
                                              &params.encoder.attention.score};
        append(check_gradients(
            "encoder", ps,
            [&](Tape<double>& tape) {
                Var<double> e = encoder::encode(tape, text, params.embeddings, params.encoder);
                return ops::dot(e, tape.constant(Shape{width}, w));
            },
            o.step));
    }

    // Induction: 2 classes x 3 samples, loss = sum_i w_i . c_i.
    {
        std::vector<std::vector<std::vector<double>>> samples(2);
        for (auto& cls : samples)
            for (int j = 0; j < 3; ++j) cls.push_back(random_vector(rng, width, 0.7));
        const std::vector<double> w0 = random_vector(rng, width, 1.0);
        const std::vector<double> w1 = random_vector(rng, width, 1.0);
        auto build = [&](Tape<double>& tape, bool attention) {
            std::vector<std::vector<Var<double>>> vars(samples.size());
            for (std::size_t i = 0; i < samples.size(); ++i)
                for (const auto& s : samples[i]) vars[i].push_back(tape.constant(Shape{width}, s));
            auto classes = attention ? induction::induce_attention(vars, params.induction_attention)
                                     : induction::induce_routing(vars, params.induction, config.iterations);
            return ops::add(ops::dot(classes[0], tape.constant(Shape{width}, w0)),
                            ops::dot(classes[1], tape.constant(Shape{width}, w1)));
        };
        std::vector<Parameter<double>*> routing = {&params.induction.weight, &params.induction.bias};
        append(check_gradients("induction", routing, [&](Tape<double>& t) { return build(t, false); }, o.step));
        std::vector<Parameter<double>*> attn = {&params.induction_attention.projection,
                                                &params.induction_attention.score};
        append(check_gradients("induction", attn, [&](Tape<double>& t) { return build(t, true); }, o.step));
    }

    // Relation: scores of three (class, query) pairs.
    {
        std::vector<std::vector<double>> cs, qs;
        for (int k = 0; k < 3; ++k) {
            cs.push_back(random_vector(rng, width, 0.5));
            qs.push_back(random_vector(rng, width, 0.5));
        }
        std::vector<Parameter<double>*> ps = {&params.relation.tensor, &params.relation.weight, &params.relation.bias};
        append(check_gradients(
            "relation", ps,
            [&](Tape<double>& tape) {
                std::vector<Var<double>> scores;
                for (std::size_t k = 0; k < cs.size(); ++k) {
                    Var<double> v = relation::ntn(tape.constant(Shape{width}, cs[k]), tape.constant(Shape{width}, qs[k]),
                                                  params.relation);
                    scores.push_back(relation::relation_score(v, params.relation));
                }
                return ops::sum(ops::concat<double>(scores));
            },
            o.step));
    }

    // End to end on a 2-way 2-shot micro-episode, for every variant.
    {
        EpisodeTexts texts;
        texts.support.resize(2);
        for (auto& cls : texts.support)
            for (int j = 0; j < 2; ++j) cls.push_back(random_text(rng, config.vocab_rows, 2, 4));
        for (std::size_t slot = 0; slot < 2; ++slot) {
            for (int j = 0; j < 2; ++j) {
                texts.queries.push_back(random_text(rng, config.vocab_rows, 2, 4));
                texts.labels.push_back(slot);
            }
        }
        const std::pair<InductionKind, RelationKind> variants[] = {
            {InductionKind::routing, RelationKind::ntn},
            {InductionKind::sum, RelationKind::ntn},
            {InductionKind::attention, RelationKind::ntn},
            {InductionKind::routing, RelationKind::cosine}};
        for (auto [ind, rel] : variants) {
            params.config.induction = ind;
            params.config.relation = rel;
            std::vector<Parameter<double>*> ps = params.all();
            append(check_gradients(
                "end-to-end/" + to_string(ind) + "+" + to_string(rel), ps,
                [&](Tape<double>& tape) {
                    EpisodeForward<double> out = forward_episode(tape, params, texts);
                    return episode_loss(out.loss_scores, std::span<const std::size_t>(texts.labels));
                },
                o.step));
        }
        params.config.induction = InductionKind::routing;
        params.config.relation = RelationKind::ntn;
    }
    return report;
}

}  // namespace indnet
