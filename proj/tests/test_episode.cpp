#include <cstring>
#include <map>
#include <set>

#include "doctest.h"
#include "indnet/errors.hpp"
#include "indnet/synthetic.hpp"
#include "indnet/trainer.hpp"
#include "oracle.hpp"
#include "support.hpp"

using namespace indnet;

namespace {

EncodedCorpus toy_corpus(std::vector<std::size_t> sizes, std::size_t vocab_rows = 13) {
    EncodedCorpus c;
    Random rng(99);
    std::size_t next_id = 0;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        c.labels.push_back("class_" + std::to_string(i));
        c.texts.emplace_back();
        c.example_ids.emplace_back();
        for (std::size_t j = 0; j < sizes[i]; ++j) {
            c.texts.back().push_back(testing::random_text(rng, vocab_rows, 5));
            c.example_ids.back().push_back(next_id++);
        }
    }
    return c;
}

struct SyntheticSetup {
    SyntheticData data;
    EncodedCorpus encoded;
    ModelConfig config;
};

SyntheticSetup synthetic_setup(double noise, std::size_t classes, std::size_t dim, std::uint64_t seed) {
    SyntheticConfig sc;
    sc.classes = classes;
    sc.dim = dim;
    sc.noise = noise;
    sc.seed = seed;
    SyntheticSetup s{generate_synthetic(sc), {}, {}};
    s.encoded = encode_corpus(s.data.corpus, s.data.table, 64);
    s.config.vocab_rows = s.data.table.rows();
    s.config.embedding_dim = dim;
    s.config.hidden = 8;
    s.config.attention_dim = 8;
    s.config.slices = 4;
    return s;
}

}  // namespace

TEST_CASE("episode spec validation") {
    CHECK_NOTHROW(EpisodeSpec{2, 1, 1}.validate());
    CHECK_THROWS_AS((EpisodeSpec{1, 5, 5}.validate()), ConfigError);
    CHECK_THROWS_AS((EpisodeSpec{2, 0, 5}.validate()), ConfigError);
    CHECK_THROWS_AS((EpisodeSpec{2, 5, 0}.validate()), ConfigError);
}

TEST_CASE("exactly sized corpus uses every sample with disjoint support and query") {
    const EpisodeSpec spec{3, 2, 4};
    auto corpus = toy_corpus({6, 6, 6});
    Random rng(1);
    for (int trial = 0; trial < 20; ++trial) {
        Episode ep = sample_episode(corpus, spec, rng);
        REQUIRE(ep.way() == 3);
        std::set<std::size_t> slots(ep.classes.begin(), ep.classes.end());
        CHECK(slots.size() == 3);
        for (std::size_t slot = 0; slot < 3; ++slot) {
            std::set<std::size_t> used(ep.support[slot].begin(), ep.support[slot].end());
            CHECK(used.size() == 2);
            for (std::size_t q = 0; q < ep.num_queries(); ++q) {
                if (ep.query_slot[q] != slot) continue;
                CHECK(used.count(ep.query_item[q]) == 0);
                used.insert(ep.query_item[q]);
            }
            CHECK(used.size() == 6);
        }
        for (std::size_t q = 1; q < ep.num_queries(); ++q) CHECK(ep.query_slot[q - 1] <= ep.query_slot[q]);
    }
}

TEST_CASE("sampling is deterministic under a seed") {
    auto corpus = toy_corpus({10, 10, 10, 10});
    const EpisodeSpec spec{2, 3, 4};
    Random a(7), b(7);
    for (int i = 0; i < 10; ++i) {
        Episode x = sample_episode(corpus, spec, a), y = sample_episode(corpus, spec, b);
        CHECK(x.classes == y.classes);
        CHECK(x.support == y.support);
        CHECK(x.query_item == y.query_item);
    }
}

TEST_CASE("class pairs are sampled uniformly") {
    auto corpus = toy_corpus({5, 5, 5});
    const EpisodeSpec spec{2, 1, 1};
    Random rng(2024);
    std::map<std::pair<std::size_t, std::size_t>, int> counts;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
        Episode ep = sample_episode(corpus, spec, rng);
        auto pair = std::minmax(ep.classes[0], ep.classes[1]);
        ++counts[{pair.first, pair.second}];
    }
    CHECK(counts.size() == 3);
    for (const auto& [pair, c] : counts) CHECK(std::abs(double(c) / n - 1.0 / 3.0) < 0.02);
}

TEST_CASE("insufficient data names the deficient class") {
    auto corpus = toy_corpus({8, 3, 8});
    try {
        require_sampleable(corpus, EpisodeSpec{2, 2, 2});
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("class_1") != std::string::npos);
    }
    CHECK_THROWS_AS(require_sampleable(toy_corpus({8, 8}), EpisodeSpec{3, 1, 1}), DataError);
    Random rng(1);
    CHECK_THROWS_AS(sample_episode(corpus, EpisodeSpec{2, 2, 2}, rng), DataError);
}

TEST_CASE("identical support sets score identically") {
    auto params = testing::random_params<double>(testing::micro_config(), 3);
    Random rng(3);
    auto texts = testing::random_episode(rng, params.config.vocab_rows, 2, 3, 2);
    texts.support[1] = texts.support[0];
    Tape<double> t;
    auto out = forward_episode(t, params, texts);
    const std::size_t n = texts.queries.size();
    auto s = out.scores.to_vector();
    for (std::size_t q = 0; q < n; ++q) CHECK(std::abs(s[q] - s[n + q]) < 1e-6);
}

TEST_CASE("sum and cosine pick the class whose only support text is the query") {
    auto params = testing::random_params<float>(testing::micro_config(InductionKind::sum, RelationKind::cosine), 4);
    Random rng(4);
    for (int trial = 0; trial < 20; ++trial) {
        auto texts = testing::random_episode(rng, params.config.vocab_rows, 3, 1, 0);
        texts.queries = {texts.support[0][0]};
        texts.labels = {0};
        Tape<float> t;
        auto out = forward_episode(t, params, texts);
        CHECK(predict(out.scores.value(), 3)[0] == 0);
    }
}

TEST_CASE("forward pass matches the straight-line oracle for every variant") {
    Random rng(5);
    const std::vector<std::pair<InductionKind, RelationKind>> variants{{InductionKind::routing, RelationKind::ntn},
                                                                      {InductionKind::sum, RelationKind::ntn},
                                                                      {InductionKind::attention, RelationKind::ntn},
                                                                      {InductionKind::routing, RelationKind::cosine}};
    for (auto [ind, rel] : variants) {
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            auto p64 = testing::random_params<double>(testing::micro_config(ind, rel), seed);
            auto p32 = convert_params<float>(p64);
            auto p64_rounded = convert_params<double>(p32);
            auto texts = testing::random_episode(rng, p64.config.vocab_rows, 2, 2, 2);
            Tape<float> t;
            auto got = forward_episode(t, p32, texts).scores.to_vector();
            auto expect = oracle::episode_scores(p64_rounded, texts);
            REQUIRE(got.size() == expect.size());
            for (std::size_t i = 0; i < got.size(); ++i) CHECK(std::abs(got[i] - expect[i]) < 1e-5);
        }
    }
}

TEST_CASE("cosine scores are mapped into the unit interval for the loss") {
    auto params = testing::random_params<double>(testing::micro_config(InductionKind::routing, RelationKind::cosine), 6);
    Random rng(6);
    auto texts = testing::random_episode(rng, params.config.vocab_rows, 2, 2, 2);
    Tape<double> t;
    auto out = forward_episode(t, params, texts);
    auto r = out.scores.to_vector(), mapped = out.loss_scores.to_vector();
    for (std::size_t i = 0; i < r.size(); ++i) CHECK(mapped[i] == doctest::Approx((r[i] + 1) / 2).epsilon(1e-15));
}

TEST_CASE("episode loss examples") {
    Tape<float> t;
    std::vector<std::size_t> labels{0, 1};
    CHECK(episode_loss(t.constant({2, 2}, {1, 0, 0, 1}), std::span<const std::size_t>(labels)).item() == 0.0f);
    std::vector<std::size_t> one{0};
    CHECK(episode_loss(t.constant({2, 1}, {0.5f, 0.5f}), std::span<const std::size_t>(one)).item() == 0.5f);
    std::vector<std::size_t> bad{2};
    CHECK_THROWS_AS(episode_loss(t.constant({2, 1}, {0.5f, 0.5f}), std::span<const std::size_t>(bad)), ContractError);
}

TEST_CASE("episode loss matches a naive double loop exactly") {
    Random rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t way = 2 + rng.below(5), n = 1 + rng.below(12);
        std::vector<float> scores(way * n);
        for (float& s : scores) s = static_cast<float>(rng.uniform());
        std::vector<std::size_t> labels(n);
        for (auto& l : labels) l = rng.below(way);
        Tape<float> t;
        const float got = episode_loss(t.constant({way, n}, scores), std::span<const std::size_t>(labels)).item();
        CHECK(got == static_cast<float>(oracle::loss(scores, labels, way)));
    }
}

TEST_CASE("predict examples") {
    std::vector<float> a{0.9f, 0.1f};
    CHECK(predict<float>(a, 2) == std::vector<std::size_t>{0});
    std::vector<float> tie{0.5f, 0.5f};
    CHECK(predict<float>(tie, 2) == std::vector<std::size_t>{0});
    std::vector<float> three{0.1f, 0.2f, 0.7f};
    CHECK(predict<float>(three, 3) == std::vector<std::size_t>{2});
    // [C x n] layout: two queries.
    std::vector<float> two{0.2f, 0.8f, 0.9f, 0.1f};
    CHECK(predict<float>(two, 2) == std::vector<std::size_t>{1, 0});
}

TEST_CASE("zero episodes leave parameters unchanged") {
    auto s = synthetic_setup(0.0, 4, 8, 1);
    auto params = init_params<float>(s.config, s.data.table.matrix(), 1);
    TrainOptions opt;
    opt.episodes = 0;
    opt.spec = {2, 2, 5};
    opt.val_fraction = 0.0;
    auto result = train(s.encoded, params, opt);
    CHECK(result.log.empty());
    CHECK(result.episodes_run == 0);
    auto before = params.all();
    auto after = result.params.all();
    for (std::size_t i = 0; i < before.size(); ++i) CHECK(before[i]->value == after[i]->value);
}

TEST_CASE("training on a separable corpus fits it and lowers held-out loss") {
    auto s = synthetic_setup(0.0, 6, 8, 2);
    auto params = init_params<float>(s.config, s.data.table.matrix(), 2);
    TrainOptions opt;
    opt.episodes = 300;
    opt.spec = {2, 2, 20};
    opt.val_fraction = 0.0;
    opt.eval_every = 50;
    opt.optimizer.learning_rate = 0.1;

    Random held_rng(77);
    const EpisodeTexts held = materialize(s.encoded, sample_episode(s.encoded, EpisodeSpec{2, 2, 10}, held_rng));
    auto held_loss = [&](const ModelParams<float>& p) {
        Tape<float> t;
        auto out = forward_episode(t, p, held);
        return episode_loss(out.loss_scores, std::span<const std::size_t>(held.labels)).item();
    };
    std::vector<float> curve{held_loss(params)};
    TrainHooks hooks;
    hooks.on_checkpoint = [&](const ModelParams<float>& p, std::size_t) { curve.push_back(held_loss(p)); };
    auto result = train(s.encoded, params, opt, hooks);
    REQUIRE(result.log.size() == 6);
    CHECK(result.log.back().train_acc >= 0.95);
    CHECK(curve.back() < curve.front());
    CHECK(*std::min_element(curve.begin() + 1, curve.end()) < curve.front());
}

TEST_CASE("non-finite values abort training with the tensor name") {
    auto s = synthetic_setup(0.0, 4, 8, 3);
    auto params = init_params<float>(s.config, s.data.table.matrix(), 3);
    params.relation.weight.value[0] = std::numeric_limits<float>::quiet_NaN();
    TrainOptions opt;
    opt.episodes = 5;
    opt.spec = {2, 2, 5};
    opt.val_fraction = 0.0;
    try {
        train(s.encoded, params, opt);
        FAIL("expected NumericError");
    } catch (const NumericError& e) {
        CHECK(std::string(e.what()).find("relation.weight") != std::string::npos);
    }
}

TEST_CASE("untrained accuracy is near chance and evaluation is deterministic") {
    auto s = synthetic_setup(1.0, 8, 8, 4);
    auto params = init_params<float>(s.config, s.data.table.matrix(), 4);
    const EpisodeSpec spec{5, 2, 10};
    auto a = evaluate(s.encoded, params, spec, 600, 11);
    CHECK(std::abs(a.mean - 0.2) <= 0.05);
    auto b = evaluate(s.encoded, params, spec, 600, 11, 3);
    CHECK(std::memcmp(&a.mean, &b.mean, sizeof(double)) == 0);
    CHECK(a.per_episode == b.per_episode);
    CHECK(a.per_episode.size() == 600);
}

TEST_CASE("validation classes are held out of training") {
    TrainOptions opt;
    opt.spec = {2, 2, 5};
    opt.val_fraction = 0.1;
    CHECK(validation_classes(20, opt).size() == 2);
    CHECK(validation_classes(3, opt).empty());
    opt.val_fraction = 0.0;
    CHECK(validation_classes(20, opt).empty());
    opt.val_fraction = 0.25;
    auto v = validation_classes(40, opt);
    CHECK(v.size() == 10);
    CHECK(std::set<std::size_t>(v.begin(), v.end()).size() == 10);
}

TEST_CASE("metrics records serialize as one JSON line") {
    MetricsRecord r{100, 1.5, 0.75, std::nullopt};
    CHECK(r.to_json() == R"({"episode":100,"loss":1.5,"train_acc":0.75,"val_acc":null})");
    r.val_acc = 0.5;
    CHECK(r.to_json() == R"({"episode":100,"loss":1.5,"train_acc":0.75,"val_acc":0.5})");
}
