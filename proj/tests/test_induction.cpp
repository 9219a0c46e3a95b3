#include <algorithm>

#include "doctest.h"
#include "indnet/errors.hpp"
#include "indnet/induction.hpp"
#include "indnet/ops.hpp"
#include "oracle.hpp"
#include "support.hpp"

using namespace indnet;

namespace {

std::vector<Var<double>> constants(Tape<double>& t, const std::vector<oracle::Vec>& vs) {
    std::vector<Var<double>> out;
    for (const auto& v : vs) out.push_back(t.constant({v.size()}, v));
    return out;
}

InductionParams<double> induction_params(std::size_t n) {
    return {Parameter<double>("induction.weight", Shape{n, n}), Parameter<double>("induction.bias", Shape{n})};
}

}  // namespace

TEST_CASE("squash examples") {
    Tape<double> t;
    CHECK(induction::squash(t.zeros({4})).to_vector() == std::vector<double>(4, 0.0));

    auto half = induction::squash(t.constant({2}, {0.6, 0.8})).to_vector();
    CHECK(half[0] == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(half[1] == doctest::Approx(0.4).epsilon(1e-15));

    auto big = induction::squash(t.constant({3}, {1, 2, 2}));
    CHECK(oracle::normv(big.to_vector()) == doctest::Approx(0.9).epsilon(1e-14));
    CHECK(oracle::cosine(big.to_vector(), {1, 2, 2}) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("transform examples") {
    const std::size_t n = 4;
    auto p = induction_params(n);
    Tape<double> t;
    Random rng(1);
    CHECK(induction::transform(t.constant({n}, testing::random_vector(rng, n)), p).to_vector() ==
          std::vector<double>(n, 0.0));

    for (std::size_t i = 0; i < n; ++i) p.weight.value[i * n + i] = 1.0;
    auto e = std::vector<double>{0.5, 0.5, 0.5, 0.5};
    auto out = induction::transform(t.constant({n}, e), p).to_vector();
    for (std::size_t i = 0; i < n; ++i) CHECK(out[i] == doctest::Approx(e[i] / 2).epsilon(1e-15));

    testing::randomize(p.weight, rng, 1.0);
    testing::randomize(p.bias, rng, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        auto x = testing::random_vector(rng, n);
        Tape<double> tt;
        auto got = induction::transform(tt.constant({n}, x), p).to_vector();
        auto expect = oracle::transform(x, p);
        for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(got[i] - expect[i]) < 1e-6);
    }
}

TEST_CASE("routing with a single sample squashes it") {
    Random rng(2);
    for (std::size_t iters : {1u, 3u, 7u}) {
        auto e = testing::random_vector(rng, 5);
        Tape<double> t;
        auto preds = constants(t, {e});
        auto c = induction::route_class<double>(preds, iters).to_vector();
        auto expect = oracle::squash(e);
        for (std::size_t i = 0; i < e.size(); ++i) CHECK(c[i] == doctest::Approx(expect[i]).epsilon(1e-14));
    }
}

TEST_CASE("routing with identical samples keeps uniform couplings") {
    Random rng(3);
    auto e = testing::random_vector(rng, 6, 0.5);
    Tape<double> t;
    auto preds = constants(t, {e, e, e, e});
    induction::CouplingLog<double> log;
    auto c = induction::route_class<double>(preds, 3, &log).to_vector();
    auto expect = oracle::squash(e);
    for (std::size_t i = 0; i < e.size(); ++i) CHECK(std::abs(c[i] - expect[i]) < 1e-6);
    REQUIRE(log.size() == 3);
    for (const auto& d : log)
        for (double v : d) CHECK(v == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("routing two orthogonal predictions matches the hand-unrolled value") {
    Tape<double> t;
    auto preds = constants(t, {{0.6, 0.0}, {0.0, 0.6}});
    auto c = induction::route_class<double>(preds, 3).to_vector();
    // Couplings stay at 1/2 by symmetry, so every iteration sees chat = (0.3, 0.3).
    const double n2 = 0.18;
    const double expect = 0.3 * std::sqrt(n2) / (1.0 + n2);
    CHECK(c[0] == doctest::Approx(expect).epsilon(1e-14));
    CHECK(c[1] == doctest::Approx(expect).epsilon(1e-14));
    auto direct = oracle::route({{0.6, 0.0}, {0.0, 0.6}}, 3);
    CHECK(c[0] == doctest::Approx(direct[0]).epsilon(1e-14));
}

TEST_CASE("routing matches the oracle on random classes") {
    Random rng(4);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t k = 1 + rng.below(6), iters = 1 + rng.below(5);
        std::vector<oracle::Vec> preds;
        for (std::size_t j = 0; j < k; ++j) preds.push_back(oracle::squash(testing::random_vector(rng, 5, 2.0)));
        Tape<double> t;
        induction::CouplingLog<double> log;
        auto c = induction::route_class<double>(constants(t, preds), iters, &log).to_vector();
        std::vector<oracle::Vec> expect_log;
        auto expect = oracle::route(preds, iters, &expect_log);
        for (std::size_t i = 0; i < c.size(); ++i) CHECK(std::abs(c[i] - expect[i]) < 1e-12);
        REQUIRE(log.size() == iters);
        for (std::size_t it = 0; it < iters; ++it)
            for (std::size_t j = 0; j < k; ++j) CHECK(std::abs(log[it][j] - expect_log[it][j]) < 1e-12);
    }
}

TEST_CASE("routing invariants hold on randomized classes") {
    Random rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t k = 2 + rng.below(8), n = 2 + rng.below(8);
        std::vector<oracle::Vec> preds;
        for (std::size_t j = 0; j < k; ++j) preds.push_back(oracle::squash(testing::random_vector(rng, n, 3.0)));
        Tape<float> t;
        std::vector<Var<float>> vars;
        for (const auto& p : preds) {
            std::vector<float> f(p.begin(), p.end());
            vars.push_back(t.constant({n}, f));
        }
        induction::CouplingLog<float> log;
        auto c = induction::route_class<float>(vars, 3, &log).to_vector();
        CHECK(oracle::normv(std::vector<double>(c.begin(), c.end())) < 1.0);
        for (const auto& d : log) {
            double total = 0.0;
            for (float v : d) total += v;
            CHECK(std::abs(total - 1.0) < 1e-6);
        }
        std::vector<Var<float>> shuffled(vars.rbegin(), vars.rend());
        auto c2 = induction::route_class<float>(shuffled, 3).to_vector();
        for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(c[i] - c2[i]) < 1e-6);
    }
}

TEST_CASE("an orthogonal outlier is down-weighted") {
    Random rng(6);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t k = 3 + rng.below(4);
        std::vector<oracle::Vec> preds;
        for (std::size_t j = 0; j + 1 < k; ++j) {
            oracle::Vec v{2.0, 0.0, 0.0, 0.0};
            for (std::size_t m = 1; m < 3; ++m) v[m] = rng.uniform(-0.3, 0.3);
            preds.push_back(oracle::squash(v));
        }
        preds.push_back(oracle::squash({0.0, 0.0, 0.0, 2.0}));
        Tape<double> t;
        induction::CouplingLog<double> log;
        induction::route_class<double>(constants(t, preds), 3, &log);
        CHECK(log.back().back() < 1.0 / double(k));
    }
}

TEST_CASE("routing argument errors") {
    Tape<double> t;
    std::vector<Var<double>> none;
    CHECK_THROWS_AS(induction::route_class<double>(none, 3), ContractError);
    auto one = constants(t, {{1.0, 0.0}});
    CHECK_THROWS_AS(induction::route_class<double>(one, 0), ConfigError);
    std::vector<std::vector<Var<double>>> classes{one, {}};
    CHECK_THROWS_AS(induction::induce_sum(classes), ContractError);
}

TEST_CASE("route and induce_routing cover every class") {
    auto p = induction_params(3);
    Random rng(7);
    testing::randomize(p.weight, rng, 1.0);
    Tape<double> t;
    std::vector<std::vector<Var<double>>> samples(3);
    for (auto& cls : samples)
        for (int j = 0; j < 2; ++j) cls.push_back(t.constant({3}, testing::random_vector(rng, 3)));
    std::vector<induction::CouplingLog<double>> logs;
    auto classes = induction::induce_routing(samples, p, 2, &logs);
    REQUIRE(classes.size() == 3);
    REQUIRE(logs.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        std::vector<oracle::Vec> preds;
        for (const auto& s : samples[i]) preds.push_back(oracle::transform(s.to_vector(), p));
        auto expect = oracle::route(preds, 2);
        auto got = classes[i].to_vector();
        for (std::size_t m = 0; m < 3; ++m) CHECK(std::abs(got[m] - expect[m]) < 1e-12);
        CHECK(logs[i].size() == 2);
    }
}

TEST_CASE("sum induction examples") {
    Tape<double> t;
    std::vector<std::vector<Var<double>>> one{constants(t, {{1, 2, 3}})};
    CHECK(induction::induce_sum(one)[0].to_vector() == std::vector<double>{1, 2, 3});
    std::vector<std::vector<Var<double>>> opposite{constants(t, {{1, -2}, {-1, 2}})};
    CHECK(induction::induce_sum(opposite)[0].to_vector() == std::vector<double>{0, 0});
    Random rng(8);
    std::vector<oracle::Vec> three;
    for (int j = 0; j < 3; ++j) three.push_back(testing::random_vector(rng, 4));
    std::vector<std::vector<Var<double>>> cls{constants(t, three)};
    auto c = induction::induce_sum(cls)[0].to_vector();
    for (std::size_t m = 0; m < 4; ++m) CHECK(c[m] == doctest::Approx(three[0][m] + three[1][m] + three[2][m]));
}

TEST_CASE("attention induction examples") {
    auto p = testing::random_params<double>(testing::micro_config(InductionKind::attention), 9);
    const std::size_t n = 2 * p.config.hidden;
    Random rng(9);
    Tape<double> t;
    auto e = testing::random_vector(rng, n);
    std::vector<std::vector<Var<double>>> one{constants(t, {e})};
    auto c1 = induction::induce_attention(one, p.induction_attention)[0].to_vector();
    for (std::size_t m = 0; m < n; ++m) CHECK(c1[m] == doctest::Approx(e[m]).epsilon(1e-15));

    std::vector<std::vector<Var<double>>> same{constants(t, {e, e, e})};
    auto c2 = induction::induce_attention(same, p.induction_attention)[0].to_vector();
    for (std::size_t m = 0; m < n; ++m) CHECK(c2[m] == doctest::Approx(e[m]).epsilon(1e-14));

    std::vector<oracle::Vec> rows;
    for (int j = 0; j < 4; ++j) rows.push_back(testing::random_vector(rng, n));
    std::vector<std::vector<Var<double>>> cls{constants(t, rows)};
    auto got = induction::induce_attention(cls, p.induction_attention)[0].to_vector();
    auto expect = oracle::pool(rows, oracle::attention_weights(rows, p.induction_attention));
    for (std::size_t m = 0; m < n; ++m) CHECK(std::abs(got[m] - expect[m]) < 1e-6);
}
