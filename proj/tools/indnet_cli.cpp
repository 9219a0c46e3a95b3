// indnet: command-line front end for training, evaluating and inspecting
// few-shot induction models.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

#include "indnet/checkpoint.hpp"
#include "indnet/config.hpp"
#include "indnet/corpus.hpp"
#include "indnet/dump.hpp"
#include "indnet/embeddings.hpp"
#include "indnet/episode.hpp"
#include "indnet/errors.hpp"
#include "indnet/gradcheck.hpp"
#include "indnet/kernels.hpp"
#include "indnet/synthetic.hpp"
#include "indnet/trainer.hpp"

namespace {

using namespace indnet;

enum Exit : int { ok = 0, usage = 1, data_error = 2, numeric_failure = 3 };

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::vector<std::string> train_labels_of(const nlohmann::json& config) {
    std::vector<std::string> labels;
    if (config.contains("train_labels") && config["train_labels"].is_array()) {
        for (const auto& l : config["train_labels"]) labels.push_back(l.get<std::string>());
    }
    return labels;
}

struct TrainArgs {
    std::string config;
    std::optional<std::size_t> episodes, way, shot, queries, iterations, threads;
    std::optional<std::uint64_t> seed;
    std::optional<double> learning_rate;
    std::optional<std::string> induction, relation, checkpoint, metrics;
};

int run_train(const TrainArgs& args) {
    const std::filesystem::path config_path = resolve_data_path(args.config);
    if (!std::filesystem::exists(config_path)) throw DataError("config file not found: " + config_path.string());
    TrainConfig cfg = load_train_config(config_path);
    if (args.episodes) cfg.options.episodes = *args.episodes;
    if (args.way) cfg.options.spec.way = *args.way;
    if (args.shot) cfg.options.spec.shot = *args.shot;
    if (args.queries) cfg.options.spec.queries_per_class = *args.queries;
    if (args.iterations) cfg.model.iterations = *args.iterations;
    if (args.threads) cfg.threads = *args.threads;
    if (args.seed) cfg.options.seed = *args.seed;
    if (args.learning_rate) cfg.options.optimizer.learning_rate = *args.learning_rate;
    if (args.induction) cfg.model.induction = parse_induction(*args.induction);
    if (args.relation) cfg.model.relation = parse_relation(*args.relation);
    if (args.checkpoint) cfg.checkpoint = *args.checkpoint;
    if (args.metrics) cfg.metrics = *args.metrics;
    cfg.validate();

    const EmbeddingTable table = load_embeddings(resolve_data_path(cfg.embeddings), cfg.vocab_limit);
    const Corpus train_corpus = load_corpus(resolve_data_path(cfg.train_data));
    std::optional<Corpus> test_corpus;
    if (!cfg.test_data.empty()) {
        test_corpus = load_corpus(resolve_data_path(cfg.test_data));
        require_disjoint_labels(train_corpus, *test_corpus);
    }

    cfg.model.vocab_rows = table.rows();
    cfg.model.embedding_dim = table.dim();
    ModelParams<float> params = init_params<float>(cfg.model, table.matrix(), cfg.options.seed);
    const EncodedCorpus encoded = encode_corpus(train_corpus, table, cfg.model.max_length);

    nlohmann::json snapshot = to_json(cfg);
    snapshot["train_labels"] = train_corpus.labels();

    std::ofstream metrics;
    if (!cfg.metrics.empty()) {
        metrics.open(cfg.metrics, std::ios::trunc);
        if (!metrics) throw DataError("cannot write metrics file " + cfg.metrics.string());
    }
    TrainHooks hooks;
    hooks.on_metrics = [&](const MetricsRecord& r) {
        const std::string line = r.to_json();
        std::cout << line << std::endl;
        if (metrics.is_open()) metrics << line << std::endl;
    };
    if (!cfg.checkpoint.empty()) {
        hooks.on_checkpoint = [&](const ModelParams<float>& p, std::size_t) {
            save_checkpoint(cfg.checkpoint, p, table.tokens(), snapshot);
        };
    }

    TrainResult result = train(encoded, std::move(params), cfg.options, hooks);
    if (!cfg.checkpoint.empty()) {
        save_checkpoint(cfg.checkpoint, result.params, table.tokens(), snapshot);
        std::cout << "checkpoint: " << cfg.checkpoint.string() << '\n';
    }
    std::cout << "episodes: " << result.episodes_run << '\n';
    if (result.best_val_acc) std::cout << "best validation accuracy: " << fmt(*result.best_val_acc) << '\n';

    if (test_corpus) {
        const EncodedCorpus test = encode_corpus(*test_corpus, table, cfg.model.max_length);
        const EpisodeSpec spec{cfg.options.spec.way, cfg.options.spec.shot, cfg.test_queries};
        const EvalResult eval = evaluate(test, result.params, spec, cfg.test_episodes, cfg.options.seed, cfg.threads);
        if (!std::isfinite(eval.mean)) throw NumericError("test accuracy is not finite");
        std::cout << "test accuracy: " << fmt(eval.mean) << " +/- " << fmt(eval.stddev) << " over "
                  << cfg.test_episodes << " episodes\n";
    }
    return ok;
}

struct EvalArgs {
    std::string checkpoint, data;
    std::size_t way = 5, shot = 5, queries = 10, episodes = 600, threads = 1;
    std::uint64_t seed = 1;
};

int run_eval(const EvalArgs& args) {
    const Checkpoint ckpt = load_checkpoint(resolve_data_path(args.checkpoint));
    const EmbeddingTable table = ckpt.table();
    const Corpus corpus = load_corpus(resolve_data_path(args.data));
    const std::vector<std::string> seen = train_labels_of(ckpt.config);
    require_disjoint_labels(seen, corpus);
    const EncodedCorpus encoded = encode_corpus(corpus, table, ckpt.params.config.max_length);
    const EvalResult r = evaluate(encoded, ckpt.params, EpisodeSpec{args.way, args.shot, args.queries}, args.episodes,
                                  args.seed, args.threads);
    if (!std::isfinite(r.mean)) throw NumericError("accuracy is not finite");
    std::cout << "accuracy: " << fmt(r.mean) << " +/- " << fmt(r.stddev) << " over " << args.episodes
              << " episodes (" << args.way << "-way " << args.shot << "-shot)\n";
    return ok;
}

struct PredictArgs {
    std::string checkpoint, support, input;
};

int run_predict(const PredictArgs& args) {
    const Checkpoint ckpt = load_checkpoint(resolve_data_path(args.checkpoint));
    const EmbeddingTable table = ckpt.table();
    const Corpus support = load_corpus(resolve_data_path(args.support));
    if (support.num_classes() < 1) throw DataError("support set is empty");
    const std::size_t max_length = ckpt.params.config.max_length;

    std::ifstream in(resolve_data_path(args.input));
    if (!in) throw DataError("cannot read input file " + args.input);
    EpisodeTexts texts;
    const EncodedCorpus encoded = encode_corpus(support, table, max_length);
    texts.support = encoded.texts;
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        lines.push_back(line);
        texts.queries.push_back(to_ids(line, table, max_length));
    }
    if (texts.queries.empty()) return ok;

    Tape<float> tape;
    EpisodeForward<float> out = forward_episode(tape, ckpt.params, texts);
    const auto scores = out.scores.value();
    const std::size_t way = support.num_classes(), n = texts.queries.size();
    for (float s : scores) {
        if (!std::isfinite(s)) throw NumericError("non-finite relation score");
    }
    const std::vector<std::size_t> predicted = predict(scores, way);
    for (std::size_t q = 0; q < n; ++q) {
        nlohmann::json record{{"text", lines[q]}, {"label", support.labels()[predicted[q]]}};
        nlohmann::json per_class = nlohmann::json::object();
        for (std::size_t i = 0; i < way; ++i) per_class[support.labels()[i]] = scores[i * n + q];
        record["scores"] = per_class;
        std::cout << record.dump() << '\n';
    }
    return ok;
}

int run_gradcheck(std::uint64_t seed, double tolerance) {
    GradCheckOptions options;
    options.seed = seed;
    const GradCheckReport report = run_gradcheck(options);
    for (const GradCheckEntry& e : report.entries) {
        std::printf("%-32s %-40s n=%-5zu rel=%.3e abs=%.3e\n", e.scope.c_str(), e.parameter.c_str(), e.size,
                    e.rel_error, e.max_abs_error);
    }
    const double worst = report.max_rel_error();
    std::printf("max relative error: %.6e (tolerance %.1e)\n", worst, tolerance);
    return worst < tolerance ? ok : numeric_failure;
}

struct SynthArgs {
    std::string out_dir = ".";
    SyntheticConfig config;
    std::size_t train_classes = 0;
};

int run_synth(const SynthArgs& args) {
    const SyntheticData data = generate_synthetic(args.config);
    const std::filesystem::path dir = args.out_dir;
    std::filesystem::create_directories(dir);
    save_embeddings(data.table, dir / "embeddings.txt");
    if (args.train_classes == 0 || args.train_classes >= data.corpus.num_classes()) {
        save_corpus(data.corpus, dir / "corpus.jsonl");
        std::cout << "wrote " << (dir / "corpus.jsonl").string() << '\n';
    } else {
        auto [train_part, test_part] = split_classes(data.corpus, args.train_classes);
        save_corpus(train_part, dir / "train.jsonl");
        save_corpus(test_part, dir / "test.jsonl");
        std::cout << "wrote " << (dir / "train.jsonl").string() << " and " << (dir / "test.jsonl").string() << '\n';
    }
    std::cout << "wrote " << (dir / "embeddings.txt").string() << '\n';
    return ok;
}

struct DumpArgs {
    std::string checkpoint, data, which = "post_transform", out;
    std::size_t way = 5, shot = 10, queries = 10;
    std::uint64_t seed = 1;
    std::optional<std::string> classes;
};

int run_dump(const DumpArgs& args) {
    const Checkpoint ckpt = load_checkpoint(resolve_data_path(args.checkpoint));
    const EmbeddingTable table = ckpt.table();
    const Corpus corpus = load_corpus(resolve_data_path(args.data));
    const EncodedCorpus encoded = encode_corpus(corpus, table, ckpt.params.config.max_length);
    std::optional<std::vector<std::string>> filter;
    if (args.classes) {
        filter.emplace();
        std::stringstream ss(*args.classes);
        std::string label;
        while (std::getline(ss, label, ',')) {
            if (!label.empty()) filter->push_back(label);
        }
    }
    const EpisodeSpec spec{args.way, args.shot, args.queries};
    const DumpKind kind = parse_dump_kind(args.which);
    if (args.out.empty()) {
        dump_vectors(ckpt.params, encoded, spec, kind, filter, args.seed, std::cout);
    } else {
        std::ofstream out(args.out);
        if (!out) throw DataError("cannot write " + args.out);
        dump_vectors(ckpt.params, encoded, spec, kind, filter, args.seed, out);
    }
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Episodic few-shot text classifier with capsule-style class induction"};
    app.require_subcommand(1);

    TrainArgs train_args;
    auto* train_cmd = app.add_subcommand("train", "Meta-train a model from a JSON config");
    train_cmd->add_option("--config", train_args.config, "JSON training config")->required();
    train_cmd->add_option("--episodes", train_args.episodes, "Training episodes");
    train_cmd->add_option("--way", train_args.way, "Classes per episode (C)");
    train_cmd->add_option("--shot", train_args.shot, "Support texts per class (K)");
    train_cmd->add_option("--queries", train_args.queries, "Query texts per class");
    train_cmd->add_option("--iterations", train_args.iterations, "Routing iterations");
    train_cmd->add_option("--threads", train_args.threads, "Evaluation threads");
    train_cmd->add_option("--seed", train_args.seed, "Random seed");
    train_cmd->add_option("--learning-rate", train_args.learning_rate, "Adagrad learning rate");
    train_cmd->add_option("--induction", train_args.induction, "routing | sum | attention");
    train_cmd->add_option("--relation", train_args.relation, "ntn | cosine");
    train_cmd->add_option("--checkpoint", train_args.checkpoint, "Checkpoint output path");
    train_cmd->add_option("--metrics", train_args.metrics, "JSON-lines metrics path");

    EvalArgs eval_args;
    auto* eval_cmd = app.add_subcommand("eval", "Mean accuracy over sampled test episodes");
    eval_cmd->add_option("--checkpoint", eval_args.checkpoint)->required();
    eval_cmd->add_option("--data", eval_args.data, "JSON-lines test corpus")->required();
    eval_cmd->add_option("--way", eval_args.way);
    eval_cmd->add_option("--shot", eval_args.shot);
    eval_cmd->add_option("--queries", eval_args.queries);
    eval_cmd->add_option("--episodes", eval_args.episodes);
    eval_cmd->add_option("--seed", eval_args.seed);
    eval_cmd->add_option("--threads", eval_args.threads);

    PredictArgs predict_args;
    auto* predict_cmd = app.add_subcommand("predict", "Classify texts against an ad-hoc support set");
    predict_cmd->add_option("--checkpoint", predict_args.checkpoint)->required();
    predict_cmd->add_option("--support", predict_args.support, "JSON-lines support set")->required();
    predict_cmd->add_option("--input", predict_args.input, "One query text per line")->required();

    std::uint64_t grad_seed = 1;
    double grad_tolerance = 1e-3;
    auto* grad_cmd = app.add_subcommand("gradcheck", "Finite-difference check of all gradients");
    grad_cmd->add_option("--seed", grad_seed);
    grad_cmd->add_option("--tolerance", grad_tolerance);

    SynthArgs synth_args;
    auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic corpus and embeddings");
    synth_cmd->add_option("--out-dir", synth_args.out_dir);
    synth_cmd->add_option("--classes", synth_args.config.classes);
    synth_cmd->add_option("--train-classes", synth_args.train_classes, "Split: first N classes train, rest test");
    synth_cmd->add_option("--samples", synth_args.config.samples_per_class, "Texts per class");
    synth_cmd->add_option("--vocab", synth_args.config.vocab_per_class, "Tokens per class");
    synth_cmd->add_option("--dim", synth_args.config.dim, "Embedding dimension");
    synth_cmd->add_option("--noise", synth_args.config.noise, "Fraction of off-cluster tokens");
    synth_cmd->add_option("--spread", synth_args.config.token_spread, "Token scatter around the class mean");
    synth_cmd->add_option("--seed", synth_args.config.seed);

    DumpArgs dump_args;
    auto* dump_cmd = app.add_subcommand("dump-vectors", "CSV of sample or query vectors for one episode");
    dump_cmd->add_option("--checkpoint", dump_args.checkpoint)->required();
    dump_cmd->add_option("--data", dump_args.data)->required();
    dump_cmd->add_option("--which", dump_args.which, "pre_transform | post_transform | query");
    dump_cmd->add_option("--way", dump_args.way);
    dump_cmd->add_option("--shot", dump_args.shot);
    dump_cmd->add_option("--queries", dump_args.queries);
    dump_cmd->add_option("--seed", dump_args.seed);
    dump_cmd->add_option("--classes", dump_args.classes, "Comma-separated class filter");
    dump_cmd->add_option("--out", dump_args.out, "Output path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return usage;
    }

    try {
        if (*train_cmd) return run_train(train_args);
        if (*eval_cmd) return run_eval(eval_args);
        if (*predict_cmd) return run_predict(predict_args);
        if (*grad_cmd) return run_gradcheck(grad_seed, grad_tolerance);
        if (*synth_cmd) return run_synth(synth_args);
        if (*dump_cmd) return run_dump(dump_args);
    } catch (const NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return numeric_failure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return data_error;
    }
    return usage;
}
