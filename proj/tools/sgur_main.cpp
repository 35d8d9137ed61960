// Command-line front end: init, kmeans, gap, split, eval. Every command
// writes a manifest.json with input checksums next to its outputs.

#include <charconv>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "sgur/analysis.hpp"
#include "sgur/cluster.hpp"
#include "sgur/corpus.hpp"
#include "sgur/error.hpp"
#include "sgur/evalharness.hpp"
#include "sgur/initcore.hpp"
#include "sgur/manifest.hpp"
#include "sgur/version.hpp"

namespace fs = std::filesystem;
using namespace sgur;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string join_args(int argc, char** argv) {
    std::string out;
    for (int i = 0; i < argc; ++i) {
        if (i) out += ' ';
        out += argv[i];
    }
    return out;
}

// "modality=value" flag payloads.
std::pair<std::string, std::string> split_kv(const std::string& s, const std::string& flag) {
    auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == s.size()) {
        throw InvalidArgument(flag + ": expected modality=value, got '" + s + "'");
    }
    return {s.substr(0, eq), s.substr(eq + 1)};
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        auto comma = s.find(',', start);
        if (comma == std::string::npos) {
            out.push_back(s.substr(start));
            break;
        }
        out.push_back(s.substr(start, comma - start));
        start = comma + 1;
    }
    return out;
}

template <typename T>
T parse_number(const std::string& s, const std::string& flag) {
    T value{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw InvalidArgument(flag + ": '" + s + "' is not a valid number");
    }
    return value;
}

std::vector<std::uint64_t> parse_seeds(const std::string& s) {
    std::vector<std::uint64_t> out;
    for (const auto& part : split_list(s)) {
        out.push_back(parse_number<std::uint64_t>(part, "--seeds"));
    }
    return out;
}

std::vector<std::size_t> parse_ks(const std::string& s) {
    std::vector<std::size_t> out;
    for (const auto& part : split_list(s)) {
        out.push_back(parse_number<std::size_t>(part, "--ks"));
    }
    return out;
}

const char* weighting_name(WeightingStrategy w) {
    switch (w) {
        case WeightingStrategy::ItemDegree: return "itemdegree";
        case WeightingStrategy::BiDegree: return "bidegree";
        case WeightingStrategy::Equal: return "equal";
    }
    return "?";
}

const char* fallback_name(ZeroDegreeFallback f) {
    return f == ZeroDegreeFallback::Zeros ? "zeros" : "globalmean";
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << text;
    if (!out.flush()) throw IoError("write failed on " + path.string());
}

// ---- init ----------------------------------------------------------------

struct InitArgs {
    std::string interactions;
    std::vector<std::string> features;    // modality=path
    std::vector<std::string> k_overrides; // modality=count
    std::size_t default_k = 4;
    double lambda = 0.01;
    WeightingStrategy weighting = WeightingStrategy::ItemDegree;
    std::string seeds = "7";
    ZeroDegreeFallback fallback = ZeroDegreeFallback::GlobalMean;
    std::size_t kmeans_max_iters = 300;
    double kmeans_tol = 1e-6;
    std::string out_dir = ".";
};

void run_init(const InitArgs& args, const std::string& command_line) {
    auto t0 = Clock::now();
    RunManifest manifest;
    manifest.command_line = command_line;

    Vocab vocab;
    auto graph = load_interactions(args.interactions, vocab);
    manifest.add_input(args.interactions);

    std::map<std::string, ModalityFeatures> features;
    for (const auto& spec : args.features) {
        auto [modality, path] = split_kv(spec, "--features");
        if (features.count(modality)) {
            throw InvalidArgument("--features: modality '" + modality + "' given twice");
        }
        features[modality] = load_features(path, modality);
        manifest.add_input(path);
    }

    InitConfig config;
    config.default_k = args.default_k;
    config.lambda = args.lambda;
    config.weighting = args.weighting;
    config.fallback = args.fallback;
    config.kmeans_max_iters = args.kmeans_max_iters;
    config.kmeans_tol = args.kmeans_tol;
    config.seeds = parse_seeds(args.seeds);
    for (const auto& spec : args.k_overrides) {
        auto [modality, count] = split_kv(spec, "--k");
        config.k_per_modality[modality] = parse_number<std::size_t>(count, "--k");
    }
    config.validate();

    auto pipeline_t0 = Clock::now();
    auto results = init_users_multiseed(graph, features, config);
    double pipeline_seconds = seconds_since(pipeline_t0);

    fs::create_directories(args.out_dir);
    bool single_seed = config.seeds.size() == 1;
    for (const auto& result : results) {
        for (const auto& path : save_user_init(result, args.out_dir, single_seed)) {
            manifest.add_output(path);
        }
    }
    auto users_vocab = fs::path(args.out_dir) / "users.vocab";
    auto items_vocab = fs::path(args.out_dir) / "items.vocab";
    write_vocab_side(users_vocab, vocab.user_ids);
    write_vocab_side(items_vocab, vocab.item_ids);
    manifest.add_output(users_vocab);
    manifest.add_output(items_vocab);

    nlohmann::json k_json = nlohmann::json::object();
    for (const auto& [modality, k] : config.k_per_modality) k_json[modality] = k;
    manifest.config = {
        {"default_k", config.default_k},
        {"k_per_modality", k_json},
        {"lambda", config.lambda},
        {"weighting", weighting_name(config.weighting)},
        {"fallback", fallback_name(config.fallback)},
        {"seeds", config.seeds},
        {"kmeans_max_iters", config.kmeans_max_iters},
        {"kmeans_tol", config.kmeans_tol},
    };
    manifest.duration_seconds = seconds_since(t0);
    manifest.write(fs::path(args.out_dir) / "manifest.json");

    std::printf("users=%zu items=%zu edges=%zu modalities=%zu seeds=%zu\n",
                static_cast<std::size_t>(graph.num_users),
                static_cast<std::size_t>(graph.num_items), graph.num_edges(), features.size(),
                config.seeds.size());
    std::printf("user initialization: %.3f s\n", pipeline_seconds);
    for (const auto& out : manifest.outputs) std::printf("wrote %s\n", out.c_str());
}

// ---- kmeans ---------------------------------------------------------------

struct KmeansArgs {
    std::string features;
    std::string modality;
    std::size_t k = 4;
    std::uint64_t seed = 7;
    std::size_t max_iters = 300;
    double tol = 1e-6;
    std::string out_dir = ".";
};

void run_kmeans(const KmeansArgs& args, const std::string& command_line) {
    auto t0 = Clock::now();
    RunManifest manifest;
    manifest.command_line = command_line;

    std::string modality = args.modality.empty() ? fs::path(args.features).stem().string()
                                                 : args.modality;
    auto features = load_features(args.features, modality);
    manifest.add_input(args.features);

    auto model = kmeans(features, args.k, args.seed, args.max_iters, args.tol);

    fs::create_directories(args.out_dir);
    save_cluster_model(model, args.out_dir);
    manifest.add_output(fs::path(args.out_dir) / "centroids.sgur");
    manifest.add_output(fs::path(args.out_dir) / "assignments.sgur");
    manifest.add_output(fs::path(args.out_dir) / "meta.txt");

    manifest.config = {
        {"modality", modality}, {"k", args.k},         {"seed", args.seed},
        {"max_iters", args.max_iters}, {"tol", args.tol},
    };
    manifest.duration_seconds = seconds_since(t0);
    manifest.write(fs::path(args.out_dir) / "manifest.json");

    std::printf("objective=%.17g\n", model.objective);
    std::printf("iterations=%zu\n", model.iterations_run);
}

// ---- gap -------------------------------------------------------------------

struct GapArgs {
    std::string users;
    std::string items;
    std::size_t bins = 20;
    std::string out_dir = ".";
};

void run_gap(const GapArgs& args, const std::string& command_line) {
    auto t0 = Clock::now();
    RunManifest manifest;
    manifest.command_line = command_line;

    auto users = read_matrix(args.users);
    auto items = read_matrix(args.items);
    manifest.add_input(args.users);
    manifest.add_input(args.items);

    auto stats = semantic_gap(users, items, args.bins);
    auto report = serialize_gap_stats(stats);

    fs::create_directories(args.out_dir);
    auto out_path = fs::path(args.out_dir) / "gap.csv";
    write_text(out_path, report);
    manifest.add_output(out_path);

    manifest.config = {{"bins", args.bins}};
    manifest.duration_seconds = seconds_since(t0);
    manifest.write(fs::path(args.out_dir) / "manifest.json");

    std::printf("user_mean_norm=%.17g\n", stats.user_mean_norm);
    std::printf("item_mean_norm=%.17g\n", stats.item_mean_norm);
    std::printf("abs_mean_diff=%.17g\n", stats.abs_mean_diff);
}

// ---- split -----------------------------------------------------------------

struct SplitArgs {
    std::string interactions;
    std::string mode;
    std::string ratios = "0.8,0.1,0.1";
    double cold_fraction = 0.2;
    std::uint64_t seed = 7;
    std::string out_dir = ".";
};

void run_split(const SplitArgs& args, const std::string& command_line) {
    auto t0 = Clock::now();
    RunManifest manifest;
    manifest.command_line = command_line;

    Vocab vocab;
    auto graph = load_interactions(args.interactions, vocab);
    manifest.add_input(args.interactions);

    EvalSplit split;
    if (args.mode == "random") {
        auto parts = split_list(args.ratios);
        if (parts.size() != 3) {
            throw InvalidArgument("--ratios: expected train,val,test");
        }
        split = split_random(graph, parse_number<double>(parts[0], "--ratios"),
                             parse_number<double>(parts[1], "--ratios"),
                             parse_number<double>(parts[2], "--ratios"), args.seed);
    } else if (args.mode == "coldstart") {
        split = split_cold_start(graph, args.cold_fraction, args.seed);
    } else {
        throw InvalidArgument("--mode: expected random or coldstart");
    }

    fs::create_directories(args.out_dir);
    for (const auto& path : save_split(split, vocab, args.out_dir)) {
        manifest.add_output(path);
    }

    manifest.config = {{"mode", args.mode}, {"seed", args.seed}};
    if (args.mode == "random") manifest.config["ratios"] = args.ratios;
    if (args.mode == "coldstart") manifest.config["cold_fraction"] = args.cold_fraction;
    manifest.duration_seconds = seconds_since(t0);
    manifest.write(fs::path(args.out_dir) / "manifest.json");

    std::printf("train=%zu val=%zu test=%zu cold_items=%zu\n", split.train_edges.size(),
                split.val_edges.size(), split.test_edges.size(), split.cold_items.size());
}

// ---- eval ------------------------------------------------------------------

struct EvalArgs {
    std::string split_dir;
    std::string features;
    std::string init = "random";
    std::string ks = "5,10";
    std::string seeds = "7";
    std::size_t dim = 32;
    std::size_t layers = 2;
    double lr = 1e-3;
    std::size_t batch_size = 256;
    std::size_t epochs = 100;
    std::size_t patience = 20;
    std::size_t negatives = 1;
    std::string out_dir = ".";
};

void run_eval(const EvalArgs& args, const std::string& command_line) {
    auto t0 = Clock::now();
    RunManifest manifest;
    manifest.command_line = command_line;

    Vocab vocab;
    auto split = load_split(args.split_dir, vocab);
    for (const char* name : {"train.tsv", "val.tsv", "test.tsv"}) {
        manifest.add_input(fs::path(args.split_dir) / name);
    }

    auto features = load_features(args.features, "features");
    manifest.add_input(args.features);
    if (features.values.rows != split.num_items) {
        throw DataError("eval: feature matrix has " + std::to_string(features.values.rows) +
                        " rows but the split has " + std::to_string(split.num_items) + " items");
    }
    auto item_init = fit_columns(widen(features.values), args.dim);

    auto seeds = parse_seeds(args.seeds);
    auto ks = parse_ks(args.ks);

    // --init is "random" or a list of user-init tensors: a single tensor is
    // shared by every seed, otherwise one per seed in order.
    std::vector<std::string> init_paths;
    if (args.init != "random") {
        init_paths = split_list(args.init);
        if (init_paths.size() != 1 && init_paths.size() != seeds.size()) {
            throw InvalidArgument("--init: got " + std::to_string(init_paths.size()) +
                                  " tensors for " + std::to_string(seeds.size()) + " seeds");
        }
        for (const auto& path : init_paths) manifest.add_input(path);
    }

    RefModelConfig config;
    config.embed_dim = args.dim;
    config.num_layers = args.layers;
    config.learning_rate = args.lr;
    config.batch_size = args.batch_size;
    config.max_epochs = args.epochs;
    config.patience = args.patience;
    config.negatives_per_positive = args.negatives;
    config.validate();

    fs::create_directories(args.out_dir);
    std::vector<EvalResult> per_seed;
    for (std::size_t s = 0; s < seeds.size(); ++s) {
        config.seed = seeds[s];

        MatrixD user_init;
        const MatrixD* user_init_ptr = nullptr;
        if (!init_paths.empty()) {
            const auto& path = init_paths.size() == 1 ? init_paths[0] : init_paths[s];
            user_init = widen(read_matrix(path));
            user_init_ptr = &user_init;
        }

        auto result = train_reference_model(split, item_init, user_init_ptr, config);
        per_seed.push_back(evaluate(result.user_embed, result.item_embed, split, ks));

        std::string trace = "epoch,loss\n";
        for (std::size_t e = 0; e < result.loss_trace.size(); ++e) {
            char line[64];
            std::snprintf(line, sizeof(line), "%zu,%.17g\n", e + 1, result.loss_trace[e]);
            trace += line;
        }
        auto trace_path = fs::path(args.out_dir) / ("loss_" + std::to_string(seeds[s]) + ".csv");
        write_text(trace_path, trace);
        manifest.add_output(trace_path);

        std::printf("seed=%llu epochs=%zu best_epoch=%zu\n",
                    static_cast<unsigned long long>(seeds[s]), result.epochs_run,
                    result.best_epoch);
    }

    auto agg = aggregate_metrics(per_seed, ks);
    std::string csv = "metric,K,mean,std,seed_count\n";
    for (auto k : ks) {
        char line[128];
        std::snprintf(line, sizeof(line), "recall,%zu,%.17g,%.17g,%zu\n", k,
                      agg.recall_mean.at(k), agg.recall_std.at(k), seeds.size());
        csv += line;
        std::snprintf(line, sizeof(line), "ndcg,%zu,%.17g,%.17g,%zu\n", k, agg.ndcg_mean.at(k),
                      agg.ndcg_std.at(k), seeds.size());
        csv += line;
    }
    auto metrics_path = fs::path(args.out_dir) / "metrics.csv";
    write_text(metrics_path, csv);
    manifest.add_output(metrics_path);

    manifest.config = {
        {"init", args.init},       {"ks", ks},
        {"seeds", seeds},          {"dim", args.dim},
        {"layers", args.layers},   {"lr", args.lr},
        {"batch_size", args.batch_size}, {"epochs", args.epochs},
        {"patience", args.patience},     {"negatives", args.negatives},
    };
    manifest.duration_seconds = seconds_since(t0);
    manifest.write(fs::path(args.out_dir) / "manifest.json");

    for (auto k : ks) {
        std::printf("recall@%zu mean=%.6f std=%.6f\n", k, agg.recall_mean.at(k),
                    agg.recall_std.at(k));
        std::printf("ndcg@%zu mean=%.6f std=%.6f\n", k, agg.ndcg_mean.at(k), agg.ndcg_std.at(k));
    }
}

}

int main(int argc, char** argv) {
    CLI::App app{"semantically guided user embedding initialization"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    const std::map<std::string, WeightingStrategy> weighting_map = {
        {"itemdegree", WeightingStrategy::ItemDegree},
        {"bidegree", WeightingStrategy::BiDegree},
        {"equal", WeightingStrategy::Equal},
    };
    const std::map<std::string, ZeroDegreeFallback> fallback_map = {
        {"zeros", ZeroDegreeFallback::Zeros},
        {"globalmean", ZeroDegreeFallback::GlobalMean},
    };

    InitArgs init_args;
    auto* init_cmd = app.add_subcommand("init", "compute user initialization tensors");
    init_cmd->add_option("--interactions", init_args.interactions, "user<TAB>item edge list")
        ->required();
    init_cmd->add_option("--features", init_args.features, "modality=tensor-path (repeatable)")
        ->required();
    init_cmd->add_option("--k", init_args.k_overrides, "modality=cluster-count (repeatable)");
    init_cmd->add_option("--default-k", init_args.default_k, "cluster count for unlisted modalities");
    init_cmd->add_option("--lambda", init_args.lambda, "cluster-branch fusion weight");
    init_cmd->add_option("--weighting", init_args.weighting, "itemdegree|bidegree|equal")
        ->transform(CLI::CheckedTransformer(weighting_map, CLI::ignore_case));
    init_cmd->add_option("--seeds", init_args.seeds, "comma-separated clustering seeds");
    init_cmd->add_option("--fallback", init_args.fallback, "zeros|globalmean")
        ->transform(CLI::CheckedTransformer(fallback_map, CLI::ignore_case));
    init_cmd->add_option("--max-iters", init_args.kmeans_max_iters, "clustering iteration cap");
    init_cmd->add_option("--tol", init_args.kmeans_tol, "clustering convergence tolerance");
    init_cmd->add_option("--out-dir", init_args.out_dir, "output directory");

    KmeansArgs kmeans_args;
    auto* kmeans_cmd = app.add_subcommand("kmeans", "cluster a feature tensor");
    kmeans_cmd->add_option("--features", kmeans_args.features, "feature tensor path")->required();
    kmeans_cmd->add_option("--k", kmeans_args.k, "cluster count");
    kmeans_cmd->add_option("--seed", kmeans_args.seed, "seeding RNG seed");
    kmeans_cmd->add_option("--modality", kmeans_args.modality, "modality tag (default: file stem)");
    kmeans_cmd->add_option("--max-iters", kmeans_args.max_iters, "iteration cap");
    kmeans_cmd->add_option("--tol", kmeans_args.tol, "convergence tolerance");
    kmeans_cmd->add_option("--out-dir", kmeans_args.out_dir, "output directory");

    GapArgs gap_args;
    auto* gap_cmd = app.add_subcommand("gap", "norm statistics for two tensors");
    gap_cmd->add_option("--users", gap_args.users, "user tensor path")->required();
    gap_cmd->add_option("--items", gap_args.items, "item tensor path")->required();
    gap_cmd->add_option("--bins", gap_args.bins, "histogram bin count");
    gap_cmd->add_option("--out-dir", gap_args.out_dir, "output directory");

    SplitArgs split_args;
    auto* split_cmd = app.add_subcommand("split", "partition interactions for evaluation");
    split_cmd->add_option("--interactions", split_args.interactions, "user<TAB>item edge list")
        ->required();
    split_cmd->add_option("--mode", split_args.mode, "random|coldstart")->required();
    split_cmd->add_option("--ratios", split_args.ratios, "train,val,test for random mode");
    split_cmd->add_option("--cold-fraction", split_args.cold_fraction,
                          "item fraction for coldstart mode");
    split_cmd->add_option("--seed", split_args.seed, "split RNG seed");
    split_cmd->add_option("--out-dir", split_args.out_dir, "output directory");

    EvalArgs eval_args;
    auto* eval_cmd = app.add_subcommand("eval", "train the reference ranker and score a split");
    eval_cmd->add_option("--split", eval_args.split_dir, "split directory")->required();
    eval_cmd->add_option("--features", eval_args.features, "item feature tensor")->required();
    eval_cmd->add_option("--init", eval_args.init,
                         "random, one user tensor, or one tensor per seed");
    eval_cmd->add_option("--ks", eval_args.ks, "comma-separated cutoffs");
    eval_cmd->add_option("--seeds", eval_args.seeds, "comma-separated training seeds");
    eval_cmd->add_option("--dim", eval_args.dim, "embedding width");
    eval_cmd->add_option("--layers", eval_args.layers, "propagation depth");
    eval_cmd->add_option("--lr", eval_args.lr, "learning rate");
    eval_cmd->add_option("--batch-size", eval_args.batch_size, "triples per update");
    eval_cmd->add_option("--epochs", eval_args.epochs, "epoch cap");
    eval_cmd->add_option("--patience", eval_args.patience, "early-stop patience");
    eval_cmd->add_option("--negatives", eval_args.negatives, "negatives per positive");
    eval_cmd->add_option("--out-dir", eval_args.out_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    std::string command_line = join_args(argc, argv);
    try {
        if (init_cmd->parsed()) run_init(init_args, command_line);
        if (kmeans_cmd->parsed()) run_kmeans(kmeans_args, command_line);
        if (gap_cmd->parsed()) run_gap(gap_args, command_line);
        if (split_cmd->parsed()) run_split(split_args, command_line);
        if (eval_cmd->parsed()) run_eval(eval_args, command_line);
    } catch (const InvalidArgument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
