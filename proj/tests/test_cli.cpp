#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "sgur/analysis.hpp"
#include "sgur/corpus.hpp"
#include "sgur/evalharness.hpp"
#include "sgur/initcore.hpp"
#include "sgur/manifest.hpp"
#include "testutil.hpp"

using namespace sgur;
namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output;  // stdout + stderr
};

// Runs the binary under test (ctest exports SGUR_BIN) with a fixed working
// directory so relative --out-dir stays inside the sandbox.
RunResult run_cli(const std::string& args, const fs::path& workdir) {
    const char* bin = std::getenv("SGUR_BIN");
    REQUIRE_MESSAGE(bin != nullptr, "SGUR_BIN must point at the CLI binary");
    fs::path log = workdir / "cli_output.log";
    std::string cmd = "cd '" + workdir.string() + "' && '" + std::string(bin) + "' " + args +
                      " > '" + log.string() + "' 2>&1";
    int status = std::system(cmd.c_str());
    RunResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(log);
    std::ostringstream ss;
    ss << in.rdbuf();
    result.output = ss.str();
    return result;
}

double parse_value(const std::string& text, const std::string& key) {
    auto pos = text.find(key + "=");
    REQUIRE_MESSAGE(pos != std::string::npos, "missing '" << key << "=' in: " << text);
    return std::stod(text.substr(pos + key.size() + 1));
}

// Toy corpus shared by most cases: 12 users, 18 items, one modality.
struct ToyCorpus {
    testutil::TempDir dir{"cli_toy"};
    fs::path interactions = dir.path / "inter.tsv";
    fs::path features = dir.path / "feat.sgur";
    InteractionGraph graph;
    Matrix feat{18, 5};

    ToyCorpus() {
        std::mt19937_64 gen(91);
        // Two deterministic edges per user cover all 18 items, so the feature
        // tensor rows match the vocabulary exactly; random edges add texture.
        std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
        for (std::uint32_t u = 0; u < 12; ++u) {
            edges.push_back({u, u});
            edges.push_back({u, 12 + u % 6});
        }
        auto extra = testutil::random_graph(12, 18, 1, 4, gen);
        for (std::uint32_t u = 0; u < 12; ++u) {
            for (auto i : extra.user_adj[u]) edges.push_back({u, i});
        }
        graph = graph_from_edges(12, 18, edges);
        std::ofstream out(interactions);
        for (std::uint32_t u = 0; u < graph.num_users; ++u) {
            for (auto i : graph.user_adj[u]) {
                out << "user" << u << "\titem" << i << "\n";
            }
        }
        out.close();
        feat = testutil::random_matrix(18, 5, gen);
        write_matrix(features, feat);
    }
};

}

TEST_CASE("checksum primitive matches published vectors") {
    CHECK(sha256_hex("") ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    // Streaming file digest agrees with the in-memory digest.
    testutil::TempDir tmp("cli_sha");
    std::string payload(100000, 'x');
    std::ofstream(tmp.path / "f.bin", std::ios::binary) << payload;
    CHECK(sha256_file(tmp.path / "f.bin") == sha256_hex(payload));
}

TEST_CASE("all five subcommands succeed on a toy corpus") {
    ToyCorpus toy;

    auto init = run_cli("init --interactions inter.tsv --features vision=feat.sgur"
                        " --out-dir init_out", toy.dir.path);
    CHECK(init.exit_code == 0);
    CHECK(init.output.find("user initialization:") != std::string::npos);
    CHECK(fs::exists(toy.dir.path / "init_out/user_init.vision.sgur"));
    CHECK(fs::exists(toy.dir.path / "init_out/users.vocab"));
    CHECK(fs::exists(toy.dir.path / "init_out/items.vocab"));
    CHECK(fs::exists(toy.dir.path / "init_out/manifest.json"));

    auto km = run_cli("kmeans --features feat.sgur --k 3 --out-dir km_out", toy.dir.path);
    CHECK(km.exit_code == 0);
    CHECK(km.output.find("objective=") != std::string::npos);
    CHECK(km.output.find("iterations=") != std::string::npos);
    CHECK(fs::exists(toy.dir.path / "km_out/centroids.sgur"));
    CHECK(fs::exists(toy.dir.path / "km_out/assignments.sgur"));
    CHECK(fs::exists(toy.dir.path / "km_out/meta.txt"));

    auto gap = run_cli("gap --users init_out/user_init.vision.sgur --items feat.sgur"
                       " --out-dir gap_out", toy.dir.path);
    CHECK(gap.exit_code == 0);
    CHECK(fs::exists(toy.dir.path / "gap_out/gap.csv"));

    auto split = run_cli("split --interactions inter.tsv --mode random"
                         " --ratios 0.6,0.2,0.2 --out-dir split_out", toy.dir.path);
    CHECK(split.exit_code == 0);
    CHECK(fs::exists(toy.dir.path / "split_out/train.tsv"));
    CHECK(fs::exists(toy.dir.path / "split_out/val.tsv"));
    CHECK(fs::exists(toy.dir.path / "split_out/test.tsv"));

    auto eval = run_cli("eval --split split_out --features feat.sgur --dim 5"
                        " --epochs 2 --patience 2 --batch-size 8 --out-dir eval_out",
                        toy.dir.path);
    CHECK(eval.exit_code == 0);
    CHECK(fs::exists(toy.dir.path / "eval_out/metrics.csv"));
    CHECK(fs::exists(toy.dir.path / "eval_out/loss_7.csv"));
    // Default cutoffs are 5 and 10.
    CHECK(eval.output.find("recall@5 ") != std::string::npos);
    CHECK(eval.output.find("recall@10 ") != std::string::npos);

    SUBCASE("cold-start split works through the CLI") {
        auto cold = run_cli("split --interactions inter.tsv --mode coldstart"
                            " --cold-fraction 0.2 --out-dir cold_out", toy.dir.path);
        CHECK(cold.exit_code == 0);
        CHECK(cold.output.find("cold_items=3") != std::string::npos);  // floor(0.2*18)
        CHECK(fs::exists(toy.dir.path / "cold_out/cold_items.tsv"));
    }
}

TEST_CASE("exit codes follow the usage versus runtime contract") {
    ToyCorpus toy;

    CHECK(run_cli("init", toy.dir.path).exit_code == 2);               // missing flags
    CHECK(run_cli("bogus", toy.dir.path).exit_code == 2);              // unknown subcommand
    CHECK(run_cli("init --interactions inter.tsv --features m=feat.sgur --lambda 1.5",
                  toy.dir.path).exit_code == 2);                       // out-of-range parameter
    CHECK(run_cli("init --interactions inter.tsv --features m=feat.sgur --weighting huh",
                  toy.dir.path).exit_code == 2);                       // bad enum value
    CHECK(run_cli("split --interactions inter.tsv --mode random --ratios 0.5,0.2,0.2",
                  toy.dir.path).exit_code == 2);                       // ratios do not sum to 1

    CHECK(run_cli("init --interactions absent.tsv --features m=feat.sgur",
                  toy.dir.path).exit_code == 1);                       // missing input file
    CHECK(run_cli("kmeans --features feat.sgur --k 99", toy.dir.path).exit_code == 2);
    // k > n is a parameter/usage error

    auto r = run_cli("--version", toy.dir.path);
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("0.1.0") != std::string::npos);
    CHECK(run_cli("--help", toy.dir.path).exit_code == 0);
}

TEST_CASE("defaults are recorded in the manifest") {
    ToyCorpus toy;
    auto r = run_cli("init --interactions inter.tsv --features vision=feat.sgur"
                     " --out-dir out", toy.dir.path);
    REQUIRE(r.exit_code == 0);

    std::ifstream in(toy.dir.path / "out/manifest.json");
    auto manifest = nlohmann::json::parse(in);
    CHECK(manifest["config"]["default_k"] == 4);
    CHECK(manifest["config"]["lambda"] == 0.01);
    CHECK(manifest["config"]["weighting"] == "itemdegree");
    CHECK(manifest["config"]["fallback"] == "globalmean");
    CHECK(manifest["config"]["seeds"] == std::vector<std::uint64_t>{7});
    CHECK(manifest["tool_version"] == "0.1.0");
    // Inputs carry checksums that match the actual files.
    for (const auto& input : manifest["inputs"]) {
        fs::path p = toy.dir.path / input["path"].get<std::string>();
        CHECK(input["sha256"] == sha256_file(p));
    }
    // Every emitted file is listed.
    std::set<std::string> outputs;
    for (const auto& o : manifest["outputs"]) outputs.insert(o.get<std::string>());
    CHECK(outputs.count("out/user_init.vision.sgur") == 1);
    CHECK(outputs.count("out/users.vocab") == 1);
    CHECK(outputs.count("out/items.vocab") == 1);
}

TEST_CASE("lambda zero runs are checksum-identical across seeds") {
    ToyCorpus toy;
    auto a = run_cli("init --interactions inter.tsv --features m=feat.sgur --lambda 0"
                     " --seeds 1 --out-dir a", toy.dir.path);
    auto b = run_cli("init --interactions inter.tsv --features m=feat.sgur --lambda 0"
                     " --seeds 2 --out-dir b", toy.dir.path);
    REQUIRE(a.exit_code == 0);
    REQUIRE(b.exit_code == 0);
    CHECK(sha256_file(toy.dir.path / "a/user_init.m.sgur") ==
          sha256_file(toy.dir.path / "b/user_init.m.sgur"));
}

TEST_CASE("repeat runs with identical flags are idempotent") {
    ToyCorpus toy;
    for (const char* dir : {"r1", "r2"}) {
        auto r = run_cli(std::string("kmeans --features feat.sgur --k 4 --seed 3 --out-dir ") +
                         dir, toy.dir.path);
        REQUIRE(r.exit_code == 0);
    }
    CHECK(sha256_file(toy.dir.path / "r1/centroids.sgur") ==
          sha256_file(toy.dir.path / "r2/centroids.sgur"));
    CHECK(sha256_file(toy.dir.path / "r1/assignments.sgur") ==
          sha256_file(toy.dir.path / "r2/assignments.sgur"));

    for (const char* dir : {"e1", "e2"}) {
        auto r = run_cli(std::string("split --interactions inter.tsv --mode random"
                                     " --ratios 0.6,0.2,0.2 --seed 5 --out-dir sp_") + dir,
                         toy.dir.path);
        REQUIRE(r.exit_code == 0);
        auto e = run_cli(std::string("eval --split sp_") + dir +
                         " --features feat.sgur --dim 5 --epochs 2 --patience 2"
                         " --batch-size 8 --seeds 3 --out-dir " + dir, toy.dir.path);
        REQUIRE(e.exit_code == 0);
    }
    CHECK(sha256_file(toy.dir.path / "e1/metrics.csv") ==
          sha256_file(toy.dir.path / "e2/metrics.csv"));
    CHECK(sha256_file(toy.dir.path / "e1/loss_3.csv") ==
          sha256_file(toy.dir.path / "e2/loss_3.csv"));
}

TEST_CASE("init output matches the in-process pipeline bit for bit") {
    ToyCorpus toy;
    auto r = run_cli("init --interactions inter.tsv --features m=feat.sgur"
                     " --default-k 3 --lambda 0.2 --weighting bidegree --seeds 5"
                     " --out-dir out", toy.dir.path);
    REQUIRE(r.exit_code == 0);

    Vocab vocab;
    auto graph = load_interactions(toy.interactions, vocab);
    std::map<std::string, ModalityFeatures> features;
    features["m"] = load_features(toy.features, "m");
    InitConfig config;
    config.default_k = 3;
    config.lambda = 0.2;
    config.weighting = WeightingStrategy::BiDegree;
    config.seeds = {5};
    auto expected = init_users(graph, features, config, 5);

    auto written = read_matrix(toy.dir.path / "out/user_init.m.sgur");
    CHECK(bitwise_equal(written, expected.per_modality.at("m")));
}

TEST_CASE("gap stdout agrees with the library statistics") {
    ToyCorpus toy;
    std::mt19937_64 gen(92);
    auto users = testutil::random_matrix(9, 5, gen);
    write_matrix(toy.dir.path / "users.sgur", users);

    auto r = run_cli("gap --users users.sgur --items feat.sgur --bins 7 --out-dir g",
                     toy.dir.path);
    REQUIRE(r.exit_code == 0);

    auto stats = semantic_gap(users, toy.feat, 7);
    CHECK(parse_value(r.output, "user_mean_norm") ==
          doctest::Approx(stats.user_mean_norm).epsilon(1e-12));
    CHECK(parse_value(r.output, "item_mean_norm") ==
          doctest::Approx(stats.item_mean_norm).epsilon(1e-12));
    CHECK(parse_value(r.output, "abs_mean_diff") ==
          doctest::Approx(stats.abs_mean_diff).epsilon(1e-12));

    // The CSV report carries one row per bin.
    std::ifstream in(toy.dir.path / "g/gap.csv");
    std::string line;
    std::size_t bin_rows = 0;
    bool in_csv = false;
    while (std::getline(in, line)) {
        if (line.rfind("bin_left,", 0) == 0) {
            in_csv = true;
            continue;
        }
        if (in_csv && !line.empty()) ++bin_rows;
    }
    CHECK(bin_rows == 7);
}

TEST_CASE("eval recovers a planted optimum with a supplied user init") {
    // Four users; train edge (u, u), test edge (u, u+4). Features give items
    // u and u+4 the same one-hot direction, so a user tensor aligned with the
    // directions ranks the unseen twin first. Near-zero learning rate keeps
    // training from disturbing the construction.
    testutil::TempDir tmp("cli_planted");
    Vocab vocab;
    for (int u = 0; u < 4; ++u) vocab.add_user("u" + std::to_string(u));
    for (int i = 0; i < 8; ++i) vocab.add_item("i" + std::to_string(i));

    EvalSplit split;
    split.num_users = 4;
    split.num_items = 8;
    for (std::uint32_t u = 0; u < 4; ++u) {
        split.train_edges.push_back({u, u});
        split.test_edges.push_back({u, u + 4});
    }
    save_split(split, vocab, tmp.path / "split");

    Matrix feat(8, 4);
    for (std::size_t i = 0; i < 8; ++i) feat.at(i, i % 4) = 10.0f;
    write_matrix(tmp.path / "feat.sgur", feat);

    Matrix user_init(4, 4);
    for (std::size_t u = 0; u < 4; ++u) user_init.at(u, u) = 10.0f;
    write_matrix(tmp.path / "users.sgur", user_init);

    auto r = run_cli("eval --split split --features feat.sgur --init users.sgur"
                     " --dim 4 --lr 1e-9 --epochs 1 --batch-size 4 --ks 5 --out-dir out",
                     tmp.path);
    REQUIRE(r.exit_code == 0);
    CHECK(r.output.find("recall@5 mean=1.000000") != std::string::npos);

    std::ifstream in(tmp.path / "out/metrics.csv");
    std::string csv((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(csv.find("recall,5,1,0,1") != std::string::npos);
}

TEST_CASE("eval rejects mismatched init lists") {
    ToyCorpus toy;
    auto split = run_cli("split --interactions inter.tsv --mode random --ratios 0.6,0.2,0.2"
                         " --out-dir sp", toy.dir.path);
    REQUIRE(split.exit_code == 0);
    // Two init tensors for three seeds is a usage error.
    auto r = run_cli("eval --split sp --features feat.sgur --init a.sgur,b.sgur"
                     " --seeds 1,2,3 --dim 5 --out-dir out", toy.dir.path);
    CHECK(r.exit_code == 2);
}
