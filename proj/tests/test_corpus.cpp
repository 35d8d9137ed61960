#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "sgur/corpus.hpp"
#include "sgur/error.hpp"
#include "testutil.hpp"

using namespace sgur;
namespace fs = std::filesystem;

namespace {

void write_file(const fs::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    out << content;
}

std::string read_bytes(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}

TEST_CASE("parse_interactions builds a deduplicated sorted graph") {
    std::string text =
        "# comment line\n"
        "u1\ti1\n"
        "u2\ti1\n"
        "u1\ti2\n"
        "u1\ti1\n"      // duplicate edge
        "\n"            // blank line skipped
        "u3\ti3\r\n";   // CRLF tolerated
    Vocab vocab;
    auto graph = parse_interactions(text, "mem", vocab);
    CHECK(graph.num_users == 3);
    CHECK(graph.num_items == 3);
    CHECK(graph.num_edges() == 4);
    CHECK(vocab.user_ids == std::vector<std::string>{"u1", "u2", "u3"});
    CHECK(vocab.item_ids == std::vector<std::string>{"i1", "i2", "i3"});
    CHECK(graph.user_adj[0] == std::vector<std::uint32_t>{0, 1});
    CHECK(graph.user_adj[1] == std::vector<std::uint32_t>{0});
    CHECK(graph.user_adj[2] == std::vector<std::uint32_t>{2});
    CHECK(graph.item_adj[0] == std::vector<std::uint32_t>{0, 1});
    CHECK(graph.user_degree == std::vector<std::uint32_t>{2, 1, 1});
    CHECK(graph.item_degree == std::vector<std::uint32_t>{2, 1, 1});
    graph.validate();
}

TEST_CASE("parse_interactions reports 1-based line numbers on malformed rows") {
    auto expect_error_line = [](const std::string& body, const std::string& line_tag) {
        Vocab vocab;
        try {
            parse_interactions(body, "bad.tsv", vocab);
            FAIL("expected ParseError for: " << body);
        } catch (const ParseError& e) {
            CHECK(std::string(e.what()).find(line_tag) != std::string::npos);
        }
    };
    expect_error_line("u1\ti1\nu2 i2\n", "line 2");           // no tab
    expect_error_line("u1\ti1\ti_extra\n", "line 1");          // three fields
    expect_error_line("u1\ti1\n\tix\n", "line 2");             // empty user
    expect_error_line("u1\ti1\nu2\t\n", "line 2");             // empty item
}

TEST_CASE("parse_interactions rejects an empty interaction set") {
    Vocab vocab;
    CHECK_THROWS_AS(parse_interactions("# only comments\n\n", "empty", vocab), DataError);
}

TEST_CASE("matrix binary round trip preserves exact bytes and values") {
    testutil::TempDir tmp("corpus_rt");
    std::mt19937_64 gen(21);
    Matrix m = testutil::random_matrix(7, 5, gen);
    auto path = tmp.path / "m.sgur";
    write_matrix(path, m);
    Matrix back = read_matrix(path);
    REQUIRE(back.rows == m.rows);
    REQUIRE(back.cols == m.cols);
    CHECK(bitwise_equal(back, m));

    // Header layout is fixed: magic + version + rows + cols, then payload.
    auto bytes = read_bytes(path);
    REQUIRE(bytes.size() == 16 + 7 * 5 * 4);
    CHECK(bytes.compare(0, 4, "SGUR") == 0);
    CHECK(static_cast<unsigned char>(bytes[4]) == 1);  // version 1, little endian
    CHECK(static_cast<unsigned char>(bytes[8]) == 7);  // rows
    CHECK(static_cast<unsigned char>(bytes[12]) == 5); // cols
}

TEST_CASE("a 1x1 matrix file is exactly 20 bytes") {
    testutil::TempDir tmp("corpus_one");
    Matrix m(1, 1);
    m.data[0] = 3.5f;
    auto path = tmp.path / "one.sgur";
    write_matrix(path, m);
    CHECK(fs::file_size(path) == 20);
    Matrix back = read_matrix(path);
    CHECK(back.data[0] == 3.5f);
}

TEST_CASE("matrix reader rejects corrupted binary files") {
    testutil::TempDir tmp("corpus_bad");
    std::mt19937_64 gen(22);
    Matrix m = testutil::random_matrix(3, 4, gen);
    auto path = tmp.path / "m.sgur";
    write_matrix(path, m);
    auto bytes = read_bytes(path);

    SUBCASE("trailing bytes") {
        write_file(tmp.path / "t.sgur", bytes + "x");
        CHECK_THROWS_AS(read_matrix(tmp.path / "t.sgur"), ParseError);
    }
    SUBCASE("truncated payload") {
        write_file(tmp.path / "t.sgur", bytes.substr(0, bytes.size() - 1));
        CHECK_THROWS_AS(read_matrix(tmp.path / "t.sgur"), ParseError);
    }
    SUBCASE("truncated header") {
        write_file(tmp.path / "t.sgur", bytes.substr(0, 10));
        CHECK_THROWS_AS(read_matrix(tmp.path / "t.sgur"), ParseError);
    }
    SUBCASE("unsupported version") {
        auto mut = bytes;
        mut[4] = 2;
        write_file(tmp.path / "t.sgur", mut);
        CHECK_THROWS_AS(read_matrix(tmp.path / "t.sgur"), ParseError);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(read_matrix(tmp.path / "absent.sgur"), IoError);
    }
}

TEST_CASE("matrix reader falls back to CSV when the magic is absent") {
    testutil::TempDir tmp("corpus_csv");
    auto path = tmp.path / "m.csv";
    write_file(path, "1.5,2.0,-3.25\n0,1e-3,4\n");
    Matrix m = read_matrix(path);
    REQUIRE(m.rows == 2);
    REQUIRE(m.cols == 3);
    CHECK(m.at(0, 0) == 1.5f);
    CHECK(m.at(0, 2) == -3.25f);
    CHECK(m.at(1, 1) == 1e-3f);

    SUBCASE("ragged rows are rejected") {
        write_file(tmp.path / "bad.csv", "1,2\n3\n");
        CHECK_THROWS_AS(read_matrix(tmp.path / "bad.csv"), ParseError);
    }
    SUBCASE("non-numeric cells are rejected") {
        write_file(tmp.path / "bad.csv", "1,two\n");
        CHECK_THROWS_AS(read_matrix(tmp.path / "bad.csv"), ParseError);
    }
    SUBCASE("empty file is rejected") {
        write_file(tmp.path / "bad.csv", "");
        CHECK_THROWS_AS(read_matrix(tmp.path / "bad.csv"), ParseError);
    }
}

TEST_CASE("load_features keeps the modality tag and rejects non-finite values") {
    testutil::TempDir tmp("corpus_feat");
    std::mt19937_64 gen(24);
    Matrix good = testutil::random_matrix(2, 3, gen);
    write_matrix(tmp.path / "f.sgur", good);
    auto loaded = load_features(tmp.path / "f.sgur", "text");
    CHECK(loaded.modality == "text");
    CHECK(bitwise_equal(loaded.values, good));

    Matrix nan_m(2, 2);
    nan_m.at(1, 0) = std::numeric_limits<float>::quiet_NaN();
    write_matrix(tmp.path / "n.sgur", nan_m);
    try {
        load_features(tmp.path / "n.sgur", "text");
        FAIL("expected DataError");
    } catch (const DataError& e) {
        // Error names the offending position.
        CHECK(std::string(e.what()).find("row 1") != std::string::npos);
    }

    Matrix inf_m(1, 1);
    inf_m.data[0] = std::numeric_limits<float>::infinity();
    write_matrix(tmp.path / "i.sgur", inf_m);
    CHECK_THROWS_AS(load_features(tmp.path / "i.sgur", "text"), DataError);
}

TEST_CASE("vocab side files round trip and reject reordered indices") {
    testutil::TempDir tmp("corpus_vocab");
    std::vector<std::string> ids = {"alpha", "beta", "gamma"};
    auto path = tmp.path / "users.vocab";
    write_vocab_side(path, ids);
    auto back = load_vocab_side(path);
    CHECK(back == ids);

    write_file(tmp.path / "bad.vocab", "0\talpha\n2\tgamma\n");
    CHECK_THROWS_AS(load_vocab_side(tmp.path / "bad.vocab"), ParseError);
}

TEST_CASE("graph construction is isomorphic under edge order permutation") {
    std::mt19937_64 gen(23);
    std::vector<std::pair<std::string, std::string>> edges;
    for (int u = 0; u < 12; ++u) {
        for (int i = 0; i < 20; ++i) {
            if (uniform01(gen) < 0.3) {
                edges.emplace_back("u" + std::to_string(u), "i" + std::to_string(i));
            }
        }
    }
    REQUIRE(!edges.empty());

    auto render = [](const std::vector<std::pair<std::string, std::string>>& es) {
        std::ostringstream ss;
        for (const auto& [u, i] : es) ss << u << '\t' << i << '\n';
        return ss.str();
    };

    Vocab base_vocab;
    auto base = parse_interactions(render(edges), "base", base_vocab);
    base.validate();

    for (int trial = 0; trial < 5; ++trial) {
        auto reordered = edges;
        shuffle_indices(reordered, gen);

        Vocab vocab;
        auto graph = parse_interactions(render(reordered), "perm", vocab);
        graph.validate();

        // Same edge multiset under the external ids regardless of input order.
        CHECK(graph.num_edges() == base.num_edges());
        for (std::uint32_t u = 0; u < base.num_users; ++u) {
            auto it = vocab.user_index.find(base_vocab.user_ids[u]);
            REQUIRE(it != vocab.user_index.end());
            std::vector<std::string> base_items, perm_items;
            for (auto i : base.user_adj[u]) base_items.push_back(base_vocab.item_ids[i]);
            for (auto i : graph.user_adj[it->second]) perm_items.push_back(vocab.item_ids[i]);
            std::sort(base_items.begin(), base_items.end());
            std::sort(perm_items.begin(), perm_items.end());
            CHECK(base_items == perm_items);
        }
    }
}

TEST_CASE("validate rejects inconsistent graphs") {
    Vocab vocab;
    auto graph = parse_interactions("u1\ti1\nu2\ti2\n", "mem", vocab);
    graph.validate();

    SUBCASE("unsorted adjacency") {
        Vocab v2;
        auto g2 = parse_interactions("u1\ti1\nu1\ti2\n", "mem", v2);
        std::swap(g2.user_adj[0][0], g2.user_adj[0][1]);
        CHECK_THROWS_AS(g2.validate(), DataError);
    }
    SUBCASE("missing transpose edge") {
        auto g2 = graph;
        g2.item_adj[0].clear();
        g2.item_degree[0] = 0;
        CHECK_THROWS_AS(g2.validate(), DataError);
    }
    SUBCASE("item index out of range") {
        auto g2 = graph;
        g2.user_adj[0][0] = 99;
        CHECK_THROWS_AS(g2.validate(), DataError);
    }
}

TEST_CASE("graph_from_edges rejects out-of-range endpoints") {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges = {{0, 0}, {1, 5}};
    CHECK_THROWS_AS(graph_from_edges(2, 3, edges), DataError);
    edges = {{4, 0}};
    CHECK_THROWS_AS(graph_from_edges(2, 3, edges), DataError);
}

TEST_CASE("load_interactions reads from disk and reports the path in errors") {
    testutil::TempDir tmp("corpus_load");
    auto path = tmp.path / "inter.tsv";
    write_file(path, "u1\ti1\nu1\ti2\n");
    Vocab vocab;
    auto graph = load_interactions(path, vocab);
    CHECK(graph.num_edges() == 2);

    Vocab v_missing;
    CHECK_THROWS_AS(load_interactions(tmp.path / "none.tsv", v_missing), IoError);

    write_file(tmp.path / "bad.tsv", "u1 i1\n");
    Vocab v2;
    try {
        load_interactions(tmp.path / "bad.tsv", v2);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("bad.tsv") != std::string::npos);
    }
}
