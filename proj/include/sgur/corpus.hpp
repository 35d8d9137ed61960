#ifndef SGUR_CORPUS_HPP
#define SGUR_CORPUS_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sgur/matrix.hpp"

namespace sgur {

// Maps contiguous indices back to the external ids they were assigned from.
// Indices are dense, 0-based, in first-seen order of the interaction file.
struct Vocab {
    std::vector<std::string> user_ids;
    std::vector<std::string> item_ids;
    std::unordered_map<std::string, std::uint32_t> user_index;
    std::unordered_map<std::string, std::uint32_t> item_index;

    std::uint32_t add_user(const std::string& id);
    std::uint32_t add_item(const std::string& id);
};

// Bipartite user-item graph with both adjacency directions materialized.
// Adjacency lists are sorted ascending and duplicate-free; degree vectors
// always equal the adjacency sizes.
struct InteractionGraph {
    std::size_t num_users = 0;
    std::size_t num_items = 0;
    std::vector<std::vector<std::uint32_t>> user_adj;
    std::vector<std::vector<std::uint32_t>> item_adj;
    std::vector<std::uint32_t> user_degree;
    std::vector<std::uint32_t> item_degree;

    std::size_t num_edges() const;
    // Throws DataError if the two directions disagree or lists are unsorted.
    void validate() const;
};

// Builds a graph from (user, item) index pairs. Duplicate pairs collapse.
InteractionGraph graph_from_edges(std::size_t num_users, std::size_t num_items,
                                  const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges);

// One modality's dense item feature matrix (rows = items in vocab order).
// All values are finite; loaders enforce this on entry.
struct ModalityFeatures {
    std::string modality;
    Matrix values;
};

// Parses "user<TAB>item" lines. Lines starting with '#' and blank lines are
// skipped; CRLF is accepted; duplicate pairs collapse. Errors carry the
// 1-based line number. An input with zero edges is a DataError.
InteractionGraph load_interactions(const std::filesystem::path& path, Vocab& vocab);

// Same contract, parsing from an in-memory buffer ("name" only labels errors).
InteractionGraph parse_interactions(const std::string& text, const std::string& name, Vocab& vocab);

// Feature matrix I/O. Binary files carry the magic "SGUR", a u32 format
// version (currently 1), u32 rows, u32 cols, then rows*cols IEEE-754 binary32
// values, row-major, little-endian, with no padding or trailer. Files that do
// not start with the magic are parsed as comma-separated text, one row per
// line. Non-finite values are rejected with their position.
ModalityFeatures load_features(const std::filesystem::path& path, const std::string& modality);
Matrix read_matrix(const std::filesystem::path& path);
void write_matrix(const std::filesystem::path& path, const Matrix& m);

// Vocab files: "index<TAB>external-id", one per line, indices 0..n-1 in order.
void write_vocab_side(const std::filesystem::path& path, const std::vector<std::string>& ids);
std::vector<std::string> load_vocab_side(const std::filesystem::path& path);

}

#endif
