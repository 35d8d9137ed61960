#include "sgur/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include "sgur/error.hpp"

namespace sgur {

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("read failed on " + path.string());
    return std::move(ss).str();
}

// Strips one trailing '\r' so CRLF input parses like LF input.
std::string_view strip_cr(std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return line;
}

std::uint32_t read_u32_le(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void write_u32_le(std::ostream& out, std::uint32_t v) {
    unsigned char b[4] = {
        static_cast<unsigned char>(v & 0xff),
        static_cast<unsigned char>((v >> 8) & 0xff),
        static_cast<unsigned char>((v >> 16) & 0xff),
        static_cast<unsigned char>((v >> 24) & 0xff),
    };
    out.write(reinterpret_cast<const char*>(b), 4);
}

float f32_from_le(const unsigned char* p) {
    std::uint32_t bits = read_u32_le(p);
    float f;
    std::memcpy(&f, &bits, 4);
    return f;
}

void check_finite(const Matrix& m, const std::string& where) {
    for (std::size_t r = 0; r < m.rows; ++r) {
        const float* row = m.row(r);
        for (std::size_t c = 0; c < m.cols; ++c) {
            if (!std::isfinite(row[c])) {
                throw DataError(where + ": non-finite value at row " + std::to_string(r) +
                                ", col " + std::to_string(c));
            }
        }
    }
}

Matrix parse_csv_matrix(const std::string& text, const std::string& name) {
    std::vector<float> values;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::size_t lineno = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t nl = text.find('\n', pos);
        std::string_view line(text.data() + pos, (nl == std::string::npos ? text.size() : nl) - pos);
        pos = (nl == std::string::npos) ? text.size() + 1 : nl + 1;
        ++lineno;
        line = strip_cr(line);
        if (line.empty()) continue;
        std::size_t row_cols = 0;
        std::size_t field_start = 0;
        while (field_start <= line.size()) {
            std::size_t comma = line.find(',', field_start);
            std::string_view field = line.substr(
                field_start, (comma == std::string_view::npos ? line.size() : comma) - field_start);
            float v = 0.0f;
            auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
            if (ec != std::errc() || ptr != field.data() + field.size()) {
                throw ParseError(name + ": line " + std::to_string(lineno) +
                                 ": bad number '" + std::string(field) + "'");
            }
            values.push_back(v);
            ++row_cols;
            if (comma == std::string_view::npos) break;
            field_start = comma + 1;
        }
        if (rows == 0) {
            cols = row_cols;
        } else if (row_cols != cols) {
            throw ParseError(name + ": line " + std::to_string(lineno) + ": expected " +
                             std::to_string(cols) + " columns, got " + std::to_string(row_cols));
        }
        ++rows;
    }
    if (rows == 0) throw ParseError(name + ": no rows");
    Matrix m(rows, cols);
    m.data = std::move(values);
    return m;
}

}

std::uint32_t Vocab::add_user(const std::string& id) {
    auto it = user_index.find(id);
    if (it != user_index.end()) return it->second;
    auto idx = static_cast<std::uint32_t>(user_ids.size());
    user_ids.push_back(id);
    user_index.emplace(id, idx);
    return idx;
}

std::uint32_t Vocab::add_item(const std::string& id) {
    auto it = item_index.find(id);
    if (it != item_index.end()) return it->second;
    auto idx = static_cast<std::uint32_t>(item_ids.size());
    item_ids.push_back(id);
    item_index.emplace(id, idx);
    return idx;
}

std::size_t InteractionGraph::num_edges() const {
    std::size_t n = 0;
    for (const auto& adj : user_adj) n += adj.size();
    return n;
}

void InteractionGraph::validate() const {
    if (user_adj.size() != num_users || user_degree.size() != num_users ||
        item_adj.size() != num_items || item_degree.size() != num_items) {
        throw DataError("graph: container sizes disagree with counts");
    }
    std::size_t user_side = 0;
    std::size_t item_side = 0;
    for (std::size_t u = 0; u < num_users; ++u) {
        const auto& adj = user_adj[u];
        if (adj.size() != user_degree[u]) throw DataError("graph: user degree out of sync");
        for (std::size_t j = 0; j < adj.size(); ++j) {
            if (adj[j] >= num_items) throw DataError("graph: item index out of range");
            if (j > 0 && adj[j] <= adj[j - 1]) throw DataError("graph: user adjacency not strictly ascending");
            const auto& back = item_adj[adj[j]];
            if (!std::binary_search(back.begin(), back.end(), static_cast<std::uint32_t>(u))) {
                throw DataError("graph: edge missing from item side");
            }
        }
        user_side += adj.size();
    }
    for (std::size_t i = 0; i < num_items; ++i) {
        const auto& adj = item_adj[i];
        if (adj.size() != item_degree[i]) throw DataError("graph: item degree out of sync");
        for (std::size_t j = 0; j < adj.size(); ++j) {
            if (adj[j] >= num_users) throw DataError("graph: user index out of range");
            if (j > 0 && adj[j] <= adj[j - 1]) throw DataError("graph: item adjacency not strictly ascending");
        }
        item_side += adj.size();
    }
    if (user_side != item_side) throw DataError("graph: edge counts disagree between sides");
}

InteractionGraph graph_from_edges(std::size_t num_users, std::size_t num_items,
                                  const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges) {
    InteractionGraph g;
    g.num_users = num_users;
    g.num_items = num_items;
    g.user_adj.resize(num_users);
    g.item_adj.resize(num_items);
    std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
    for (const auto& [u, i] : edges) {
        if (u >= num_users) throw DataError("edge refers to user index out of range");
        if (i >= num_items) throw DataError("edge refers to item index out of range");
        if (!seen.insert({u, i}).second) continue;
        g.user_adj[u].push_back(i);
        g.item_adj[i].push_back(u);
    }
    for (auto& adj : g.user_adj) std::sort(adj.begin(), adj.end());
    for (auto& adj : g.item_adj) std::sort(adj.begin(), adj.end());
    g.user_degree.resize(num_users);
    g.item_degree.resize(num_items);
    for (std::size_t u = 0; u < num_users; ++u) g.user_degree[u] = static_cast<std::uint32_t>(g.user_adj[u].size());
    for (std::size_t i = 0; i < num_items; ++i) g.item_degree[i] = static_cast<std::uint32_t>(g.item_adj[i].size());
    return g;
}

InteractionGraph parse_interactions(const std::string& text, const std::string& name, Vocab& vocab) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    std::size_t lineno = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t nl = text.find('\n', pos);
        std::string_view line(text.data() + pos, (nl == std::string::npos ? text.size() : nl) - pos);
        pos = (nl == std::string::npos) ? text.size() + 1 : nl + 1;
        ++lineno;
        line = strip_cr(line);
        if (line.empty() || line.front() == '#') continue;
        std::size_t tab = line.find('\t');
        if (tab == std::string_view::npos || line.find('\t', tab + 1) != std::string_view::npos) {
            throw ParseError(name + ": line " + std::to_string(lineno) +
                             ": expected exactly 2 tab-separated fields");
        }
        std::string_view user = line.substr(0, tab);
        std::string_view item = line.substr(tab + 1);
        if (user.empty() || item.empty()) {
            throw ParseError(name + ": line " + std::to_string(lineno) + ": empty field");
        }
        std::uint32_t u = vocab.add_user(std::string(user));
        std::uint32_t i = vocab.add_item(std::string(item));
        edges.emplace_back(u, i);
    }
    if (edges.empty()) throw DataError(name + ": no interactions");
    return graph_from_edges(vocab.user_ids.size(), vocab.item_ids.size(), edges);
}

InteractionGraph load_interactions(const std::filesystem::path& path, Vocab& vocab) {
    return parse_interactions(read_file(path), path.string(), vocab);
}

Matrix read_matrix(const std::filesystem::path& path) {
    std::string raw = read_file(path);
    if (raw.size() >= 4 && raw.compare(0, 4, "SGUR") == 0) {
        if (raw.size() < 16) throw ParseError(path.string() + ": truncated header");
        const auto* p = reinterpret_cast<const unsigned char*>(raw.data());
        std::uint32_t version = read_u32_le(p + 4);
        if (version != 1) {
            throw ParseError(path.string() + ": unsupported format version " + std::to_string(version));
        }
        std::uint64_t rows = read_u32_le(p + 8);
        std::uint64_t cols = read_u32_le(p + 12);
        std::uint64_t payload = rows * cols * 4;
        if (raw.size() < 16 + payload) throw ParseError(path.string() + ": truncated payload");
        if (raw.size() > 16 + payload) throw ParseError(path.string() + ": trailing bytes after payload");
        Matrix m(static_cast<std::size_t>(rows), static_cast<std::size_t>(cols));
        for (std::size_t i = 0; i < m.data.size(); ++i) {
            m.data[i] = f32_from_le(p + 16 + i * 4);
        }
        return m;
    }
    return parse_csv_matrix(raw, path.string());
}

void write_matrix(const std::filesystem::path& path, const Matrix& m) {
    if (m.rows > 0xffffffffull || m.cols > 0xffffffffull) {
        throw InvalidArgument("matrix too large for format");
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out.write("SGUR", 4);
    write_u32_le(out, 1);
    write_u32_le(out, static_cast<std::uint32_t>(m.rows));
    write_u32_le(out, static_cast<std::uint32_t>(m.cols));
    for (float v : m.data) {
        std::uint32_t bits;
        std::memcpy(&bits, &v, 4);
        unsigned char b[4] = {
            static_cast<unsigned char>(bits & 0xff),
            static_cast<unsigned char>((bits >> 8) & 0xff),
            static_cast<unsigned char>((bits >> 16) & 0xff),
            static_cast<unsigned char>((bits >> 24) & 0xff),
        };
        out.write(reinterpret_cast<const char*>(b), 4);
    }
    if (!out) throw IoError("write failed on " + path.string());
}

ModalityFeatures load_features(const std::filesystem::path& path, const std::string& modality) {
    ModalityFeatures f;
    f.modality = modality;
    f.values = read_matrix(path);
    check_finite(f.values, path.string());
    return f;
}

void write_vocab_side(const std::filesystem::path& path, const std::vector<std::string>& ids) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    for (std::size_t i = 0; i < ids.size(); ++i) {
        out << i << '\t' << ids[i] << '\n';
    }
    if (!out) throw IoError("write failed on " + path.string());
}

std::vector<std::string> load_vocab_side(const std::filesystem::path& path) {
    std::string text = read_file(path);
    std::vector<std::string> ids;
    std::size_t lineno = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t nl = text.find('\n', pos);
        std::string_view line(text.data() + pos, (nl == std::string::npos ? text.size() : nl) - pos);
        pos = (nl == std::string::npos) ? text.size() + 1 : nl + 1;
        ++lineno;
        line = strip_cr(line);
        if (line.empty()) continue;
        std::size_t tab = line.find('\t');
        if (tab == std::string_view::npos) {
            throw ParseError(path.string() + ": line " + std::to_string(lineno) + ": expected index<TAB>id");
        }
        std::string_view idx_field = line.substr(0, tab);
        std::uint64_t idx = 0;
        auto [ptr, ec] = std::from_chars(idx_field.data(), idx_field.data() + idx_field.size(), idx);
        if (ec != std::errc() || ptr != idx_field.data() + idx_field.size() || idx != ids.size()) {
            throw ParseError(path.string() + ": line " + std::to_string(lineno) + ": bad or out-of-order index");
        }
        ids.emplace_back(line.substr(tab + 1));
    }
    return ids;
}

}
