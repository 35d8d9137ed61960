#include "sgur/evalharness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "sgur/error.hpp"
#include "sgur/kernels.hpp"
#include "sgur/parallel.hpp"
#include "sgur/rng.hpp"

namespace sgur {

namespace {

double stable_sigmoid(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    double e = std::exp(x);
    return e / (1.0 + e);
}

// log(1 + exp(x)) without overflow.
double softplus(double x) {
    if (x > 0.0) return x + std::log1p(std::exp(-x));
    return std::log1p(std::exp(x));
}

std::vector<std::vector<std::uint32_t>> adjacency_from_edges(std::size_t num_users,
                                                             const std::vector<Edge>& edges) {
    std::vector<std::vector<std::uint32_t>> adj(num_users);
    for (const auto& [u, i] : edges) adj[u].push_back(i);
    for (auto& a : adj) {
        std::sort(a.begin(), a.end());
        a.erase(std::unique(a.begin(), a.end()), a.end());
    }
    return adj;
}

// Mean Recall@k over users with a non-empty relevant set, ranking all items
// outside the user's train adjacency. Shared by evaluate() and the early
// stopping monitor.
double mean_recall(const MatrixD& user_embed, const MatrixD& item_embed,
                   const std::vector<std::vector<std::uint32_t>>& train_adj,
                   const std::vector<std::vector<std::uint32_t>>& relevant, std::size_t k) {
    std::size_t num_users = user_embed.rows;
    std::size_t num_items = item_embed.rows;
    std::vector<double> per_user(num_users, -1.0);
    parallel_for(0, num_users, [&](std::size_t lo, std::size_t hi) {
        const auto& kn = kernels::ops();
        std::vector<std::uint32_t> cands;
        for (std::size_t u = lo; u < hi; ++u) {
            if (relevant[u].empty()) continue;
            cands.clear();
            const auto& ta = train_adj[u];
            for (std::uint32_t i = 0; i < num_items; ++i) {
                if (!std::binary_search(ta.begin(), ta.end(), i)) cands.push_back(i);
            }
            if (cands.empty()) continue;
            std::vector<double> scores(cands.size());
            for (std::size_t c = 0; c < cands.size(); ++c) {
                scores[c] = kn.dot_f64(user_embed.row(u), item_embed.row(cands[c]), user_embed.cols);
            }
            std::size_t top = std::min(k, cands.size());
            std::vector<std::uint32_t> order(cands.size());
            std::iota(order.begin(), order.end(), 0);
            std::partial_sort(order.begin(), order.begin() + top, order.end(),
                              [&](std::uint32_t a, std::uint32_t b) {
                                  if (scores[a] != scores[b]) return scores[a] > scores[b];
                                  return cands[a] < cands[b];
                              });
            std::size_t hits = 0;
            for (std::size_t r = 0; r < top; ++r) {
                if (std::binary_search(relevant[u].begin(), relevant[u].end(), cands[order[r]])) ++hits;
            }
            per_user[u] = static_cast<double>(hits) / static_cast<double>(relevant[u].size());
        }
    });
    double sum = 0.0;
    std::size_t n = 0;
    for (double v : per_user) {
        if (v >= 0.0) {
            sum += v;
            ++n;
        }
    }
    return n > 0 ? sum / static_cast<double>(n) : 0.0;
}

void check_ratio(double r, const char* name) {
    if (!(r > 0.0 && r < 1.0)) {
        throw InvalidArgument(std::string("split: ") + name + " must be in (0, 1)");
    }
}

}

EvalSplit split_random(const InteractionGraph& graph, double train_ratio, double val_ratio,
                       double test_ratio, std::uint64_t seed) {
    check_ratio(train_ratio, "train ratio");
    check_ratio(val_ratio, "val ratio");
    check_ratio(test_ratio, "test ratio");
    if (std::abs(train_ratio + val_ratio + test_ratio - 1.0) > 1e-9) {
        throw InvalidArgument("split: ratios must sum to 1");
    }
    EvalSplit split;
    split.num_users = graph.num_users;
    split.num_items = graph.num_items;
    std::mt19937_64 gen(seed);
    std::vector<std::uint32_t> items;
    for (std::size_t u = 0; u < graph.num_users; ++u) {
        items.assign(graph.user_adj[u].begin(), graph.user_adj[u].end());
        shuffle_indices(items, gen);
        std::size_t deg = items.size();
        std::size_t n_val = static_cast<std::size_t>(val_ratio * static_cast<double>(deg));
        std::size_t n_test = static_cast<std::size_t>(test_ratio * static_cast<double>(deg));
        std::size_t n_train = deg - n_val - n_test;
        auto user = static_cast<std::uint32_t>(u);
        for (std::size_t j = 0; j < deg; ++j) {
            if (j < n_train) split.train_edges.emplace_back(user, items[j]);
            else if (j < n_train + n_val) split.val_edges.emplace_back(user, items[j]);
            else split.test_edges.emplace_back(user, items[j]);
        }
    }
    return split;
}

EvalSplit split_cold_start(const InteractionGraph& graph, double cold_fraction,
                           std::uint64_t seed) {
    if (!(cold_fraction > 0.0 && cold_fraction < 1.0)) {
        throw InvalidArgument("split: cold fraction must be in (0, 1)");
    }
    EvalSplit split;
    split.num_users = graph.num_users;
    split.num_items = graph.num_items;
    std::size_t n_cold = static_cast<std::size_t>(cold_fraction * static_cast<double>(graph.num_items));
    std::mt19937_64 gen(seed);

    std::vector<std::uint32_t> perm(graph.num_items);
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t j = 0; j < n_cold; ++j) {
        std::size_t swap_with = j + static_cast<std::size_t>(uniform_index(gen, graph.num_items - j));
        std::swap(perm[j], perm[swap_with]);
    }

    // 0 = warm, 1 = cold/val, 2 = cold/test. Halves follow selection order so
    // the val/test division is itself uniform.
    std::vector<unsigned char> side(graph.num_items, 0);
    std::size_t n_val_items = n_cold / 2;
    for (std::size_t j = 0; j < n_cold; ++j) {
        side[perm[j]] = j < n_val_items ? 1 : 2;
        split.cold_items.push_back(perm[j]);
    }
    std::sort(split.cold_items.begin(), split.cold_items.end());

    for (std::size_t u = 0; u < graph.num_users; ++u) {
        auto user = static_cast<std::uint32_t>(u);
        for (std::uint32_t i : graph.user_adj[u]) {
            if (side[i] == 0) split.train_edges.emplace_back(user, i);
            else if (side[i] == 1) split.val_edges.emplace_back(user, i);
            else split.test_edges.emplace_back(user, i);
        }
    }
    if (split.train_edges.empty()) {
        throw DataError("split: cold item selection leaves no train edges");
    }
    return split;
}

namespace {

void write_edge_file(const std::filesystem::path& path, const char* name,
                     const std::vector<Edge>& edges, const Vocab& vocab) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << "# split=" << name << '\n';
    for (const auto& [u, i] : edges) {
        out << vocab.user_ids[u] << '\t' << vocab.item_ids[i] << '\n';
    }
    if (!out) throw IoError("write failed on " + path.string());
}

std::vector<Edge> load_edge_file(const std::filesystem::path& path, const Vocab& vocab) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<Edge> edges;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        std::size_t tab = line.find('\t');
        if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos) {
            throw ParseError(path.string() + ": line " + std::to_string(lineno) +
                             ": expected exactly 2 tab-separated fields");
        }
        std::string user = line.substr(0, tab);
        std::string item = line.substr(tab + 1);
        auto uit = vocab.user_index.find(user);
        auto iit = vocab.item_index.find(item);
        if (uit == vocab.user_index.end()) {
            throw DataError(path.string() + ": line " + std::to_string(lineno) +
                            ": user '" + user + "' not in vocab");
        }
        if (iit == vocab.item_index.end()) {
            throw DataError(path.string() + ": line " + std::to_string(lineno) +
                            ": item '" + item + "' not in vocab");
        }
        edges.emplace_back(uit->second, iit->second);
    }
    return edges;
}

}

std::vector<std::filesystem::path> save_split(const EvalSplit& split, const Vocab& vocab,
                                              const std::filesystem::path& dir) {
    if (vocab.user_ids.size() != split.num_users || vocab.item_ids.size() != split.num_items) {
        throw DataError("save_split: vocab sizes disagree with split");
    }
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> written;
    write_edge_file(dir / "train.tsv", "train", split.train_edges, vocab);
    written.push_back(dir / "train.tsv");
    write_edge_file(dir / "val.tsv", "val", split.val_edges, vocab);
    written.push_back(dir / "val.tsv");
    write_edge_file(dir / "test.tsv", "test", split.test_edges, vocab);
    written.push_back(dir / "test.tsv");
    write_vocab_side(dir / "users.vocab", vocab.user_ids);
    written.push_back(dir / "users.vocab");
    write_vocab_side(dir / "items.vocab", vocab.item_ids);
    written.push_back(dir / "items.vocab");
    if (!split.cold_items.empty()) {
        std::ofstream out(dir / "cold_items.tsv", std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + (dir / "cold_items.tsv").string() + " for writing");
        for (std::uint32_t i : split.cold_items) out << vocab.item_ids[i] << '\n';
        if (!out) throw IoError("write failed on " + (dir / "cold_items.tsv").string());
        written.push_back(dir / "cold_items.tsv");
    }
    return written;
}

EvalSplit load_split(const std::filesystem::path& dir, Vocab& vocab) {
    vocab = Vocab{};
    auto users = load_vocab_side(dir / "users.vocab");
    auto items = load_vocab_side(dir / "items.vocab");
    for (const auto& id : users) vocab.add_user(id);
    for (const auto& id : items) vocab.add_item(id);
    EvalSplit split;
    split.num_users = users.size();
    split.num_items = items.size();
    split.train_edges = load_edge_file(dir / "train.tsv", vocab);
    split.val_edges = load_edge_file(dir / "val.tsv", vocab);
    split.test_edges = load_edge_file(dir / "test.tsv", vocab);
    auto cold_path = dir / "cold_items.tsv";
    if (std::filesystem::exists(cold_path)) {
        std::ifstream in(cold_path, std::ios::binary);
        if (!in) throw IoError("cannot open " + cold_path.string());
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            auto it = vocab.item_index.find(line);
            if (it == vocab.item_index.end()) {
                throw DataError(cold_path.string() + ": item '" + line + "' not in vocab");
            }
            split.cold_items.push_back(it->second);
        }
        std::sort(split.cold_items.begin(), split.cold_items.end());
    }
    return split;
}

double recall_at_k(const std::vector<std::uint32_t>& ranked,
                   const std::vector<std::uint32_t>& relevant, std::size_t k) {
    if (relevant.empty()) throw InvalidArgument("recall_at_k: empty relevant set");
    if (k < 1) throw InvalidArgument("recall_at_k: k must be >= 1");
    std::size_t top = std::min(k, ranked.size());
    std::size_t hits = 0;
    for (std::size_t r = 0; r < top; ++r) {
        if (std::binary_search(relevant.begin(), relevant.end(), ranked[r])) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(relevant.size());
}

double ndcg_at_k(const std::vector<std::uint32_t>& ranked,
                 const std::vector<std::uint32_t>& relevant, std::size_t k) {
    if (relevant.empty()) throw InvalidArgument("ndcg_at_k: empty relevant set");
    if (k < 1) throw InvalidArgument("ndcg_at_k: k must be >= 1");
    double dcg = 0.0;
    std::size_t top = std::min(k, ranked.size());
    for (std::size_t r = 1; r <= top; ++r) {
        if (std::binary_search(relevant.begin(), relevant.end(), ranked[r - 1])) {
            dcg += 1.0 / std::log2(static_cast<double>(r + 1));
        }
    }
    double idcg = 0.0;
    std::size_t ideal = std::min(k, relevant.size());
    for (std::size_t r = 1; r <= ideal; ++r) {
        idcg += 1.0 / std::log2(static_cast<double>(r + 1));
    }
    return dcg / idcg;
}

void RefModelConfig::validate() const {
    if (embed_dim < 1) throw InvalidArgument("model: embed_dim must be >= 1");
    if (num_layers < 1) throw InvalidArgument("model: num_layers must be >= 1");
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
        throw InvalidArgument("model: learning rate must be positive and finite");
    }
    if (batch_size < 1) throw InvalidArgument("model: batch_size must be >= 1");
    if (max_epochs < 1) throw InvalidArgument("model: max_epochs must be >= 1");
    if (patience < 1) throw InvalidArgument("model: patience must be >= 1");
    if (negatives_per_positive < 1) throw InvalidArgument("model: negatives_per_positive must be >= 1");
}

void propagate(const RefModelState& state, const InteractionGraph& train_graph,
               std::size_t num_layers, MatrixD& user_out, MatrixD& item_out) {
    const auto& kn = kernels::ops();
    std::size_t d = state.user_base.cols;
    MatrixD cur_u = state.user_base;
    MatrixD cur_i = state.item_base;
    MatrixD acc_u = state.user_base;
    MatrixD acc_i = state.item_base;
    MatrixD next_u(cur_u.rows, d);
    MatrixD next_i(cur_i.rows, d);
    for (std::size_t layer = 0; layer < num_layers; ++layer) {
        std::fill(next_u.data.begin(), next_u.data.end(), 0.0);
        std::fill(next_i.data.begin(), next_i.data.end(), 0.0);
        for (std::size_t u = 0; u < train_graph.num_users; ++u) {
            double du = train_graph.user_degree[u];
            for (std::uint32_t i : train_graph.user_adj[u]) {
                double w = 1.0 / std::sqrt(du * static_cast<double>(train_graph.item_degree[i]));
                kn.axpy_f64(next_u.row(u), cur_i.row(i), w, d);
            }
        }
        for (std::size_t i = 0; i < train_graph.num_items; ++i) {
            double di = train_graph.item_degree[i];
            for (std::uint32_t u : train_graph.item_adj[i]) {
                double w = 1.0 / std::sqrt(static_cast<double>(train_graph.user_degree[u]) * di);
                kn.axpy_f64(next_i.row(i), cur_u.row(u), w, d);
            }
        }
        kn.axpy_f64(acc_u.data.data(), next_u.data.data(), 1.0, acc_u.data.size());
        kn.axpy_f64(acc_i.data.data(), next_i.data.data(), 1.0, acc_i.data.size());
        std::swap(cur_u, next_u);
        std::swap(cur_i, next_i);
    }
    double inv = 1.0 / static_cast<double>(num_layers + 1);
    user_out = std::move(acc_u);
    item_out = std::move(acc_i);
    for (double& v : user_out.data) v *= inv;
    for (double& v : item_out.data) v *= inv;
}

double batch_loss_and_grad(const RefModelState& state, const InteractionGraph& train_graph,
                           std::size_t num_layers, const std::vector<Triple>& triples,
                           MatrixD& grad_user, MatrixD& grad_item) {
    if (triples.empty()) throw InvalidArgument("batch_loss_and_grad: no triples");
    const auto& kn = kernels::ops();
    std::size_t d = state.user_base.cols;
    MatrixD user_prop, item_prop;
    propagate(state, train_graph, num_layers, user_prop, item_prop);

    MatrixD g_user(state.user_base.rows, d);
    MatrixD g_item(state.item_base.rows, d);
    double inv_m = 1.0 / static_cast<double>(triples.size());
    double loss = 0.0;
    for (const Triple& t : triples) {
        const double* eu = user_prop.row(t.user);
        const double* ep = item_prop.row(t.pos);
        const double* en = item_prop.row(t.neg);
        double diff = kn.dot_f64(eu, ep, d) - kn.dot_f64(eu, en, d);
        loss += softplus(-diff);
        double g = (stable_sigmoid(diff) - 1.0) * inv_m;
        kn.axpy_f64(g_user.row(t.user), ep, g, d);
        kn.axpy_f64(g_user.row(t.user), en, -g, d);
        kn.axpy_f64(g_item.row(t.pos), eu, g, d);
        kn.axpy_f64(g_item.row(t.neg), eu, -g, d);
    }
    // The readout operator is symmetric, so it is its own adjoint.
    RefModelState g_state{std::move(g_user), std::move(g_item)};
    propagate(g_state, train_graph, num_layers, grad_user, grad_item);
    return loss * inv_m;
}

MatrixD fit_columns(const MatrixD& m, std::size_t cols) {
    if (m.cols == cols) return m;
    MatrixD out(m.rows, cols, 0.0);
    std::size_t copy = std::min(cols, m.cols);
    for (std::size_t r = 0; r < m.rows; ++r) {
        const double* src = m.row(r);
        double* dst = out.row(r);
        for (std::size_t c = 0; c < copy; ++c) dst[c] = src[c];
    }
    return out;
}

TrainResult train_reference_model(const EvalSplit& split, const MatrixD& item_init,
                                  const MatrixD* user_init, const RefModelConfig& config) {
    config.validate();
    if (split.train_edges.empty()) throw DataError("train: no train edges");
    if (item_init.rows != split.num_items || item_init.cols != config.embed_dim) {
        throw DataError("train: item init must be num_items x embed_dim");
    }
    if (user_init != nullptr &&
        (user_init->rows != split.num_users || user_init->cols != config.embed_dim)) {
        throw DataError("train: user init must be num_users x embed_dim");
    }

    const auto& kn = kernels::ops();
    std::size_t d = config.embed_dim;
    std::mt19937_64 gen(config.seed);

    RefModelState state;
    state.item_base = item_init;
    if (user_init != nullptr) {
        state.user_base = *user_init;
    } else {
        state.user_base = MatrixD(split.num_users, d);
        fill_gaussian(state.user_base, gen, 1.0 / std::sqrt(static_cast<double>(d)));
    }

    InteractionGraph train_graph = graph_from_edges(split.num_users, split.num_items,
                                                    split.train_edges);
    auto train_adj = adjacency_from_edges(split.num_users, split.train_edges);
    auto val_relevant = adjacency_from_edges(split.num_users, split.val_edges);
    bool has_val = !split.val_edges.empty();

    TrainResult result;
    double best_recall = -1.0;
    std::vector<Edge> order = split.train_edges;
    std::vector<Triple> triples;
    MatrixD grad_user, grad_item;

    for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
        shuffle_indices(order, gen);
        triples.clear();
        for (const auto& [u, pos] : order) {
            const auto& ta = train_adj[u];
            if (ta.size() >= split.num_items) continue;  // no negative exists
            for (std::size_t s = 0; s < config.negatives_per_positive; ++s) {
                std::uint32_t neg;
                do {
                    neg = static_cast<std::uint32_t>(uniform_index(gen, split.num_items));
                } while (std::binary_search(ta.begin(), ta.end(), neg));
                triples.push_back({u, pos, neg});
            }
        }
        if (triples.empty()) throw DataError("train: no trainable triples");

        double loss_sum = 0.0;
        for (std::size_t start = 0; start < triples.size(); start += config.batch_size) {
            std::size_t stop = std::min(start + config.batch_size, triples.size());
            std::vector<Triple> batch(triples.begin() + start, triples.begin() + stop);
            double batch_loss = batch_loss_and_grad(state, train_graph, config.num_layers,
                                                    batch, grad_user, grad_item);
            loss_sum += batch_loss * static_cast<double>(batch.size());
            kn.axpy_f64(state.user_base.data.data(), grad_user.data.data(),
                        -config.learning_rate, state.user_base.data.size());
            kn.axpy_f64(state.item_base.data.data(), grad_item.data.data(),
                        -config.learning_rate, state.item_base.data.size());
        }
        result.loss_trace.push_back(loss_sum / static_cast<double>(triples.size()));
        result.epochs_run = epoch;

        MatrixD user_prop, item_prop;
        propagate(state, train_graph, config.num_layers, user_prop, item_prop);
        double val_recall = has_val
            ? mean_recall(user_prop, item_prop, train_adj, val_relevant, 10)
            : 0.0;
        result.val_recall_trace.push_back(val_recall);

        if (!has_val) {
            result.best_epoch = epoch;
            result.user_embed = std::move(user_prop);
            result.item_embed = std::move(item_prop);
            continue;
        }
        if (val_recall > best_recall) {
            best_recall = val_recall;
            result.best_epoch = epoch;
            result.user_embed = std::move(user_prop);
            result.item_embed = std::move(item_prop);
        } else if (epoch - result.best_epoch >= config.patience) {
            break;
        }
    }
    return result;
}

EvalResult evaluate(const MatrixD& user_embed, const MatrixD& item_embed, const EvalSplit& split,
                    const std::vector<std::size_t>& ks) {
    if (ks.empty()) throw InvalidArgument("evaluate: no cutoffs");
    for (std::size_t k : ks) {
        if (k < 1) throw InvalidArgument("evaluate: cutoffs must be >= 1");
    }
    if (user_embed.rows != split.num_users || item_embed.rows != split.num_items ||
        user_embed.cols != item_embed.cols) {
        throw DataError("evaluate: embedding shapes disagree with split");
    }
    auto train_adj = adjacency_from_edges(split.num_users, split.train_edges);
    auto relevant = adjacency_from_edges(split.num_users, split.test_edges);
    std::size_t max_k = *std::max_element(ks.begin(), ks.end());
    std::size_t num_items = split.num_items;

    std::vector<std::map<std::size_t, double>> recall_rows(split.num_users);
    std::vector<std::map<std::size_t, double>> ndcg_rows(split.num_users);
    std::vector<unsigned char> counted(split.num_users, 0);

    parallel_for(0, split.num_users, [&](std::size_t lo, std::size_t hi) {
        const auto& kn = kernels::ops();
        std::vector<std::uint32_t> cands;
        for (std::size_t u = lo; u < hi; ++u) {
            if (relevant[u].empty()) continue;
            cands.clear();
            const auto& ta = train_adj[u];
            for (std::uint32_t i = 0; i < num_items; ++i) {
                if (!std::binary_search(ta.begin(), ta.end(), i)) cands.push_back(i);
            }
            if (cands.empty()) continue;
            std::vector<double> scores(cands.size());
            for (std::size_t c = 0; c < cands.size(); ++c) {
                scores[c] = kn.dot_f64(user_embed.row(u), item_embed.row(cands[c]), user_embed.cols);
            }
            std::vector<std::uint32_t> order(cands.size());
            std::iota(order.begin(), order.end(), 0);
            std::size_t top = std::min(max_k, cands.size());
            std::partial_sort(order.begin(), order.begin() + top, order.end(),
                              [&](std::uint32_t a, std::uint32_t b) {
                                  if (scores[a] != scores[b]) return scores[a] > scores[b];
                                  return cands[a] < cands[b];
                              });
            std::vector<std::uint32_t> ranked(top);
            for (std::size_t r = 0; r < top; ++r) ranked[r] = cands[order[r]];
            for (std::size_t k : ks) {
                recall_rows[u][k] = recall_at_k(ranked, relevant[u], k);
                ndcg_rows[u][k] = ndcg_at_k(ranked, relevant[u], k);
            }
            counted[u] = 1;
        }
    });

    EvalResult result;
    for (std::size_t k : ks) {
        result.recall_at[k] = 0.0;
        result.ndcg_at[k] = 0.0;
    }
    for (std::size_t u = 0; u < split.num_users; ++u) {
        if (!counted[u]) continue;
        ++result.users_evaluated;
        for (std::size_t k : ks) {
            result.recall_at[k] += recall_rows[u][k];
            result.ndcg_at[k] += ndcg_rows[u][k];
        }
    }
    if (result.users_evaluated > 0) {
        for (std::size_t k : ks) {
            result.recall_at[k] /= static_cast<double>(result.users_evaluated);
            result.ndcg_at[k] /= static_cast<double>(result.users_evaluated);
        }
    }
    return result;
}

RankingMetrics aggregate_metrics(const std::vector<EvalResult>& per_seed,
                                 const std::vector<std::size_t>& ks) {
    if (per_seed.empty()) throw InvalidArgument("aggregate_metrics: no results");
    RankingMetrics out;
    out.ks = ks;
    out.per_seed = per_seed;
    double n = static_cast<double>(per_seed.size());
    for (std::size_t k : ks) {
        double rm = 0.0, nm = 0.0;
        for (const auto& r : per_seed) {
            rm += r.recall_at.at(k);
            nm += r.ndcg_at.at(k);
        }
        rm /= n;
        nm /= n;
        double rv = 0.0, nv = 0.0;
        if (per_seed.size() > 1) {
            for (const auto& r : per_seed) {
                rv += (r.recall_at.at(k) - rm) * (r.recall_at.at(k) - rm);
                nv += (r.ndcg_at.at(k) - nm) * (r.ndcg_at.at(k) - nm);
            }
            rv /= (n - 1.0);
            nv /= (n - 1.0);
        }
        out.recall_mean[k] = rm;
        out.recall_std[k] = std::sqrt(rv);
        out.ndcg_mean[k] = nm;
        out.ndcg_std[k] = std::sqrt(nv);
    }
    return out;
}

}
