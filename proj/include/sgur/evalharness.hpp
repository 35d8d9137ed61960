#ifndef SGUR_EVALHARNESS_HPP
#define SGUR_EVALHARNESS_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <utility>
#include <vector>

#include "sgur/corpus.hpp"
#include "sgur/matrix.hpp"

namespace sgur {

using Edge = std::pair<std::uint32_t, std::uint32_t>;  // (user, item)

struct EvalSplit {
    std::size_t num_users = 0;
    std::size_t num_items = 0;
    std::vector<Edge> train_edges;
    std::vector<Edge> val_edges;
    std::vector<Edge> test_edges;
    std::vector<std::uint32_t> cold_items;  // sorted; empty for random splits

    std::size_t total_edges() const {
        return train_edges.size() + val_edges.size() + test_edges.size();
    }
};

// Per-user random split. Each user's edges are shuffled once (users in index
// order share one generator), floor(val_ratio * deg) go to val, floor(
// test_ratio * deg) to test, the rest to train, so every user with at least
// one edge keeps at least one train edge. Ratios must be positive and sum to
// 1 within 1e-9.
EvalSplit split_random(const InteractionGraph& graph, double train_ratio, double val_ratio,
                       double test_ratio, std::uint64_t seed);

// Item cold-start protocol: floor(cold_fraction * |I|) items drawn uniformly
// become cold; every edge touching a cold item leaves train. Cold items are
// divided into halves (val gets floor(n/2), test the rest) and each cold
// item's edges follow it. All remaining edges form train. Errors if the
// selection would leave train empty.
EvalSplit split_cold_start(const InteractionGraph& graph, double cold_fraction,
                           std::uint64_t seed);

// Split persistence: train.tsv / val.tsv / test.tsv with a "# split=<name>"
// header line and external-id pairs resolved through the vocab, plus
// users.vocab / items.vocab, plus cold_items.tsv when the split has cold
// items. Returns the file paths written.
std::vector<std::filesystem::path> save_split(const EvalSplit& split, const Vocab& vocab,
                                              const std::filesystem::path& dir);
EvalSplit load_split(const std::filesystem::path& dir, Vocab& vocab);

// Binary-relevance ranking metrics. ranked is the model's descending-score
// ordering (no duplicates); relevant is sorted ascending and must be
// non-empty. NDCG gain at rank r (1-based) is 1/log2(r + 1); the ideal DCG
// places min(k, |relevant|) hits at the top.
double recall_at_k(const std::vector<std::uint32_t>& ranked,
                   const std::vector<std::uint32_t>& relevant, std::size_t k);
double ndcg_at_k(const std::vector<std::uint32_t>& ranked,
                 const std::vector<std::uint32_t>& relevant, std::size_t k);

// Reference ranking model: embedding tables propagated num_layers times over
// the train graph with symmetric degree normalization, readout = mean over
// layer outputs (including layer 0), scores = dot products, trained with a
// pairwise log-sigmoid loss over uniformly sampled negatives. Single-threaded
// per run; fixed seeds give bit-identical loss traces.
struct RefModelConfig {
    std::size_t embed_dim = 32;
    std::size_t num_layers = 2;
    double learning_rate = 1e-3;
    std::size_t batch_size = 256;
    std::size_t max_epochs = 100;
    std::size_t patience = 20;   // epochs without val Recall@10 improvement
    std::size_t negatives_per_positive = 1;
    std::uint64_t seed = 7;

    void validate() const;
};

struct Triple {
    std::uint32_t user;
    std::uint32_t pos;
    std::uint32_t neg;
};

// Base embedding tables (the trained parameters).
struct RefModelState {
    MatrixD user_base;
    MatrixD item_base;
};

// Exposed building blocks so gradients can be verified externally.
// propagate applies the readout operator; because the propagation matrix is
// symmetric, the same function maps output-side gradients back to the tables.
void propagate(const RefModelState& state, const InteractionGraph& train_graph,
               std::size_t num_layers, MatrixD& user_out, MatrixD& item_out);

// Mean pairwise loss over the triples and its gradient with respect to the
// base tables. grad_user/grad_item are overwritten.
double batch_loss_and_grad(const RefModelState& state, const InteractionGraph& train_graph,
                           std::size_t num_layers, const std::vector<Triple>& triples,
                           MatrixD& grad_user, MatrixD& grad_item);

struct TrainResult {
    MatrixD user_embed;  // propagated embeddings from the best epoch
    MatrixD item_embed;
    std::vector<double> loss_trace;        // mean train loss per epoch
    std::vector<double> val_recall_trace;  // val Recall@10 per epoch (empty val split: all 0)
    std::size_t epochs_run = 0;
    std::size_t best_epoch = 0;            // 1-based epoch the returned embeddings come from
};

// item_init must be |I| x embed_dim; it seeds the item table in every mode.
// user_init null draws the user table from a zero-mean Gaussian with
// std 1/sqrt(embed_dim); otherwise it must be |U| x embed_dim and is copied.
TrainResult train_reference_model(const EvalSplit& split, const MatrixD& item_init,
                                  const MatrixD* user_init, const RefModelConfig& config);

// Truncates or zero-pads columns so item features fit an embedding width.
MatrixD fit_columns(const MatrixD& m, std::size_t cols);

// Ranks every item not observed in train for each user with test edges and
// averages the metrics. Users with no test edges, or with an empty candidate
// set, are skipped. Ties in score break toward the lower item index.
struct EvalResult {
    std::map<std::size_t, double> recall_at;
    std::map<std::size_t, double> ndcg_at;
    std::size_t users_evaluated = 0;
};

EvalResult evaluate(const MatrixD& user_embed, const MatrixD& item_embed, const EvalSplit& split,
                    const std::vector<std::size_t>& ks);

// Mean and sample standard deviation over per-seed results.
struct RankingMetrics {
    std::vector<std::size_t> ks;
    std::vector<EvalResult> per_seed;
    std::map<std::size_t, double> recall_mean, recall_std;
    std::map<std::size_t, double> ndcg_mean, ndcg_std;
};

RankingMetrics aggregate_metrics(const std::vector<EvalResult>& per_seed,
                                 const std::vector<std::size_t>& ks);

}

#endif
