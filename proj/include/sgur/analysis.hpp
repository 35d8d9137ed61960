#ifndef SGUR_ANALYSIS_HPP
#define SGUR_ANALYSIS_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "sgur/corpus.hpp"
#include "sgur/matrix.hpp"

namespace sgur {

// L2-norm statistics comparing a user matrix against an item matrix.
// Histograms share equal-width bins over [0, max norm over both matrices];
// densities are bin counts divided by the row count, so each side sums to 1.
struct GapStats {
    double user_mean_norm = 0.0;
    double item_mean_norm = 0.0;
    double abs_mean_diff = 0.0;  // |user_mean_norm - item_mean_norm|
    std::size_t bins = 0;
    double range_max = 0.0;
    std::vector<double> user_density;
    std::vector<double> item_density;

    double bin_left(std::size_t b) const { return range_max * b / bins; }
    double bin_right(std::size_t b) const { return range_max * (b + 1) / bins; }
};

// Both matrices must be non-empty and share the column count. Per-row norms
// accumulate in binary64.
GapStats semantic_gap(const Matrix& users, const Matrix& items, std::size_t bins = 20);

// key=value lines followed by a CSV block (bin_left,bin_right,user_density,
// item_density). Numbers are written with enough digits to round-trip.
std::string serialize_gap_stats(const GapStats& stats);

// Degree-range buckets: user u falls in bucket j iff edges[j] <= |N(u)| <
// edges[j+1]; the last bucket is open-ended. Users below edges[0] (including
// zero-degree users) belong to no bucket.
struct SparsityBuckets {
    std::vector<std::size_t> bucket_edges;
    std::vector<int> membership;  // bucket index per user, -1 = none

    std::size_t bucket_count() const { return bucket_edges.size(); }
};

// edges must be non-empty, strictly ascending, with edges[0] >= 1.
SparsityBuckets group_by_sparsity(const InteractionGraph& graph,
                                  const std::vector<std::size_t>& edges);

}

#endif
