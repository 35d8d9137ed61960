#include "sgur/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "sgur/error.hpp"
#include "sgur/kernels.hpp"

namespace sgur {

namespace {

std::vector<double> row_norms(const Matrix& m) {
    const auto& kn = kernels::ops();
    std::vector<double> norms(m.rows);
    for (std::size_t r = 0; r < m.rows; ++r) {
        norms[r] = std::sqrt(kn.sumsq_f32(m.row(r), m.cols));
    }
    return norms;
}

double mean(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x;
    return acc / static_cast<double>(v.size());
}

std::vector<double> histogram_density(const std::vector<double>& norms, double range_max,
                                      std::size_t bins) {
    std::vector<std::size_t> counts(bins, 0);
    for (double x : norms) {
        std::size_t b = 0;
        if (range_max > 0.0) {
            b = static_cast<std::size_t>(x / range_max * static_cast<double>(bins));
            if (b >= bins) b = bins - 1;
        }
        ++counts[b];
    }
    std::vector<double> density(bins);
    double inv = 1.0 / static_cast<double>(norms.size());
    for (std::size_t b = 0; b < bins; ++b) density[b] = static_cast<double>(counts[b]) * inv;
    return density;
}

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}

GapStats semantic_gap(const Matrix& users, const Matrix& items, std::size_t bins) {
    if (users.rows == 0 || items.rows == 0) throw DataError("semantic_gap: empty matrix");
    if (users.cols != items.cols) {
        throw DataError("semantic_gap: dimension mismatch (users " + std::to_string(users.cols) +
                        ", items " + std::to_string(items.cols) + ")");
    }
    if (bins < 1) throw InvalidArgument("semantic_gap: bins must be >= 1");

    std::vector<double> user_norms = row_norms(users);
    std::vector<double> item_norms = row_norms(items);

    GapStats stats;
    stats.bins = bins;
    stats.user_mean_norm = mean(user_norms);
    stats.item_mean_norm = mean(item_norms);
    stats.abs_mean_diff = std::abs(stats.user_mean_norm - stats.item_mean_norm);
    double mx = 0.0;
    for (double x : user_norms) mx = std::max(mx, x);
    for (double x : item_norms) mx = std::max(mx, x);
    stats.range_max = mx;
    stats.user_density = histogram_density(user_norms, mx, bins);
    stats.item_density = histogram_density(item_norms, mx, bins);
    return stats;
}

std::string serialize_gap_stats(const GapStats& stats) {
    std::ostringstream out;
    out << "user_mean_norm=" << fmt_double(stats.user_mean_norm) << '\n';
    out << "item_mean_norm=" << fmt_double(stats.item_mean_norm) << '\n';
    out << "abs_mean_diff=" << fmt_double(stats.abs_mean_diff) << '\n';
    out << "bins=" << stats.bins << '\n';
    out << "range_max=" << fmt_double(stats.range_max) << '\n';
    out << "bin_left,bin_right,user_density,item_density\n";
    for (std::size_t b = 0; b < stats.bins; ++b) {
        out << fmt_double(stats.bin_left(b)) << ',' << fmt_double(stats.bin_right(b)) << ','
            << fmt_double(stats.user_density[b]) << ',' << fmt_double(stats.item_density[b]) << '\n';
    }
    return std::move(out).str();
}

SparsityBuckets group_by_sparsity(const InteractionGraph& graph,
                                  const std::vector<std::size_t>& edges) {
    if (edges.empty()) throw InvalidArgument("group_by_sparsity: no bucket edges");
    if (edges.front() < 1) throw InvalidArgument("group_by_sparsity: first edge must be >= 1");
    for (std::size_t j = 1; j < edges.size(); ++j) {
        if (edges[j] <= edges[j - 1]) {
            throw InvalidArgument("group_by_sparsity: edges must be strictly ascending");
        }
    }
    SparsityBuckets buckets;
    buckets.bucket_edges = edges;
    buckets.membership.assign(graph.num_users, -1);
    for (std::size_t u = 0; u < graph.num_users; ++u) {
        std::size_t deg = graph.user_degree[u];
        if (deg < edges.front()) continue;
        // Last j with edges[j] <= deg; the final bucket has no upper edge.
        std::size_t j = static_cast<std::size_t>(
            std::upper_bound(edges.begin(), edges.end(), deg) - edges.begin()) - 1;
        buckets.membership[u] = static_cast<int>(j);
    }
    return buckets;
}

}
