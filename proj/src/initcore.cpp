#include "sgur/initcore.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "sgur/error.hpp"
#include "sgur/kernels.hpp"
#include "sgur/parallel.hpp"

namespace sgur {

std::size_t InitConfig::k_for(const std::string& modality) const {
    auto it = k_per_modality.find(modality);
    return it != k_per_modality.end() ? it->second : default_k;
}

void InitConfig::validate() const {
    if (!(lambda >= 0.0 && lambda <= 1.0)) {
        throw InvalidArgument("init: lambda must be in [0, 1]");
    }
    if (seeds.empty()) throw InvalidArgument("init: at least one seed required");
    if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size()) {
        throw InvalidArgument("init: duplicate seeds");
    }
    if (default_k < 1) throw InvalidArgument("init: default k must be >= 1");
    for (const auto& [modality, k] : k_per_modality) {
        if (k < 1) throw InvalidArgument("init: k for '" + modality + "' must be >= 1");
    }
    if (kmeans_max_iters < 1) throw InvalidArgument("init: kmeans max_iters must be >= 1");
    if (!(kmeans_tol >= 0.0)) throw InvalidArgument("init: kmeans tol must be >= 0");
}

namespace {

// ItemDegree-weighted mean over items with degree >= 1, in binary64.
std::vector<double> global_mean_row(const InteractionGraph& graph, const Matrix& items) {
    const auto& kn = kernels::ops();
    std::size_t d = items.cols;
    std::vector<double> acc(d, 0.0);
    std::size_t active = 0;
    for (std::size_t i = 0; i < graph.num_items; ++i) {
        if (graph.item_degree[i] == 0) continue;
        kn.scaled_add_f32_f64(acc.data(), items.row(i), 1.0 / graph.item_degree[i], d);
        ++active;
    }
    if (active > 0) {
        double inv = 1.0 / static_cast<double>(active);
        for (double& v : acc) v *= inv;
    }
    return acc;
}

}

Matrix aggregate(const InteractionGraph& graph, const Matrix& item_matrix,
                 WeightingStrategy weighting, ZeroDegreeFallback fallback) {
    if (item_matrix.rows != graph.num_items) {
        throw DataError("aggregate: item matrix has " + std::to_string(item_matrix.rows) +
                        " rows but graph has " + std::to_string(graph.num_items) + " items");
    }
    const auto& kn = kernels::ops();
    std::size_t d = item_matrix.cols;
    Matrix out(graph.num_users, d);

    std::vector<double> fallback_row(d, 0.0);
    if (fallback == ZeroDegreeFallback::GlobalMean) {
        bool any_zero = std::any_of(graph.user_degree.begin(), graph.user_degree.end(),
                                    [](std::uint32_t deg) { return deg == 0; });
        if (any_zero) fallback_row = global_mean_row(graph, item_matrix);
    }

    parallel_for(0, graph.num_users, [&](std::size_t lo, std::size_t hi) {
        std::vector<double> acc(d);
        for (std::size_t u = lo; u < hi; ++u) {
            float* dst = out.row(u);
            std::uint32_t du = graph.user_degree[u];
            if (du == 0) {
                for (std::size_t j = 0; j < d; ++j) dst[j] = static_cast<float>(fallback_row[j]);
                continue;
            }
            std::fill(acc.begin(), acc.end(), 0.0);
            for (std::uint32_t i : graph.user_adj[u]) {
                double w;
                switch (weighting) {
                    case WeightingStrategy::ItemDegree:
                        w = 1.0 / graph.item_degree[i];
                        break;
                    case WeightingStrategy::BiDegree:
                        w = 1.0 / std::sqrt(static_cast<double>(graph.item_degree[i]) * du);
                        break;
                    default:
                        w = 1.0 / du;
                        break;
                }
                kn.scaled_add_f32_f64(acc.data(), item_matrix.row(i), w, d);
            }
            for (std::size_t j = 0; j < d; ++j) dst[j] = static_cast<float>(acc[j]);
        }
    });
    return out;
}

Matrix fuse(const Matrix& item_level, const Matrix& cluster_level, double lambda) {
    if (!item_level.same_shape(cluster_level)) {
        throw DataError("fuse: shape mismatch");
    }
    if (!(lambda >= 0.0 && lambda <= 1.0)) {
        throw InvalidArgument("fuse: lambda must be in [0, 1]");
    }
    // The endpoints short-circuit so the unused branch cannot leak rounding
    // (or a sign of zero) into the result.
    if (lambda == 0.0) return item_level;
    if (lambda == 1.0) return cluster_level;
    Matrix out(item_level.rows, item_level.cols);
    kernels::ops().axpby_f32(static_cast<float>(1.0 - lambda), item_level.data.data(),
                             static_cast<float>(lambda), cluster_level.data.data(),
                             out.data.data(), out.data.size());
    return out;
}

UserInit init_users(const InteractionGraph& graph,
                    const std::map<std::string, ModalityFeatures>& features,
                    const InitConfig& config, std::uint64_t seed) {
    config.validate();
    if (features.empty()) throw InvalidArgument("init: no modalities");
    UserInit out;
    out.config = config;
    out.seed = seed;
    for (const auto& [modality, feats] : features) {
        if (feats.values.rows != graph.num_items) {
            throw DataError("init: modality '" + modality + "' has " +
                            std::to_string(feats.values.rows) + " rows but graph has " +
                            std::to_string(graph.num_items) + " items");
        }
        Matrix item_level = aggregate(graph, feats.values, config.weighting, config.fallback);
        ClusterModel model = kmeans(feats, config.k_for(modality), seed,
                                    config.kmeans_max_iters, config.kmeans_tol);
        ModalityFeatures aligned = align_to_clusters(feats, model);
        Matrix cluster_level = aggregate(graph, aligned.values, config.weighting, config.fallback);
        out.per_modality.emplace(modality, fuse(item_level, cluster_level, config.lambda));
    }
    return out;
}

std::vector<UserInit> init_users_multiseed(const InteractionGraph& graph,
                                           const std::map<std::string, ModalityFeatures>& features,
                                           const InitConfig& config) {
    config.validate();
    std::vector<UserInit> out;
    out.reserve(config.seeds.size());
    for (std::uint64_t seed : config.seeds) {
        out.push_back(init_users(graph, features, config, seed));
    }
    return out;
}

std::vector<std::filesystem::path> save_user_init(const UserInit& init,
                                                  const std::filesystem::path& dir,
                                                  bool single_seed) {
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> written;
    for (const auto& [modality, matrix] : init.per_modality) {
        std::string name = single_seed
            ? "user_init." + modality + ".sgur"
            : "user_init." + modality + ".seed" + std::to_string(init.seed) + ".sgur";
        std::filesystem::path path = dir / name;
        write_matrix(path, matrix);
        written.push_back(path);
    }
    return written;
}

}
