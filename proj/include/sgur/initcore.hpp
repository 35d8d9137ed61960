#ifndef SGUR_INITCORE_HPP
#define SGUR_INITCORE_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "sgur/cluster.hpp"
#include "sgur/corpus.hpp"
#include "sgur/matrix.hpp"

namespace sgur {

// Weight assigned to item i in user u's aggregated row. None of these
// renormalize to sum to one; the weight sums are part of the definition.
//   ItemDegree: 1 / |N(i)|
//   BiDegree:   1 / sqrt(|N(i)| * |N(u)|)
//   Equal:      1 / |N(u)|
enum class WeightingStrategy { ItemDegree, BiDegree, Equal };

// Row used for users with no interactions. GlobalMean is the ItemDegree-style
// mean over items with degree >= 1: sum_i (1/|N(i)|) e_i / |I'|.
enum class ZeroDegreeFallback { Zeros, GlobalMean };

struct InitConfig {
    std::map<std::string, std::size_t> k_per_modality;  // unlisted modalities use default_k
    std::size_t default_k = 4;
    double lambda = 0.01;
    WeightingStrategy weighting = WeightingStrategy::ItemDegree;
    std::vector<std::uint64_t> seeds{7};
    std::size_t kmeans_max_iters = 300;
    double kmeans_tol = 1e-6;
    ZeroDegreeFallback fallback = ZeroDegreeFallback::GlobalMean;

    std::size_t k_for(const std::string& modality) const;
    void validate() const;
};

struct UserInit {
    std::map<std::string, Matrix> per_modality;  // |U| x d^m each
    InitConfig config;
    std::uint64_t seed = 0;
};

// Weighted sum of interacted item rows per user, accumulated in binary64 in
// ascending item-index order and stored in binary32. Zero-degree users take
// the fallback row. Parallel over users; bitwise reproducible for any worker
// count because each user's row is an independent fixed-order reduction.
Matrix aggregate(const InteractionGraph& graph, const Matrix& item_matrix,
                 WeightingStrategy weighting, ZeroDegreeFallback fallback);

// (1 - lambda) * item_level + lambda * cluster_level, elementwise.
// lambda 0 and 1 return the corresponding input bit for bit.
Matrix fuse(const Matrix& item_level, const Matrix& cluster_level, double lambda);

// Full pipeline for one seed: per modality, aggregate the raw features,
// cluster them, aggregate the cluster-aligned rows with the same weighting,
// and fuse the two branches. Modalities are processed in map (lexicographic)
// order; results do not depend on that order.
UserInit init_users(const InteractionGraph& graph,
                    const std::map<std::string, ModalityFeatures>& features,
                    const InitConfig& config, std::uint64_t seed);

// One UserInit per configured seed, each identical to init_users(seed).
std::vector<UserInit> init_users_multiseed(const InteractionGraph& graph,
                                           const std::map<std::string, ModalityFeatures>& features,
                                           const InitConfig& config);

// Writes one tensor per modality into dir. With a single configured seed the
// file is "user_init.<modality>.sgur"; with several, ".seed<S>" is appended
// before the extension. Returns the paths written.
std::vector<std::filesystem::path> save_user_init(const UserInit& init,
                                                  const std::filesystem::path& dir,
                                                  bool single_seed);

}

#endif
