#ifndef SGUR_CLUSTER_HPP
#define SGUR_CLUSTER_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sgur/corpus.hpp"
#include "sgur/matrix.hpp"

namespace sgur {

struct ClusterModel {
    std::string modality_id;
    std::size_t k = 0;
    std::uint64_t seed = 0;
    Matrix centroids;                        // k x d
    std::vector<std::uint32_t> assignments;  // one per item, in [0, k)
    double objective = 0.0;                  // sum of squared distances at exit
    std::size_t iterations_run = 0;
    std::vector<double> objective_trace;     // objective after each assignment pass
};

// Lloyd's algorithm seeded with k-means++ from the given seed.
//
// Iteration order: assign every item to its nearest centroid (ties keep the
// lowest centroid index), evaluate the objective, stop if converged, then
// recompute centroids as per-cluster means. On exit the stored assignments
// were computed against the stored centroids, so each item's centroid is a
// nearest one. Convergence: assignments unchanged, or relative objective
// improvement below tol; max_iters caps the number of assignment passes.
//
// Determinism: the assignment pass may run on several threads, but each item
// writes only its own slot and all reductions (objective, centroid sums) run
// sequentially in item-index order in binary64, so results are bitwise
// reproducible for a fixed (features, k, seed, max_iters, tol) regardless of
// the worker count.
//
// Empty clusters are reseeded to the item farthest from its assigned
// centroid, taken only from clusters that still keep at least one item.
ClusterModel kmeans(const ModalityFeatures& features, std::size_t k, std::uint64_t seed,
                    std::size_t max_iters = 300, double tol = 1e-6);

// Replaces each row by the nearest centroid row (same tie rule as kmeans).
ModalityFeatures align_to_clusters(const ModalityFeatures& features, const ClusterModel& model);

// Persists centroids and assignments as matrix tensors plus a small text
// metadata file (k, seed, iterations_run, objective). Round-trips exactly.
void save_cluster_model(const ClusterModel& model, const std::filesystem::path& dir);
ClusterModel load_cluster_model(const std::filesystem::path& dir);

}

#endif
