#include "sgur/cluster.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "sgur/error.hpp"
#include "sgur/kernels.hpp"
#include "sgur/parallel.hpp"
#include "sgur/rng.hpp"

namespace sgur {

namespace {

// Nearest centroid by squared L2; ties keep the lowest index.
std::uint32_t nearest_centroid(const float* x, const Matrix& centroids, float* dist_out) {
    const auto& kn = kernels::ops();
    std::uint32_t best = 0;
    float best_d = kn.sqdist_f32(x, centroids.row(0), centroids.cols);
    for (std::size_t c = 1; c < centroids.rows; ++c) {
        float d = kn.sqdist_f32(x, centroids.row(c), centroids.cols);
        if (d < best_d) {
            best_d = d;
            best = static_cast<std::uint32_t>(c);
        }
    }
    if (dist_out) *dist_out = best_d;
    return best;
}

Matrix seed_centroids(const Matrix& x, std::size_t k, std::mt19937_64& gen) {
    const auto& kn = kernels::ops();
    std::size_t n = x.rows;
    std::size_t d = x.cols;
    Matrix centroids(k, d);

    std::size_t first = static_cast<std::size_t>(uniform_index(gen, n));
    std::copy(x.row(first), x.row(first) + d, centroids.row(0));

    std::vector<float> dist2(n);
    parallel_for(0, n, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            dist2[i] = kn.sqdist_f32(x.row(i), centroids.row(0), d);
        }
    });

    for (std::size_t c = 1; c < k; ++c) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) total += static_cast<double>(dist2[i]);
        std::size_t pick;
        if (total > 0.0) {
            double r = uniform01(gen) * total;
            double cum = 0.0;
            pick = n - 1;
            for (std::size_t i = 0; i < n; ++i) {
                cum += static_cast<double>(dist2[i]);
                if (cum > r) {
                    pick = i;
                    break;
                }
            }
        } else {
            // All remaining mass is zero (duplicated points); fall back to a
            // uniform draw so seeding still terminates deterministically.
            pick = static_cast<std::size_t>(uniform_index(gen, n));
        }
        std::copy(x.row(pick), x.row(pick) + d, centroids.row(c));
        parallel_for(0, n, [&](std::size_t lo, std::size_t hi) {
            for (std::size_t i = lo; i < hi; ++i) {
                float nd = kn.sqdist_f32(x.row(i), centroids.row(c), d);
                if (nd < dist2[i]) dist2[i] = nd;
            }
        });
    }
    return centroids;
}

}

ClusterModel kmeans(const ModalityFeatures& features, std::size_t k, std::uint64_t seed,
                    std::size_t max_iters, double tol) {
    const Matrix& x = features.values;
    std::size_t n = x.rows;
    std::size_t d = x.cols;
    if (k < 1) throw InvalidArgument("kmeans: k must be >= 1");
    if (n == 0) throw InvalidArgument("kmeans: no items");
    if (k > n) throw InvalidArgument("kmeans: k=" + std::to_string(k) + " exceeds " +
                                     std::to_string(n) + " items");
    if (max_iters < 1) throw InvalidArgument("kmeans: max_iters must be >= 1");
    if (!(tol >= 0.0)) throw InvalidArgument("kmeans: tol must be >= 0");

    const auto& kn = kernels::ops();
    std::mt19937_64 gen(seed);

    ClusterModel model;
    model.modality_id = features.modality;
    model.k = k;
    model.seed = seed;
    model.centroids = seed_centroids(x, k, gen);
    model.assignments.assign(n, 0);

    std::vector<float> dist2(n);
    std::vector<std::uint32_t> prev_assign;
    MatrixD sums(k, d);
    std::vector<std::size_t> counts(k);
    double prev_obj = 0.0;

    for (std::size_t iter = 1; iter <= max_iters; ++iter) {
        parallel_for(0, n, [&](std::size_t lo, std::size_t hi) {
            for (std::size_t i = lo; i < hi; ++i) {
                model.assignments[i] = nearest_centroid(x.row(i), model.centroids, &dist2[i]);
            }
        });

        double obj = 0.0;
        for (std::size_t i = 0; i < n; ++i) obj += static_cast<double>(dist2[i]);
        model.objective = obj;
        model.objective_trace.push_back(obj);
        model.iterations_run = iter;

        bool unchanged = (iter > 1 && model.assignments == prev_assign);
        bool small_improvement = false;
        if (iter > 1) {
            double improvement = prev_obj > 0.0 ? (prev_obj - obj) / prev_obj : 0.0;
            small_improvement = improvement < tol;
        }
        if (unchanged || small_improvement) break;
        prev_assign = model.assignments;
        prev_obj = obj;
        if (iter == max_iters) break;

        std::fill(sums.data.begin(), sums.data.end(), 0.0);
        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t i = 0; i < n; ++i) {
            std::uint32_t a = model.assignments[i];
            kn.scaled_add_f32_f64(sums.row(a), x.row(i), 1.0, d);
            ++counts[a];
        }

        // Reseed empty clusters before taking means. Donor items come only
        // from clusters keeping >= 2 members so no new empties appear.
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] != 0) continue;
            std::size_t donor = n;
            float worst = -1.0f;
            for (std::size_t i = 0; i < n; ++i) {
                if (counts[model.assignments[i]] < 2) continue;
                if (dist2[i] > worst) {
                    worst = dist2[i];
                    donor = i;
                }
            }
            if (donor == n) throw Error("kmeans: internal error, no donor for empty cluster");
            std::uint32_t old = model.assignments[donor];
            kn.scaled_add_f32_f64(sums.row(old), x.row(donor), -1.0, d);
            --counts[old];
            model.assignments[donor] = static_cast<std::uint32_t>(c);
            kn.scaled_add_f32_f64(sums.row(c), x.row(donor), 1.0, d);
            counts[c] = 1;
            dist2[donor] = 0.0f;
        }

        for (std::size_t c = 0; c < k; ++c) {
            double inv = 1.0 / static_cast<double>(counts[c]);
            float* dst = model.centroids.row(c);
            const double* src = sums.row(c);
            for (std::size_t j = 0; j < d; ++j) {
                dst[j] = static_cast<float>(src[j] * inv);
            }
        }
    }
    return model;
}

ModalityFeatures align_to_clusters(const ModalityFeatures& features, const ClusterModel& model) {
    const Matrix& x = features.values;
    if (model.centroids.cols != x.cols) {
        throw DataError("align_to_clusters: dimension mismatch (features " + std::to_string(x.cols) +
                        ", centroids " + std::to_string(model.centroids.cols) + ")");
    }
    if (model.centroids.rows == 0) throw InvalidArgument("align_to_clusters: empty model");
    ModalityFeatures out;
    out.modality = features.modality;
    out.values = Matrix(x.rows, x.cols);
    parallel_for(0, x.rows, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            std::uint32_t c = nearest_centroid(x.row(i), model.centroids, nullptr);
            std::copy(model.centroids.row(c), model.centroids.row(c) + x.cols, out.values.row(i));
        }
    });
    return out;
}

void save_cluster_model(const ClusterModel& model, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    write_matrix(dir / "centroids.sgur", model.centroids);
    Matrix assign(model.assignments.size(), 1);
    for (std::size_t i = 0; i < model.assignments.size(); ++i) {
        assign.data[i] = static_cast<float>(model.assignments[i]);
    }
    write_matrix(dir / "assignments.sgur", assign);
    std::ofstream meta(dir / "meta.txt", std::ios::binary | std::ios::trunc);
    if (!meta) throw IoError("cannot open " + (dir / "meta.txt").string() + " for writing");
    meta << "modality=" << model.modality_id << '\n';
    meta << "k=" << model.k << '\n';
    meta << "seed=" << model.seed << '\n';
    meta << "iterations_run=" << model.iterations_run << '\n';
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", model.objective);
    meta << "objective=" << buf << '\n';
    if (!meta) throw IoError("write failed on " + (dir / "meta.txt").string());
}

ClusterModel load_cluster_model(const std::filesystem::path& dir) {
    ClusterModel model;
    model.centroids = read_matrix(dir / "centroids.sgur");
    Matrix assign = read_matrix(dir / "assignments.sgur");
    if (assign.cols != 1) throw ParseError((dir / "assignments.sgur").string() + ": expected 1 column");
    model.assignments.resize(assign.rows);
    for (std::size_t i = 0; i < assign.rows; ++i) {
        float v = assign.data[i];
        if (v < 0.0f || v != std::floor(v)) {
            throw ParseError((dir / "assignments.sgur").string() + ": non-integral assignment");
        }
        model.assignments[i] = static_cast<std::uint32_t>(v);
    }
    std::ifstream meta(dir / "meta.txt", std::ios::binary);
    if (!meta) throw IoError("cannot open " + (dir / "meta.txt").string());
    std::string line;
    while (std::getline(meta, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::size_t eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        if (key == "modality") model.modality_id = value;
        else if (key == "k") model.k = std::stoull(value);
        else if (key == "seed") model.seed = std::stoull(value);
        else if (key == "iterations_run") model.iterations_run = std::stoull(value);
        else if (key == "objective") model.objective = std::stod(value);
    }
    for (std::uint32_t a : model.assignments) {
        if (a >= model.k) throw ParseError((dir / "assignments.sgur").string() + ": assignment out of range");
    }
    if (model.centroids.rows != model.k) {
        throw ParseError((dir / "centroids.sgur").string() + ": row count disagrees with k");
    }
    return model;
}

}
