#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "corpusforge/features.hpp"

namespace corpusforge {

struct KMeansConfig {
  std::size_t k = 150;
  std::uint64_t seed = 0;
  std::size_t max_iterations = 300;
  // Stop when the relative inertia improvement drops below this.
  double rel_tolerance = 1e-6;
  std::size_t n_restarts = 1;
};

struct KMeansModel {
  std::size_t k = 0;
  std::size_t dim = 0;
  std::vector<double> centroids;  // k x dim, row-major
  double inertia = 0.0;
  std::size_t iterations_run = 0;
  // Inertia after each assignment step; non-increasing by construction.
  std::vector<double> inertia_history;
  KMeansConfig config;

  const double* centroid(std::size_t c) const { return centroids.data() + c * dim; }
};

struct ClusterAssignment {
  std::vector<std::string> ids;
  std::vector<std::uint32_t> labels;  // per-id, in [0, k)
};

// D^2 seeding: first centroid uniform over rows, each next row sampled with
// probability proportional to its squared distance to the nearest chosen
// centroid. If every remaining distance is zero (duplicate points), the
// lowest-index unchosen row is taken. Deterministic given seed.
std::vector<double> kmeanspp_init(const FeatureMatrix& X, std::size_t k, std::uint64_t seed);

// Lloyd iterations from a k-means++ start. Assignment breaks ties toward the
// lowest centroid index. An empty cluster is repaired by reseeding its
// centroid to the point farthest from its assigned centroid. With
// n_restarts > 1 the lowest-inertia run wins (restart r is seeded with
// derive_seed(config.seed, r)). Fully deterministic given the config.
std::pair<KMeansModel, ClusterAssignment> kmeans_fit(const FeatureMatrix& X,
                                                     const KMeansConfig& config);

// Nearest centroid per row, ties to the lowest index.
ClusterAssignment assign_clusters(const KMeansModel& model, const FeatureMatrix& X);

std::vector<std::size_t> cluster_sizes(const ClusterAssignment& assignment, std::size_t k);

// jsonl header (k, dim, inertia, seed, config) + centroids in the embedding
// container (f32 on disk).
void save_kmeans_model(const KMeansModel& model, const std::string& json_path,
                       const std::string& centroids_path);
KMeansModel load_kmeans_model(const std::string& json_path, const std::string& centroids_path);

// csv `id,label`.
void save_assignment(const ClusterAssignment& assignment, const std::string& path);
ClusterAssignment load_assignment(const std::string& path);

}  // namespace corpusforge
