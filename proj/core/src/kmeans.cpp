#include "corpusforge/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <nlohmann/json.hpp>

#include "corpusforge/csv.hpp"
#include "corpusforge/embedding_io.hpp"
#include "corpusforge/error.hpp"
#include "corpusforge/rng.hpp"

namespace corpusforge {

using json = nlohmann::json;

namespace {

double sq_dist(const double* a, const double* b, std::size_t dim) {
  double acc = 0.0;
  for (std::size_t i = 0; i < dim; ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

// Nearest centroid per row; fills labels and squared distances.
void assign_rows(const FeatureMatrix& X, const std::vector<double>& centroids, std::size_t k,
                 std::vector<std::uint32_t>& labels, std::vector<double>& dists) {
  const std::size_t n = X.rows();
  const std::size_t dim = X.dim;
  labels.resize(n);
  dists.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = X.row(i);
    std::uint32_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < k; ++c) {
      const double d = sq_dist(row, centroids.data() + c * dim, dim);
      if (d < best_d) {  // strict: ties stay with the lowest index
        best_d = d;
        best = static_cast<std::uint32_t>(c);
      }
    }
    labels[i] = best;
    dists[i] = best_d;
  }
}

struct LloydResult {
  std::vector<double> centroids;
  std::vector<std::uint32_t> labels;
  double inertia = 0.0;
  std::size_t iterations = 0;
  std::vector<double> history;
};

LloydResult lloyd(const FeatureMatrix& X, std::size_t k, std::uint64_t init_seed,
                  std::size_t max_iterations, double rel_tolerance) {
  const std::size_t n = X.rows();
  const std::size_t dim = X.dim;
  LloydResult res;
  res.centroids = kmeanspp_init(X, k, init_seed);

  std::vector<std::uint32_t> labels;
  std::vector<double> dists;
  std::vector<std::size_t> sizes(k);
  std::vector<std::uint32_t> prev_labels;
  double prev_inertia = std::numeric_limits<double>::infinity();

  for (std::size_t iter = 0; iter < std::max<std::size_t>(1, max_iterations); ++iter) {
    assign_rows(X, res.centroids, k, labels, dists);

    std::fill(sizes.begin(), sizes.end(), 0);
    for (const auto l : labels) ++sizes[l];

    // Reseed empty clusters to the point farthest from its assigned centroid.
    for (std::size_t e = 0; e < k; ++e) {
      if (sizes[e] != 0) continue;
      std::size_t far = n;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (sizes[labels[i]] <= 1) continue;  // do not empty another cluster
        if (dists[i] > far_d) {
          far_d = dists[i];
          far = i;
        }
      }
      if (far == n) break;  // n == k with all singletons; nothing to move
      --sizes[labels[far]];
      labels[far] = static_cast<std::uint32_t>(e);
      sizes[e] = 1;
      std::copy(X.row(far), X.row(far) + dim, res.centroids.begin() + e * dim);
      dists[far] = 0.0;
    }

    double inertia = 0.0;
    for (const double d : dists) inertia += d;
    res.history.push_back(inertia);
    res.iterations = iter + 1;

    const bool stable = !prev_labels.empty() && prev_labels == labels;
    const bool converged =
        prev_inertia != std::numeric_limits<double>::infinity() &&
        (prev_inertia == 0.0 || (prev_inertia - inertia) < rel_tolerance * prev_inertia);
    res.inertia = inertia;
    if (stable || converged || iter + 1 == std::max<std::size_t>(1, max_iterations)) {
      res.labels = labels;
      break;
    }
    prev_inertia = inertia;
    prev_labels = labels;

    // Means, accumulated in row order so the reduction is deterministic.
    std::fill(res.centroids.begin(), res.centroids.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double* c = res.centroids.data() + static_cast<std::size_t>(labels[i]) * dim;
      const double* row = X.row(i);
      for (std::size_t d = 0; d < dim; ++d) c[d] += row[d];
    }
    for (std::size_t c = 0; c < k; ++c) {
      const double inv = 1.0 / static_cast<double>(sizes[c]);
      double* ptr = res.centroids.data() + c * dim;
      for (std::size_t d = 0; d < dim; ++d) ptr[d] *= inv;
    }
  }
  return res;
}

}  // namespace

std::vector<double> kmeanspp_init(const FeatureMatrix& X, std::size_t k, std::uint64_t seed) {
  const std::size_t n = X.rows();
  const std::size_t dim = X.dim;
  if (k == 0) throw ValidationError("kmeans: k must be positive");
  if (k > n)
    throw ValidationError("kmeans: k=" + std::to_string(k) + " exceeds " + std::to_string(n) +
                          " data rows");

  auto g = make_engine(seed);
  std::vector<double> centroids(k * dim);
  std::vector<bool> chosen(n, false);

  const std::size_t first = static_cast<std::size_t>(uniform_index(g, n));
  std::copy(X.row(first), X.row(first) + dim, centroids.begin());
  chosen[first] = true;

  std::vector<double> best_d(n);
  for (std::size_t i = 0; i < n; ++i) best_d[i] = sq_dist(X.row(i), centroids.data(), dim);

  for (std::size_t c = 1; c < k; ++c) {
    double total = 0.0;
    for (const double d : best_d) total += d;

    std::size_t pick;
    if (total <= 0.0) {
      // All remaining points coincide with chosen centroids.
      pick = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (!chosen[i]) {
          pick = i;
          break;
        }
      }
      if (pick == n) throw ValidationError("kmeans: fewer distinct rows than k");
    } else {
      const double u = uniform_unit(g) * total;
      double cum = 0.0;
      pick = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        cum += best_d[i];
        if (u < cum) {
          pick = i;
          break;
        }
      }
    }

    std::copy(X.row(pick), X.row(pick) + dim, centroids.begin() + c * dim);
    chosen[pick] = true;
    for (std::size_t i = 0; i < n; ++i)
      best_d[i] = std::min(best_d[i], sq_dist(X.row(i), centroids.data() + c * dim, dim));
  }
  return centroids;
}

std::pair<KMeansModel, ClusterAssignment> kmeans_fit(const FeatureMatrix& X,
                                                     const KMeansConfig& config) {
  X.validate();
  if (config.n_restarts == 0) throw ValidationError("kmeans: n_restarts must be positive");

  LloydResult best;
  bool have_best = false;
  for (std::size_t r = 0; r < config.n_restarts; ++r) {
    LloydResult run = lloyd(X, config.k, derive_seed(config.seed, static_cast<std::uint64_t>(r)),
                            config.max_iterations, config.rel_tolerance);
    if (!have_best || run.inertia < best.inertia) {
      best = std::move(run);
      have_best = true;
    }
  }

  KMeansModel model;
  model.k = config.k;
  model.dim = X.dim;
  model.centroids = std::move(best.centroids);
  model.inertia = best.inertia;
  model.iterations_run = best.iterations;
  model.inertia_history = std::move(best.history);
  model.config = config;

  ClusterAssignment assignment;
  assignment.ids = X.ids;
  assignment.labels = std::move(best.labels);
  return {std::move(model), std::move(assignment)};
}

ClusterAssignment assign_clusters(const KMeansModel& model, const FeatureMatrix& X) {
  if (X.dim != model.dim)
    throw ValidationError("assign: feature dim " + std::to_string(X.dim) +
                          " does not match centroid dim " + std::to_string(model.dim));
  ClusterAssignment assignment;
  assignment.ids = X.ids;
  std::vector<double> dists;
  assign_rows(X, model.centroids, model.k, assignment.labels, dists);
  return assignment;
}

std::vector<std::size_t> cluster_sizes(const ClusterAssignment& assignment, std::size_t k) {
  std::vector<std::size_t> sizes(k, 0);
  for (const auto l : assignment.labels) {
    if (l >= k) throw ValidationError("cluster_sizes: label out of range");
    ++sizes[l];
  }
  return sizes;
}

void save_kmeans_model(const KMeansModel& model, const std::string& json_path,
                       const std::string& centroids_path) {
  json header;
  header["k"] = model.k;
  header["dim"] = model.dim;
  header["inertia"] = model.inertia;
  header["iterations_run"] = model.iterations_run;
  header["seed"] = model.config.seed;
  header["config"] = {{"k", model.config.k},
                      {"seed", model.config.seed},
                      {"max_iterations", model.config.max_iterations},
                      {"rel_tolerance", model.config.rel_tolerance},
                      {"n_restarts", model.config.n_restarts}};
  std::ofstream out(json_path, std::ios::trunc);
  if (!out) throw Error(json_path + ": cannot open for writing");
  out << header.dump() << '\n';
  if (!out) throw Error(json_path + ": write failed");

  FeatureMatrix centroids;
  centroids.dim = model.dim;
  centroids.data = model.centroids;
  centroids.ids.reserve(model.k);
  for (std::size_t c = 0; c < model.k; ++c) centroids.ids.push_back("centroid_" + std::to_string(c));
  write_embedding_matrix(centroids, centroids_path);
}

KMeansModel load_kmeans_model(const std::string& json_path, const std::string& centroids_path) {
  std::ifstream in(json_path);
  if (!in) throw ValidationError(json_path + ": cannot open");
  json header;
  try {
    in >> header;
  } catch (const json::exception& e) {
    throw ValidationError(json_path + ": " + e.what());
  }
  KMeansModel model;
  model.k = header.at("k").get<std::size_t>();
  model.dim = header.at("dim").get<std::size_t>();
  model.inertia = header.at("inertia").get<double>();
  model.iterations_run = header.value("iterations_run", std::size_t{0});
  if (header.contains("config")) {
    const json& c = header["config"];
    model.config.k = c.value("k", model.k);
    model.config.seed = c.value("seed", std::uint64_t{0});
    model.config.max_iterations = c.value("max_iterations", std::size_t{300});
    model.config.rel_tolerance = c.value("rel_tolerance", 1e-6);
    model.config.n_restarts = c.value("n_restarts", std::size_t{1});
  }

  const FeatureMatrix centroids = load_embedding_matrix(centroids_path, model.dim);
  if (centroids.rows() != model.k)
    throw ValidationError(centroids_path + ": centroid count does not match header k");
  model.centroids = centroids.data;
  return model;
}

void save_assignment(const ClusterAssignment& assignment, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(path + ": cannot open for writing");
  out << "id,label\n";
  for (std::size_t i = 0; i < assignment.ids.size(); ++i)
    out << csv_escape(assignment.ids[i]) << ',' << assignment.labels[i] << '\n';
  if (!out) throw Error(path + ": write failed");
}

ClusterAssignment load_assignment(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(path + ": cannot open");
  CsvReader reader(in);
  std::vector<std::string> row;
  if (!reader.next_row(row) || row.size() != 2 || row[0] != "id" || row[1] != "label")
    throw ValidationError(path + ": expected 'id,label' header");
  ClusterAssignment assignment;
  while (reader.next_row(row)) {
    if (row.size() != 2) throw ValidationError(path + ": malformed assignment row");
    assignment.ids.push_back(row[0]);
    assignment.labels.push_back(static_cast<std::uint32_t>(std::stoul(row[1])));
  }
  return assignment;
}

}  // namespace corpusforge
