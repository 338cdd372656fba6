#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "corpusforge/kmeans.hpp"
#include "corpusforge/manifest.hpp"

namespace corpusforge {

enum class BudgetMode { count_fraction, duration_target };

std::string to_string(BudgetMode m);
BudgetMode budget_mode_from_string(const std::string& s);

// Subset size budget. In duration_target mode the target defaults to
// fraction * pool duration and the tolerance to the longest utterance in the
// pool (the tightest bound any greedy prefix rule can guarantee).
struct SelectionBudget {
  BudgetMode mode = BudgetMode::duration_target;
  double fraction = 0.5;
  std::optional<double> target_duration_s;
  std::optional<double> duration_tolerance_s;

  double resolve_target(const Manifest& manifest) const;
  double resolve_tolerance(const Manifest& manifest) const;
  void validate(const Manifest& manifest) const;
};

// Per-cluster sampling quotas: every nonempty cluster contributes at least
// one, the rest is distributed one per cluster per round-robin pass.
struct AllocationPlan {
  std::vector<std::size_t> per_cluster_quota;
  std::size_t total = 0;
};

// Quota 1 to every nonempty cluster (when n < nonempty count, the n largest
// clusters win, ties to the lowest index), then round-robin in ascending
// index order, skipping exhausted clusters, until the quotas sum to n.
AllocationPlan allocate_per_cluster(const std::vector<std::size_t>& cluster_sizes, std::size_t n);

Subset select_all(const Manifest& manifest);

// Uniform sample without replacement. count_fraction: floor(fraction * M)
// records; duration_target: a seeded shuffle taken as a prefix until the
// cumulative duration first reaches the target.
Subset select_random(const Manifest& manifest, const SelectionBudget& budget, std::uint64_t seed);

// Cluster-balanced stratified sampling: quotas from allocate_per_cluster with
// N = floor(fraction * M), a seeded uniform sample of each cluster's quota,
// then a duration-matching correction in duration_target mode. `method` tags
// the subset with the feature kind that produced the clustering.
// Cluster c draws from an engine seeded with derive_seed(seed, c), so a k=1
// clustering reproduces select_random's sample exactly.
Subset select_cluster_balanced(const Manifest& manifest, const ClusterAssignment& assignment,
                               const SelectionBudget& budget, std::uint64_t seed,
                               SelectionMethod method);

// Longest utterances first (ties by id). count_fraction: top floor(fraction*M);
// duration_target: from the top until the cumulative duration first reaches
// the target.
Subset select_length(const Manifest& manifest, const SelectionBudget& budget);

// Longest utterances per cluster: each cluster's records sorted by duration
// descending, then a round-robin over clusters in ascending index order takes
// each cluster's next-longest remaining record until the budget is reached.
Subset select_cluster_longest(const Manifest& manifest, const ClusterAssignment& assignment,
                              const SelectionBudget& budget);

// Post-hoc duration correction toward the budget target: removes selected
// records while the total overshoots (largest removal that does not
// undershoot; the shortest record when every removal would), then adds
// unselected records while it undershoots. Additions follow the strategy's
// internal order: next-longest for length methods, seeded random order
// otherwise. Ends within tolerance, or flags duration_warning on the result
// when the tolerance is infeasibly tight.
Subset match_duration(const Subset& subset, const Manifest& manifest,
                      const SelectionBudget& budget, std::uint64_t seed);

}  // namespace corpusforge
