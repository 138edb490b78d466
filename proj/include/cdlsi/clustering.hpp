#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cdlsi/corpus.hpp"
#include "cdlsi/sparse.hpp"

namespace cdlsi::clustering {

/// K-way partition of a document list. `assignment[j]` is the cluster of the
/// j-th input document; centroids are the means of the member vectors.
struct Clustering {
  std::size_t k = 0;
  std::vector<std::size_t> assignment;
  std::vector<SparseVector> centroids;
  std::vector<std::size_t> sizes;
  /// sum_i n_i * mu_i^T mu_i for the final partition.
  double objective = 0.0;
  /// Objective after every completed iteration, in order.
  std::vector<double> objective_trace;
  std::size_t iterations = 0;
  bool converged = false;
};

inline constexpr std::size_t kDefaultMaxIters = 100;
inline constexpr std::size_t kDefaultRestarts = 10;

/// Lloyd iterations on the given vectors (callers pass unit vectors), seeded
/// k-means++ initialization. The processing order is derived from a hash of
/// the document ids and the seed, so permuting the input does not change the
/// partition. Each of `restarts` starts gets its own seed derived from `seed`;
/// the partition with the highest objective is returned, along with that
/// start's objective trace. ParameterError when k == 0, docs is empty,
/// k > docs or restarts == 0.
[[nodiscard]] Clustering kmeans(std::span<const corpus::WeightedDoc> docs, std::size_t k,
                                std::uint64_t seed, std::size_t max_iters = kDefaultMaxIters,
                                std::size_t restarts = kDefaultRestarts);

/// sum_i n_i * mu_i^T mu_i for an arbitrary assignment.
[[nodiscard]] double partition_objective(std::span<const corpus::WeightedDoc> docs,
                                         std::span<const std::size_t> assignment, std::size_t k);

struct NearestCluster {
  std::size_t cluster = 0;
  /// Set when the document vector is zero; the cluster is then 0.
  bool zero_vector = false;
};

/// Cluster whose centroid has the largest cosine with `doc`; ties go to the
/// lowest cluster id. ParameterError when the clustering has no clusters.
[[nodiscard]] NearestCluster assign_to_nearest(const SparseVector& doc, const Clustering& clustering);

/// 64-bit FNV-1a, used for seed-stable orderings.
[[nodiscard]] std::uint64_t fnv1a(std::string_view bytes, std::uint64_t basis = 0xcbf29ce484222325ULL) noexcept;

}  // namespace cdlsi::clustering
