#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "cdlsi/cluster_index.hpp"
#include "cdlsi/linalg.hpp"

namespace cdlsi::peer {

/// Minimal number of intermediate clusters linking two clusters through
/// shared terms. Only direct links and single intermediates are tracked.
enum class Proximity { Direct = 0, OneHop = 1, Unreachable = 2 };

struct PairSimilarity {
  Proximity proximity = Proximity::Unreachable;
  double s1 = 0.0;
  double s2 = 0.0;
  /// s1 * s2
  double s = 0.0;
};

/// |mean((x - mean x) / F_x * (y - mean y) / F_y)| with F the mean of squares.
/// A zero F (all-zero matrix) or a constant matrix yields 0.
/// DimensionError when the shapes differ or are empty.
[[nodiscard]] double matrix_correlation(const linalg::DenseMatrix& x, const linalg::DenseMatrix& y);

/// Size of the intersection of two sorted term lists.
[[nodiscard]] std::size_t shared_term_count(std::span<const TermId> a, std::span<const TermId> b) noexcept;
[[nodiscard]] std::vector<TermId> shared_terms(std::span<const TermId> a, std::span<const TermId> b);

/// Proximity of clusters `i` and `j` within `clusters` (indexed by position).
[[nodiscard]] Proximity proximity(std::span<const ClusterIndex> clusters, std::size_t i, std::size_t j);

/// Shared-vocabulary similarity of clusters `i` and `j` of one peer.
[[nodiscard]] double s1_similarity(std::span<const ClusterIndex> clusters, std::size_t i, std::size_t j);

/// Term-similarity-matrix correlation of clusters `i` and `j` of one peer.
[[nodiscard]] double s2_similarity(std::span<const ClusterIndex> clusters, std::size_t i, std::size_t j);

/// Symmetric table of paired similarities among the clusters of one peer.
class SimilarityNetwork {
 public:
  SimilarityNetwork() = default;
  /// Evaluates every pair.
  static SimilarityNetwork compute(std::span<const ClusterIndex> clusters);
  /// Every pair unreachable (no relations).
  static SimilarityNetwork empty(std::size_t cluster_count);

  /// Re-evaluates the pairs whose value can depend on the `changed` clusters:
  /// pairs containing one of them and pairs without a direct link.
  void update(std::span<const ClusterIndex> clusters, std::span<const std::size_t> changed);

  [[nodiscard]] std::size_t size() const noexcept { return n_; }
  /// For i == j returns a unit self-similarity with direct proximity.
  [[nodiscard]] const PairSimilarity& at(std::size_t i, std::size_t j) const;

  /// Clusters j != i with S(i, j) > delta, by S descending then id ascending.
  [[nodiscard]] std::vector<std::size_t> relevant_clusters(std::size_t i, double delta) const;

 private:
  void evaluate_pair(std::size_t i, std::size_t j);
  void refresh_direct(std::span<const ClusterIndex> clusters, std::size_t i, std::size_t j);

  std::size_t n_ = 0;
  bool tracked_ = false;
  std::vector<PairSimilarity> pairs_;
  // Direct-link statistics per ordered pair: shared-term count and the
  // correlation of the restricted term-similarity matrices.
  std::vector<std::size_t> shared_;
  std::vector<double> correlation_;
  std::vector<std::size_t> term_counts_;
};

}  // namespace cdlsi::peer
