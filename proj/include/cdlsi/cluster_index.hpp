#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cdlsi/corpus.hpp"
#include "cdlsi/linalg.hpp"
#include "cdlsi/sparse.hpp"

namespace cdlsi::peer {

/// How each cluster's SVD is cut down to its LSI space.
struct Truncation {
  enum class Mode { Threshold, Rank };

  Mode mode = Mode::Threshold;
  double epsilon = 5.0;
  std::size_t rank = 0;

  static Truncation threshold(double epsilon) { return {Mode::Threshold, epsilon, 0}; }
  static Truncation fixed_rank(std::size_t k) { return {Mode::Rank, 0.0, k}; }
};

/// One cluster of a peer: its term set, member documents, truncated LSI space
/// over the term set, and the LSI vectors of its members. All vectors handed
/// out live in the global term-id space and carry the full term set as support.
class ClusterIndex {
 public:
  ClusterIndex() = default;

  /// SVD of the cluster's term-document matrix, truncated per `truncation`.
  /// A single-document cluster keeps its full rank regardless of epsilon.
  /// ParameterError when a fixed rank exceeds the cluster's rank.
  static ClusterIndex build(std::size_t id, std::vector<corpus::WeightedDoc> docs,
                            const Truncation& truncation);

  /// A cluster with a term set and no documents; used to evaluate term-set
  /// similarities in isolation.
  static ClusterIndex from_terms(std::size_t id, std::vector<TermId> terms);

  [[nodiscard]] std::size_t id() const noexcept { return id_; }
  [[nodiscard]] std::span<const TermId> terms() const noexcept { return terms_; }
  [[nodiscard]] bool contains(TermId t) const noexcept;
  /// Position of `t` in the term list, or terms().size() when absent.
  [[nodiscard]] std::size_t local_index(TermId t) const noexcept;

  [[nodiscard]] std::size_t doc_count() const noexcept { return docs_.size(); }
  [[nodiscard]] std::span<const corpus::WeightedDoc> docs() const noexcept { return docs_; }
  [[nodiscard]] std::span<const SparseVector> lsi_docs() const noexcept { return lsi_docs_; }
  [[nodiscard]] const SparseVector& centroid() const noexcept { return centroid_; }
  [[nodiscard]] const linalg::LsiSpace& lsi() const noexcept { return lsi_; }
  [[nodiscard]] std::size_t lsi_rank() const noexcept { return lsi_.k(); }

  /// Documents the SVD was computed from, and documents folded in since.
  [[nodiscard]] std::size_t base_count() const noexcept { return base_count_; }
  [[nodiscard]] std::size_t folded_count() const noexcept { return folded_count_; }

  /// U' U'^T x restricted to this cluster's terms; entries of `x` outside the
  /// term set are ignored.
  [[nodiscard]] SparseVector project(const SparseVector& x) const;
  /// Weight at term `t` (which must be in the term set) of project(x).
  [[nodiscard]] double projected_weight(const SparseVector& x, TermId t) const;

  /// Term-similarity matrix U' U'^T restricted to `subset` (a sorted subset
  /// of the term set).
  [[nodiscard]] linalg::DenseMatrix term_similarity(std::span<const TermId> subset) const;

  /// Appends a document projected with the current space. Returns its LSI vector.
  const SparseVector& fold_in(corpus::WeightedDoc doc);

 private:
  [[nodiscard]] std::vector<double> coordinates(const SparseVector& x) const;
  [[nodiscard]] double row_value(std::size_t local, std::span<const double> coords) const;
  [[nodiscard]] SparseVector embed(std::span<const double> local) const;
  void refresh_centroid();

  std::size_t id_ = 0;
  std::vector<TermId> terms_;
  std::vector<corpus::WeightedDoc> docs_;
  std::vector<SparseVector> lsi_docs_;
  std::vector<double> lsi_sum_;
  SparseVector centroid_;
  linalg::LsiSpace lsi_;
  std::size_t base_count_ = 0;
  std::size_t folded_count_ = 0;
};

}  // namespace cdlsi::peer
