#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "cdlsi/cluster_index.hpp"
#include "cdlsi/clustering.hpp"
#include "cdlsi/corpus.hpp"
#include "cdlsi/descriptor.hpp"
#include "cdlsi/ranking.hpp"
#include "cdlsi/similarity.hpp"

namespace cdlsi::peer {

struct IndexParams {
  std::size_t clusters = 20;
  Truncation truncation = Truncation::threshold(5.0);
  /// Relevant-cluster threshold: S(c_i, c_j) must exceed it.
  double delta = 0.05;
  std::uint64_t seed = 1;
  std::size_t max_iters = clustering::kDefaultMaxIters;
  /// When false no similarity network is built and every relevant-cluster
  /// list is empty.
  bool use_relations = true;
};

struct UpdateStats {
  std::size_t folded = 0;
  /// Documents whose LSI vector is zero after projection.
  std::size_t zero_projection = 0;
  /// Zero input vectors (assigned to cluster 0).
  std::size_t zero_vector = 0;
  /// Documents folded into each cluster by this call.
  std::vector<std::size_t> per_cluster;
};

struct RebuildReport {
  std::vector<std::size_t> rebuilt;
};

/// The index of one peer: k-means clusters, per-cluster LSI spaces, the
/// similarity network and the relevant-cluster lists derived from it.
class PeerIndex {
 public:
  PeerIndex() = default;

  /// Clusters `docs` with k-means and indexes every cluster. ParameterError
  /// for empty input, epsilon < 0, delta outside [0, 1) or clusters > docs.
  static PeerIndex build(std::string peer_id, std::vector<corpus::WeightedDoc> docs,
                         const IndexParams& params);

  /// Same as `build` with a precomputed clustering of `docs`.
  static PeerIndex build(std::string peer_id, std::vector<corpus::WeightedDoc> docs,
                         const IndexParams& params, const clustering::Clustering& partition);

  [[nodiscard]] const std::string& peer_id() const noexcept { return peer_id_; }
  [[nodiscard]] const IndexParams& params() const noexcept { return params_; }
  [[nodiscard]] std::span<const ClusterIndex> clusters() const noexcept { return clusters_; }
  [[nodiscard]] const ClusterIndex& cluster(std::size_t i) const { return clusters_.at(i); }
  [[nodiscard]] const clustering::Clustering& partition() const noexcept { return partition_; }
  [[nodiscard]] const SimilarityNetwork& network() const noexcept { return network_; }
  [[nodiscard]] std::span<const std::size_t> relevant(std::size_t i) const { return relevant_.at(i); }
  [[nodiscard]] std::size_t doc_count() const noexcept;

  /// Peer-side cluster score for a query.
  [[nodiscard]] double cluster_query_score(std::size_t cluster, const corpus::Query& q) const;
  [[nodiscard]] std::vector<double> cluster_scores(const corpus::Query& q) const;

  /// Score of member `doc` of `cluster` for the query, through the cluster's
  /// LSI vector and its relevant clusters.
  [[nodiscard]] double document_score(std::size_t cluster, std::size_t doc, const corpus::Query& q) const;

  /// Top `top_n` documents with positive score among the listed clusters,
  /// ties broken by doc id. ParameterError for unknown clusters or top_n == 0.
  [[nodiscard]] RankedList local_retrieve(const corpus::Query& q, std::span<const std::size_t> cluster_ids,
                                          std::size_t top_n) const;

  [[nodiscard]] PeerDescriptor make_descriptor() const;
  [[nodiscard]] bool descriptor_stale() const noexcept { return stale_; }
  void mark_published() noexcept { stale_ = false; }

  /// Projects new documents into the space of their nearest cluster.
  UpdateStats fold_in(std::span<const corpus::WeightedDoc> new_docs);

  /// Recomputes the SVD of every cluster whose folded / base count exceeds
  /// `rebuild_fraction`, then refreshes the affected network pairs and lists.
  RebuildReport maybe_rebuild(double rebuild_fraction);

  [[nodiscard]] nlohmann::json to_json() const;
  [[nodiscard]] static PeerIndex from_json(const nlohmann::json& j);

 private:
  void refresh_relevant();
  void index_clusters(std::vector<std::vector<corpus::WeightedDoc>> members);

  std::string peer_id_;
  IndexParams params_;
  clustering::Clustering partition_;
  std::vector<ClusterIndex> clusters_;
  SimilarityNetwork network_;
  std::vector<std::vector<std::size_t>> relevant_;
  bool stale_ = true;
};

[[nodiscard]] nlohmann::json params_to_json(const IndexParams& p);
[[nodiscard]] IndexParams params_from_json(const nlohmann::json& j);

}  // namespace cdlsi::peer
