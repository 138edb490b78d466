#pragma once

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "cdlsi/clustering.hpp"
#include "cdlsi/corpus.hpp"
#include "cdlsi/peer_index.hpp"
#include "cdlsi/ranking.hpp"

namespace cdlsi::baselines {

/// gGloss(0) summary of a whole collection.
struct GglossDescriptor {
  std::string peer_id;
  std::size_t doc_count = 0;
  /// Mean of the raw weighted document vectors.
  SparseVector centroid;

  friend bool operator==(const GglossDescriptor&, const GglossDescriptor&) = default;
};

/// IS-Cluster summary: per cluster, its size and the mean weight of each term
/// over the member documents that contain it.
struct IsClusterDescriptor {
  struct Cluster {
    std::size_t doc_count = 0;
    SparseVector term_weights;

    friend bool operator==(const Cluster&, const Cluster&) = default;
  };

  std::string peer_id;
  std::vector<Cluster> clusters;

  friend bool operator==(const IsClusterDescriptor&, const IsClusterDescriptor&) = default;
};

struct PeerRank {
  std::string peer_id;
  double rank = 0.0;
  /// Clusters contributing to the rank, best first (IS-Cluster only).
  std::vector<std::size_t> clusters;
};

[[nodiscard]] GglossDescriptor make_ggloss_descriptor(std::string peer_id,
                                                      std::span<const corpus::WeightedDoc> docs);

/// n * mu^T q.
[[nodiscard]] double ggloss_score(const GglossDescriptor& d, const corpus::Query& q) noexcept;

/// All peers ordered by rank descending, ties by peer id.
[[nodiscard]] std::vector<PeerRank> ggloss_rank(std::span<const GglossDescriptor> descriptors,
                                                const corpus::Query& q);

/// Builds the IS-Cluster descriptor from a peer's documents and clustering.
[[nodiscard]] IsClusterDescriptor make_iscluster_descriptor(std::string peer_id,
                                                            std::span<const corpus::WeightedDoc> docs,
                                                            const clustering::Clustering& partition);

/// n_l * sum_t wbar_t * q_t.
[[nodiscard]] double iscluster_cluster_score(const IsClusterDescriptor::Cluster& c, const corpus::Query& q) noexcept;

/// Peer rank = sum of its top-h cluster scores. ParameterError when h == 0.
[[nodiscard]] std::vector<PeerRank> iscluster_rank(std::span<const IsClusterDescriptor> descriptors,
                                                   const corpus::Query& q, std::size_t h);

/// Plain inner-product retrieval over raw vectors (positive scores only).
[[nodiscard]] RankedList term_match_retrieve(std::string_view peer_id, std::span<const corpus::WeightedDoc> docs,
                                             const corpus::Query& q, std::size_t top_n);

/// C-DLSI with a fixed LSI rank per cluster instead of a threshold.
[[nodiscard]] peer::IndexParams cdlsi_k_params(peer::IndexParams base, std::size_t k);
/// C-DLSI without cluster relations: every relevant-cluster list is empty.
[[nodiscard]] peer::IndexParams cdlsi_nr_params(peer::IndexParams base);

[[nodiscard]] nlohmann::json to_json(const GglossDescriptor& d);
[[nodiscard]] nlohmann::json to_json(const IsClusterDescriptor& d);
[[nodiscard]] GglossDescriptor ggloss_descriptor_from_json(const nlohmann::json& j);
[[nodiscard]] IsClusterDescriptor iscluster_descriptor_from_json(const nlohmann::json& j);

}  // namespace cdlsi::baselines
