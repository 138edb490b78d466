#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cdlsi/corpus.hpp"
#include "cdlsi/sparse.hpp"

namespace cdlsi::peer {

inline constexpr std::uint32_t kDescriptorVersion = 1;
inline constexpr std::string_view kDescriptorFormat = "cdlsi-descriptor";

/// What the broker knows about one cluster: its size, LSI centroid (whose
/// support is the cluster's term set), relevant clusters in order, and the
/// centroid projected into each relevant cluster's space (support = that
/// cluster's term set).
struct ClusterDescriptor {
  std::size_t doc_count = 0;
  SparseVector centroid;
  std::vector<std::size_t> relevant;
  std::vector<SparseVector> rho;

  friend bool operator==(const ClusterDescriptor&, const ClusterDescriptor&) = default;
};

struct PeerDescriptor {
  std::string peer_id;
  std::uint32_t version = kDescriptorVersion;
  std::vector<ClusterDescriptor> clusters;

  friend bool operator==(const PeerDescriptor&, const PeerDescriptor&) = default;
};

/// Accumulates n * w * q_t for one query term. Shared by broker and peer so
/// both sides perform identical floating-point operations.
[[nodiscard]] inline double term_contribution(double doc_count, double weight, double query_weight) noexcept {
  return doc_count * weight * query_weight;
}

/// Broker-side cluster score: centroid weight for terms in the cluster, else
/// the weight in the first rho vector whose support holds the term, else 0.
[[nodiscard]] double descriptor_cluster_score(const ClusterDescriptor& cluster, const corpus::Query& q);

/// Throws ValidationError naming the first violated invariant.
void validate(const PeerDescriptor& descriptor);

/// Sparse vectors as [[term-id, weight], ...].
[[nodiscard]] nlohmann::json sparse_to_json(const SparseVector& v);
[[nodiscard]] SparseVector sparse_from_json(const nlohmann::json& j);

/// Envelope shared by every descriptor strategy.
[[nodiscard]] nlohmann::json make_envelope(std::string_view strategy, const std::string& peer_id);
/// Checks format and version; returns the strategy tag. ValidationError otherwise.
[[nodiscard]] std::string check_envelope(const nlohmann::json& j);

[[nodiscard]] nlohmann::json to_json(const PeerDescriptor& d);
[[nodiscard]] PeerDescriptor peer_descriptor_from_json(const nlohmann::json& j);
[[nodiscard]] std::string serialize(const PeerDescriptor& d);
[[nodiscard]] PeerDescriptor deserialize_peer_descriptor(std::string_view text);

}  // namespace cdlsi::peer
