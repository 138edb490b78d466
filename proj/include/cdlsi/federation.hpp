#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cdlsi/baselines.hpp"
#include "cdlsi/corpus.hpp"
#include "cdlsi/descriptor.hpp"
#include "cdlsi/peer_index.hpp"
#include "cdlsi/ranking.hpp"

namespace cdlsi::federation {

enum class Strategy { Cdlsi, Ggloss, IsCluster };

/// End-to-end query methods: peer selection plus the matching local retrieval.
/// Cm1 / Cm2 select with gGloss(0) / IS-Cluster and retrieve with C-DLSI over
/// all clusters of each selected peer.
enum class Method { Cdlsi, Ggloss, IsCluster, Cm1, Cm2 };

[[nodiscard]] std::string_view to_string(Strategy s) noexcept;
[[nodiscard]] std::string_view to_string(Method m) noexcept;
/// ConfigError on unknown names.
[[nodiscard]] Method parse_method(std::string_view name);

using AnyDescriptor = std::variant<peer::PeerDescriptor, baselines::GglossDescriptor, baselines::IsClusterDescriptor>;

[[nodiscard]] Strategy strategy_of(const AnyDescriptor& d) noexcept;
[[nodiscard]] const std::string& peer_id_of(const AnyDescriptor& d) noexcept;
[[nodiscard]] std::string serialize(const AnyDescriptor& d);
/// Dispatches on the envelope's strategy tag; ValidationError / ParseError on bad input.
[[nodiscard]] AnyDescriptor deserialize(std::string_view text);

/// Broker directory: one descriptor per (peer, strategy).
class Directory {
 public:
  /// Validates, then replaces any previous descriptor of the same peer and
  /// strategy. ValidationError with the reason on rejection.
  void publish(AnyDescriptor descriptor);

  [[nodiscard]] const AnyDescriptor* find(std::string_view peer_id, Strategy s) const;
  [[nodiscard]] std::size_t size(Strategy s) const;
  /// Peer ids holding a descriptor of the strategy, ascending.
  [[nodiscard]] std::vector<std::string> peers(Strategy s) const;

  [[nodiscard]] std::vector<peer::PeerDescriptor> cdlsi_descriptors() const;
  [[nodiscard]] std::vector<baselines::GglossDescriptor> ggloss_descriptors() const;
  [[nodiscard]] std::vector<baselines::IsClusterDescriptor> iscluster_descriptors() const;

 private:
  std::map<std::pair<std::string, Strategy>, AnyDescriptor> entries_;
};

struct SelectedPeer {
  std::string peer_id;
  double rank = 0.0;
  /// The h most relevant clusters, best first (empty for gGloss).
  std::vector<std::size_t> clusters;
};

/// Peers in non-increasing rank order, ties by peer id.
struct SelectionResult {
  std::vector<SelectedPeer> peers;

  [[nodiscard]] std::vector<std::string> peer_ids() const;
};

/// Cluster scores of a C-DLSI descriptor, sorted best first (ties: lower id).
[[nodiscard]] std::vector<std::pair<std::size_t, double>> ranked_clusters(const peer::PeerDescriptor& d,
                                                                          const corpus::Query& q);

/// C-DLSI selection: rank = sum of the top-h cluster scores. ParameterError
/// when cast or h is 0. An empty directory gives an empty result.
[[nodiscard]] SelectionResult select_peers(const Directory& dir, const corpus::Query& q, std::size_t cast,
                                           std::size_t h);
[[nodiscard]] SelectionResult select_ggloss(const Directory& dir, const corpus::Query& q, std::size_t cast);
[[nodiscard]] SelectionResult select_iscluster(const Directory& dir, const corpus::Query& q, std::size_t cast,
                                               std::size_t h);

/// Union of per-peer lists ordered by score descending, ties by doc id.
[[nodiscard]] RankedList merge_results(std::span<const RankedList> lists);

/// Which local retrieval a peer runs for a request.
enum class Retrieval { Cdlsi, TermMatch };

struct QueryRequest {
  corpus::Query query;
  Retrieval retrieval = Retrieval::Cdlsi;
  /// Clusters to search for C-DLSI retrieval; empty means every cluster.
  std::vector<std::size_t> clusters;
  std::size_t top_n = 10;
};

/// In-process simulated peer owning a collection and its indexes.
class Peer {
 public:
  Peer(std::string id, std::vector<corpus::WeightedDoc> docs, const peer::IndexParams& params);
  Peer(std::string id, std::vector<corpus::WeightedDoc> docs, const peer::IndexParams& params,
       const clustering::Clustering& partition);
  explicit Peer(peer::PeerIndex index);

  [[nodiscard]] const std::string& id() const noexcept { return index_.peer_id(); }
  [[nodiscard]] const peer::PeerIndex& index() const noexcept { return index_; }
  [[nodiscard]] std::vector<corpus::WeightedDoc> documents() const;

  /// Descriptors for every strategy; clears the C-DLSI staleness flag.
  [[nodiscard]] std::vector<AnyDescriptor> publish();

  [[nodiscard]] RankedList handle(const QueryRequest& request) const;

  peer::UpdateStats fold_in(std::span<const corpus::WeightedDoc> docs) { return index_.fold_in(docs); }
  peer::RebuildReport maybe_rebuild(double fraction) { return index_.maybe_rebuild(fraction); }

 private:
  peer::PeerIndex index_;
};

/// Broker plus peers. Peers are evaluated independently and their results
/// merged deterministically.
class Federation {
 public:
  /// ConfigError when two peers share a peer id or a document id.
  explicit Federation(std::vector<Peer> peers);

  /// Publishes every peer's descriptors to the directory.
  void publish_all();

  [[nodiscard]] const Directory& directory() const noexcept { return directory_; }
  [[nodiscard]] Directory& directory() noexcept { return directory_; }
  [[nodiscard]] std::span<const Peer> peers() const noexcept { return peers_; }
  [[nodiscard]] std::span<Peer> peers() noexcept { return peers_; }
  [[nodiscard]] const Peer& peer(std::string_view id) const;

  [[nodiscard]] SelectionResult select(Method method, const corpus::Query& q, std::size_t cast, std::size_t h) const;

  /// Selection, local retrieval at each selected peer, and merging.
  [[nodiscard]] RankedList query(Method method, const corpus::Query& q, std::size_t cast, std::size_t h,
                                 std::size_t top_n) const;
  /// Retrieval and merging for an existing selection.
  [[nodiscard]] RankedList retrieve(Method method, const corpus::Query& q, const SelectionResult& selection,
                                    std::size_t top_n) const;

 private:
  std::vector<Peer> peers_;
  std::map<std::string, std::size_t, std::less<>> by_id_;
  Directory directory_;
};

/// Assigns documents to `peer_count` peers round-robin in input order.
[[nodiscard]] std::vector<std::vector<corpus::WeightedDoc>> distribute_round_robin(
    std::span<const corpus::WeightedDoc> docs, std::size_t peer_count);

/// Zero-padded peer id, e.g. "p07".
[[nodiscard]] std::string peer_name(std::size_t index, std::size_t peer_count);

}  // namespace cdlsi::federation
