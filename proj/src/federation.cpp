#include "cdlsi/federation.hpp"

#include <algorithm>
#include <set>

#include "cdlsi/error.hpp"

namespace cdlsi::federation {

std::string_view to_string(Strategy s) noexcept {
  switch (s) {
    case Strategy::Cdlsi: return "cdlsi";
    case Strategy::Ggloss: return "ggloss";
    case Strategy::IsCluster: return "iscluster";
  }
  return "unknown";
}

std::string_view to_string(Method m) noexcept {
  switch (m) {
    case Method::Cdlsi: return "cdlsi";
    case Method::Ggloss: return "ggloss";
    case Method::IsCluster: return "iscluster";
    case Method::Cm1: return "cm1";
    case Method::Cm2: return "cm2";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  for (Method m : {Method::Cdlsi, Method::Ggloss, Method::IsCluster, Method::Cm1, Method::Cm2}) {
    if (to_string(m) == name) return m;
  }
  throw ConfigError("unknown method \"" + std::string(name) + "\" (cdlsi, ggloss, iscluster, cm1, cm2)");
}

Strategy strategy_of(const AnyDescriptor& d) noexcept { return static_cast<Strategy>(d.index()); }

const std::string& peer_id_of(const AnyDescriptor& d) noexcept {
  return std::visit([](const auto& x) -> const std::string& { return x.peer_id; }, d);
}

std::string serialize(const AnyDescriptor& d) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, peer::PeerDescriptor>) {
          return peer::to_json(x).dump();
        } else {
          return baselines::to_json(x).dump();
        }
      },
      d);
}

AnyDescriptor deserialize(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("descriptor: ") + e.what());
  }
  const auto strategy = peer::check_envelope(j);
  if (strategy == "cdlsi") return peer::peer_descriptor_from_json(j);
  if (strategy == "ggloss") return baselines::ggloss_descriptor_from_json(j);
  if (strategy == "iscluster") return baselines::iscluster_descriptor_from_json(j);
  throw ValidationError("descriptor: unknown strategy \"" + strategy + "\"");
}

void Directory::publish(AnyDescriptor descriptor) {
  const auto& id = peer_id_of(descriptor);
  if (id.empty()) throw ValidationError("publish: empty peer id");
  if (const auto* d = std::get_if<peer::PeerDescriptor>(&descriptor)) {
    peer::validate(*d);
  } else if (const auto* g = std::get_if<baselines::GglossDescriptor>(&descriptor)) {
    if (g->doc_count == 0) throw ValidationError("publish: ggloss descriptor of " + id + " has no documents");
  } else if (const auto* c = std::get_if<baselines::IsClusterDescriptor>(&descriptor)) {
    if (c->clusters.empty()) throw ValidationError("publish: iscluster descriptor of " + id + " has no clusters");
  }
  const auto key = std::make_pair(id, strategy_of(descriptor));
  entries_.insert_or_assign(key, std::move(descriptor));
}

const AnyDescriptor* Directory::find(std::string_view peer_id, Strategy s) const {
  auto it = entries_.find({std::string(peer_id), s});
  return it == entries_.end() ? nullptr : &it->second;
}

std::size_t Directory::size(Strategy s) const {
  return static_cast<std::size_t>(std::count_if(entries_.begin(), entries_.end(),
                                                [&](const auto& e) { return e.first.second == s; }));
}

std::vector<std::string> Directory::peers(Strategy s) const {
  std::vector<std::string> out;
  for (const auto& [key, d] : entries_) {
    if (key.second == s) out.push_back(key.first);
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

template <typename T>
std::vector<T> collect(const std::map<std::pair<std::string, Strategy>, AnyDescriptor>& entries) {
  std::vector<T> out;
  for (const auto& [key, d] : entries) {
    if (const auto* x = std::get_if<T>(&d)) out.push_back(*x);
  }
  return out;
}

void check_selection_args(std::size_t cast, std::size_t h) {
  if (cast == 0) throw ParameterError("select: cast number must be >= 1");
  if (h == 0) throw ParameterError("select: h must be >= 1");
}

SelectionResult top_peers(std::vector<SelectedPeer> all, std::size_t cast) {
  std::sort(all.begin(), all.end(), [](const SelectedPeer& a, const SelectedPeer& b) {
    if (a.rank != b.rank) return a.rank > b.rank;
    return a.peer_id < b.peer_id;
  });
  if (all.size() > cast) all.resize(cast);
  return {std::move(all)};
}

}  // namespace

std::vector<peer::PeerDescriptor> Directory::cdlsi_descriptors() const { return collect<peer::PeerDescriptor>(entries_); }
std::vector<baselines::GglossDescriptor> Directory::ggloss_descriptors() const {
  return collect<baselines::GglossDescriptor>(entries_);
}
std::vector<baselines::IsClusterDescriptor> Directory::iscluster_descriptors() const {
  return collect<baselines::IsClusterDescriptor>(entries_);
}

std::vector<std::string> SelectionResult::peer_ids() const {
  std::vector<std::string> out;
  out.reserve(peers.size());
  for (const auto& p : peers) out.push_back(p.peer_id);
  return out;
}

std::vector<std::pair<std::size_t, double>> ranked_clusters(const peer::PeerDescriptor& d, const corpus::Query& q) {
  std::vector<std::pair<std::size_t, double>> scores;
  scores.reserve(d.clusters.size());
  for (std::size_t c = 0; c < d.clusters.size(); ++c) {
    scores.emplace_back(c, peer::descriptor_cluster_score(d.clusters[c], q));
  }
  std::stable_sort(scores.begin(), scores.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  return scores;
}

SelectionResult select_peers(const Directory& dir, const corpus::Query& q, std::size_t cast, std::size_t h) {
  check_selection_args(cast, h);
  std::vector<SelectedPeer> all;
  for (const auto& d : dir.cdlsi_descriptors()) {
    const auto scores = ranked_clusters(d, q);
    SelectedPeer p{d.peer_id, 0.0, {}};
    for (std::size_t i = 0; i < std::min(h, scores.size()); ++i) {
      p.rank += scores[i].second;
      p.clusters.push_back(scores[i].first);
    }
    all.push_back(std::move(p));
  }
  return top_peers(std::move(all), cast);
}

SelectionResult select_ggloss(const Directory& dir, const corpus::Query& q, std::size_t cast) {
  check_selection_args(cast, 1);
  std::vector<SelectedPeer> all;
  const auto descriptors = dir.ggloss_descriptors();
  for (auto& r : baselines::ggloss_rank(descriptors, q)) all.push_back({std::move(r.peer_id), r.rank, {}});
  return top_peers(std::move(all), cast);
}

SelectionResult select_iscluster(const Directory& dir, const corpus::Query& q, std::size_t cast, std::size_t h) {
  check_selection_args(cast, h);
  std::vector<SelectedPeer> all;
  const auto descriptors = dir.iscluster_descriptors();
  for (auto& r : baselines::iscluster_rank(descriptors, q, h)) {
    all.push_back({std::move(r.peer_id), r.rank, std::move(r.clusters)});
  }
  return top_peers(std::move(all), cast);
}

RankedList merge_results(std::span<const RankedList> lists) {
  RankedList merged;
  for (const auto& l : lists) merged.insert(merged.end(), l.begin(), l.end());
  sort_ranked(merged);
  return merged;
}

Peer::Peer(std::string id, std::vector<corpus::WeightedDoc> docs, const peer::IndexParams& params)
    : index_(peer::PeerIndex::build(std::move(id), std::move(docs), params)) {}

Peer::Peer(std::string id, std::vector<corpus::WeightedDoc> docs, const peer::IndexParams& params,
           const clustering::Clustering& partition)
    : index_(peer::PeerIndex::build(std::move(id), std::move(docs), params, partition)) {}

Peer::Peer(peer::PeerIndex index) : index_(std::move(index)) {}

std::vector<corpus::WeightedDoc> Peer::documents() const {
  std::vector<corpus::WeightedDoc> out;
  for (const auto& c : index_.clusters()) out.insert(out.end(), c.docs().begin(), c.docs().end());
  return out;
}

std::vector<AnyDescriptor> Peer::publish() {
  std::vector<corpus::WeightedDoc> docs;
  clustering::Clustering membership;
  membership.k = index_.clusters().size();
  for (const auto& c : index_.clusters()) {
    docs.insert(docs.end(), c.docs().begin(), c.docs().end());
    membership.assignment.insert(membership.assignment.end(), c.doc_count(), c.id());
  }
  std::vector<AnyDescriptor> out;
  out.emplace_back(index_.make_descriptor());
  out.emplace_back(baselines::make_ggloss_descriptor(id(), docs));
  out.emplace_back(baselines::make_iscluster_descriptor(id(), docs, membership));
  index_.mark_published();
  return out;
}

RankedList Peer::handle(const QueryRequest& request) const {
  if (request.retrieval == Retrieval::TermMatch) {
    return baselines::term_match_retrieve(id(), documents(), request.query, request.top_n);
  }
  std::vector<std::size_t> clusters = request.clusters;
  if (clusters.empty()) {
    for (std::size_t c = 0; c < index_.clusters().size(); ++c) clusters.push_back(c);
  }
  return index_.local_retrieve(request.query, clusters, request.top_n);
}

Federation::Federation(std::vector<Peer> peers) : peers_(std::move(peers)) {
  std::set<std::string> doc_ids;
  for (std::size_t i = 0; i < peers_.size(); ++i) {
    if (!by_id_.emplace(peers_[i].id(), i).second) throw ConfigError("duplicate peer id " + peers_[i].id());
    for (const auto& c : peers_[i].index().clusters()) {
      for (const auto& d : c.docs()) {
        if (!doc_ids.insert(d.id).second) {
          throw ConfigError("document " + d.id + " is held by more than one peer");
        }
      }
    }
  }
}

void Federation::publish_all() {
  for (auto& p : peers_) {
    for (auto& d : p.publish()) directory_.publish(std::move(d));
  }
}

const Peer& Federation::peer(std::string_view id) const {
  auto it = by_id_.find(id);
  if (it == by_id_.end()) throw ParameterError("unknown peer " + std::string(id));
  return peers_[it->second];
}

SelectionResult Federation::select(Method method, const corpus::Query& q, std::size_t cast, std::size_t h) const {
  switch (method) {
    case Method::Cdlsi: return select_peers(directory_, q, cast, h);
    case Method::Ggloss:
    case Method::Cm1: return select_ggloss(directory_, q, cast);
    case Method::IsCluster:
    case Method::Cm2: return select_iscluster(directory_, q, cast, h);
  }
  throw ParameterError("select: unknown method");
}

RankedList Federation::retrieve(Method method, const corpus::Query& q, const SelectionResult& selection,
                                std::size_t top_n) const {
  std::vector<RankedList> lists;
  lists.reserve(selection.peers.size());
  for (const auto& sel : selection.peers) {
    QueryRequest req;
    req.query = q;
    req.top_n = top_n;
    switch (method) {
      case Method::Cdlsi:
        req.retrieval = Retrieval::Cdlsi;
        req.clusters = sel.clusters;
        break;
      case Method::Cm1:
      case Method::Cm2:
        req.retrieval = Retrieval::Cdlsi;
        break;
      case Method::Ggloss:
      case Method::IsCluster:
        req.retrieval = Retrieval::TermMatch;
        break;
    }
    lists.push_back(peer(sel.peer_id).handle(req));
  }
  return merge_results(lists);
}

RankedList Federation::query(Method method, const corpus::Query& q, std::size_t cast, std::size_t h,
                             std::size_t top_n) const {
  return retrieve(method, q, select(method, q, cast, h), top_n);
}

std::vector<std::vector<corpus::WeightedDoc>> distribute_round_robin(std::span<const corpus::WeightedDoc> docs,
                                                                     std::size_t peer_count) {
  if (peer_count == 0) throw ConfigError("peer count must be >= 1");
  std::vector<std::vector<corpus::WeightedDoc>> out(peer_count);
  for (std::size_t j = 0; j < docs.size(); ++j) out[j % peer_count].push_back(docs[j]);
  return out;
}

std::string peer_name(std::size_t index, std::size_t peer_count) {
  const std::size_t width = std::to_string(peer_count > 0 ? peer_count - 1 : 0).size();
  std::string num = std::to_string(index);
  return "p" + std::string(width > num.size() ? width - num.size() : 0, '0') + num;
}

}  // namespace cdlsi::federation
