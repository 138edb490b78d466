#include "cdlsi/baselines.hpp"

#include <algorithm>
#include <functional>
#include <map>

#include "cdlsi/descriptor.hpp"
#include "cdlsi/error.hpp"

namespace cdlsi::baselines {

namespace {

void sort_ranks(std::vector<PeerRank>& ranks) {
  std::sort(ranks.begin(), ranks.end(), [](const PeerRank& a, const PeerRank& b) {
    if (a.rank != b.rank) return a.rank > b.rank;
    return a.peer_id < b.peer_id;
  });
}

}  // namespace

GglossDescriptor make_ggloss_descriptor(std::string peer_id, std::span<const corpus::WeightedDoc> docs) {
  GglossDescriptor d;
  d.peer_id = std::move(peer_id);
  d.doc_count = docs.size();
  std::vector<SparseEntry> all;
  for (const auto& doc : docs) all.insert(all.end(), doc.weights.begin(), doc.weights.end());
  auto sum = SparseVector::from_unsorted(std::move(all));
  d.centroid = docs.empty() ? sum : sum.scaled(1.0 / static_cast<double>(docs.size()));
  return d;
}

double ggloss_score(const GglossDescriptor& d, const corpus::Query& q) noexcept {
  return static_cast<double>(d.doc_count) * dot(d.centroid, q.weights);
}

std::vector<PeerRank> ggloss_rank(std::span<const GglossDescriptor> descriptors, const corpus::Query& q) {
  std::vector<PeerRank> ranks;
  ranks.reserve(descriptors.size());
  for (const auto& d : descriptors) ranks.push_back({d.peer_id, ggloss_score(d, q), {}});
  sort_ranks(ranks);
  return ranks;
}

IsClusterDescriptor make_iscluster_descriptor(std::string peer_id, std::span<const corpus::WeightedDoc> docs,
                                              const clustering::Clustering& partition) {
  if (partition.assignment.size() != docs.size()) {
    throw DimensionError("iscluster descriptor: clustering does not match the documents");
  }
  IsClusterDescriptor d;
  d.peer_id = std::move(peer_id);
  std::vector<std::map<TermId, std::pair<double, std::size_t>>> stats(partition.k);
  std::vector<std::size_t> sizes(partition.k, 0);
  for (std::size_t j = 0; j < docs.size(); ++j) {
    const std::size_t c = partition.assignment[j];
    ++sizes[c];
    for (const auto& e : docs[j].weights) {
      if (e.value == 0.0) continue;
      auto& [sum, count] = stats[c][e.index];
      sum += e.value;
      ++count;
    }
  }
  for (std::size_t c = 0; c < partition.k; ++c) {
    std::vector<SparseEntry> entries;
    entries.reserve(stats[c].size());
    for (const auto& [t, s] : stats[c]) entries.push_back({t, s.first / static_cast<double>(s.second)});
    d.clusters.push_back({sizes[c], SparseVector(std::move(entries))});
  }
  return d;
}

double iscluster_cluster_score(const IsClusterDescriptor::Cluster& c, const corpus::Query& q) noexcept {
  return static_cast<double>(c.doc_count) * dot(c.term_weights, q.weights);
}

std::vector<PeerRank> iscluster_rank(std::span<const IsClusterDescriptor> descriptors, const corpus::Query& q,
                                     std::size_t h) {
  if (h == 0) throw ParameterError("iscluster_rank: h must be >= 1");
  std::vector<PeerRank> ranks;
  ranks.reserve(descriptors.size());
  for (const auto& d : descriptors) {
    std::vector<std::pair<double, std::size_t>> scores;
    for (std::size_t c = 0; c < d.clusters.size(); ++c) scores.emplace_back(iscluster_cluster_score(d.clusters[c], q), c);
    std::stable_sort(scores.begin(), scores.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    PeerRank r{d.peer_id, 0.0, {}};
    for (std::size_t i = 0; i < std::min(h, scores.size()); ++i) {
      r.rank += scores[i].first;
      r.clusters.push_back(scores[i].second);
    }
    ranks.push_back(std::move(r));
  }
  sort_ranks(ranks);
  return ranks;
}

RankedList term_match_retrieve(std::string_view peer_id, std::span<const corpus::WeightedDoc> docs,
                               const corpus::Query& q, std::size_t top_n) {
  if (top_n == 0) throw ParameterError("term_match_retrieve: top_n must be >= 1");
  RankedList out;
  for (const auto& d : docs) {
    const double s = dot(d.weights, q.weights);
    if (s > 0.0) out.push_back({d.id, s, std::string(peer_id)});
  }
  return top_ranked(std::move(out), top_n);
}

peer::IndexParams cdlsi_k_params(peer::IndexParams base, std::size_t k) {
  base.truncation = peer::Truncation::fixed_rank(k);
  return base;
}

peer::IndexParams cdlsi_nr_params(peer::IndexParams base) {
  base.use_relations = false;
  return base;
}

nlohmann::json to_json(const GglossDescriptor& d) {
  auto j = peer::make_envelope("ggloss", d.peer_id);
  j["n"] = d.doc_count;
  j["centroid"] = peer::sparse_to_json(d.centroid);
  return j;
}

nlohmann::json to_json(const IsClusterDescriptor& d) {
  auto j = peer::make_envelope("iscluster", d.peer_id);
  auto clusters = nlohmann::json::array();
  for (const auto& c : d.clusters) clusters.push_back({{"n", c.doc_count}, {"weights", peer::sparse_to_json(c.term_weights)}});
  j["clusters"] = std::move(clusters);
  return j;
}

GglossDescriptor ggloss_descriptor_from_json(const nlohmann::json& j) {
  if (peer::check_envelope(j) != "ggloss") throw ValidationError("descriptor: strategy is not ggloss");
  try {
    return {j.at("peer_id").get<std::string>(), j.at("n").get<std::size_t>(), peer::sparse_from_json(j.at("centroid"))};
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("ggloss descriptor: ") + e.what());
  }
}

IsClusterDescriptor iscluster_descriptor_from_json(const nlohmann::json& j) {
  if (peer::check_envelope(j) != "iscluster") throw ValidationError("descriptor: strategy is not iscluster");
  try {
    IsClusterDescriptor d;
    d.peer_id = j.at("peer_id").get<std::string>();
    for (const auto& c : j.at("clusters")) {
      d.clusters.push_back({c.at("n").get<std::size_t>(), peer::sparse_from_json(c.at("weights"))});
    }
    return d;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("iscluster descriptor: ") + e.what());
  }
}

}  // namespace cdlsi::baselines
