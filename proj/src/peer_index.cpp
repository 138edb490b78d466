#include "cdlsi/peer_index.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cdlsi/error.hpp"

namespace cdlsi::peer {

namespace {

void check_params(const IndexParams& p, std::size_t doc_count) {
  if (doc_count == 0) throw ParameterError("build_index: no documents");
  if (p.clusters == 0) throw ParameterError("build_index: cluster count must be >= 1");
  if (p.clusters > doc_count) {
    throw ParameterError("build_index: " + std::to_string(p.clusters) + " clusters for " +
                         std::to_string(doc_count) + " documents");
  }
  if (p.truncation.mode == Truncation::Mode::Threshold && !(p.truncation.epsilon >= 0.0)) {
    throw ParameterError("build_index: epsilon must be >= 0");
  }
  if (p.truncation.mode == Truncation::Mode::Rank && p.truncation.rank == 0) {
    throw ParameterError("build_index: rank must be >= 1");
  }
  if (!(p.delta >= 0.0 && p.delta < 1.0)) throw ParameterError("build_index: delta must lie in [0, 1)");
}

SparseVector raw_mean(std::span<const corpus::WeightedDoc> docs) {
  std::vector<SparseEntry> all;
  for (const auto& d : docs) all.insert(all.end(), d.weights.begin(), d.weights.end());
  auto sum = SparseVector::from_unsorted(std::move(all));
  return docs.empty() ? sum : sum.scaled(1.0 / static_cast<double>(docs.size()));
}

nlohmann::json doc_to_json(const corpus::WeightedDoc& d) {
  return {{"id", d.id}, {"weights", sparse_to_json(d.weights)}};
}

corpus::WeightedDoc doc_from_json(const nlohmann::json& j) {
  return {j.at("id").get<std::string>(), sparse_from_json(j.at("weights"))};
}

}  // namespace

PeerIndex PeerIndex::build(std::string peer_id, std::vector<corpus::WeightedDoc> docs,
                           const IndexParams& params) {
  check_params(params, docs.size());
  auto partition = clustering::kmeans(docs, params.clusters, params.seed, params.max_iters);
  return build(std::move(peer_id), std::move(docs), params, partition);
}

PeerIndex PeerIndex::build(std::string peer_id, std::vector<corpus::WeightedDoc> docs,
                           const IndexParams& params, const clustering::Clustering& partition) {
  check_params(params, docs.size());
  if (partition.assignment.size() != docs.size() || partition.k != params.clusters) {
    throw DimensionError("build_index: clustering does not match the documents");
  }
  PeerIndex index;
  index.peer_id_ = std::move(peer_id);
  index.params_ = params;
  index.partition_ = partition;
  std::vector<std::vector<corpus::WeightedDoc>> members(params.clusters);
  for (std::size_t j = 0; j < docs.size(); ++j) members[partition.assignment[j]].push_back(std::move(docs[j]));
  index.index_clusters(std::move(members));
  return index;
}

void PeerIndex::index_clusters(std::vector<std::vector<corpus::WeightedDoc>> members) {
  clusters_.clear();
  clusters_.reserve(members.size());
  for (std::size_t c = 0; c < members.size(); ++c) {
    clusters_.push_back(ClusterIndex::build(c, std::move(members[c]), params_.truncation));
  }
  network_ = params_.use_relations ? SimilarityNetwork::compute(clusters_)
                                   : SimilarityNetwork::empty(clusters_.size());
  refresh_relevant();
  stale_ = true;
}

void PeerIndex::refresh_relevant() {
  relevant_.assign(clusters_.size(), {});
  if (!params_.use_relations) return;
  for (std::size_t i = 0; i < clusters_.size(); ++i) relevant_[i] = network_.relevant_clusters(i, params_.delta);
}

std::size_t PeerIndex::doc_count() const noexcept {
  std::size_t n = 0;
  for (const auto& c : clusters_) n += c.doc_count();
  return n;
}

double PeerIndex::cluster_query_score(std::size_t i, const corpus::Query& q) const {
  const auto& ci = clusters_.at(i);
  const auto n = static_cast<double>(ci.doc_count());
  double score = 0.0;
  for (const auto& [t, qt] : q.weights) {
    if (auto w = ci.centroid().find(t)) {
      score += term_contribution(n, *w, qt);
      continue;
    }
    for (std::size_t m : relevant_[i]) {
      if (clusters_[m].contains(t)) {
        score += term_contribution(n, clusters_[m].projected_weight(ci.centroid(), t), qt);
        break;
      }
    }
  }
  return score;
}

std::vector<double> PeerIndex::cluster_scores(const corpus::Query& q) const {
  std::vector<double> out(clusters_.size());
  for (std::size_t i = 0; i < clusters_.size(); ++i) out[i] = cluster_query_score(i, q);
  return out;
}

double PeerIndex::document_score(std::size_t i, std::size_t doc, const corpus::Query& q) const {
  const auto& ci = clusters_.at(i);
  const auto& lsi = ci.lsi_docs()[doc];
  double score = 0.0;
  for (const auto& [t, qt] : q.weights) {
    if (auto w = lsi.find(t)) {
      score += *w * qt;
      continue;
    }
    for (std::size_t m : relevant_[i]) {
      if (clusters_[m].contains(t)) {
        score += clusters_[m].projected_weight(lsi, t) * qt;
        break;
      }
    }
  }
  return score;
}

RankedList PeerIndex::local_retrieve(const corpus::Query& q, std::span<const std::size_t> cluster_ids,
                                     std::size_t top_n) const {
  if (top_n == 0) throw ParameterError("local_retrieve: top_n must be >= 1");
  std::vector<std::size_t> ids(cluster_ids.begin(), cluster_ids.end());
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  RankedList results;
  for (std::size_t i : ids) {
    if (i >= clusters_.size()) {
      throw ParameterError("local_retrieve: unknown cluster " + std::to_string(i) + " on peer " + peer_id_);
    }
    const auto& ci = clusters_[i];
    for (std::size_t j = 0; j < ci.doc_count(); ++j) {
      const double s = document_score(i, j, q);
      if (s > 0.0) results.push_back({ci.docs()[j].id, s, peer_id_});
    }
  }
  return top_ranked(std::move(results), top_n);
}

PeerDescriptor PeerIndex::make_descriptor() const {
  PeerDescriptor d;
  d.peer_id = peer_id_;
  d.clusters.reserve(clusters_.size());
  for (std::size_t i = 0; i < clusters_.size(); ++i) {
    ClusterDescriptor cd;
    cd.doc_count = clusters_[i].doc_count();
    cd.centroid = clusters_[i].centroid();
    cd.relevant = relevant_[i];
    for (std::size_t m : relevant_[i]) cd.rho.push_back(clusters_[m].project(clusters_[i].centroid()));
    d.clusters.push_back(std::move(cd));
  }
  return d;
}

UpdateStats PeerIndex::fold_in(std::span<const corpus::WeightedDoc> new_docs) {
  UpdateStats stats;
  stats.per_cluster.assign(clusters_.size(), 0);
  for (const auto& doc : new_docs) {
    const auto nearest = clustering::assign_to_nearest(doc.weights, partition_);
    if (nearest.zero_vector) ++stats.zero_vector;
    const auto& lsi = clusters_[nearest.cluster].fold_in(doc);
    if (lsi.squared_norm() == 0.0) ++stats.zero_projection;
    ++stats.folded;
    ++stats.per_cluster[nearest.cluster];
    // Later arrivals are assigned against the grown cluster.
    partition_.centroids[nearest.cluster] = raw_mean(clusters_[nearest.cluster].docs());
    partition_.sizes[nearest.cluster] = clusters_[nearest.cluster].doc_count();
  }
  if (stats.folded > 0) stale_ = true;
  return stats;
}

RebuildReport PeerIndex::maybe_rebuild(double rebuild_fraction) {
  if (!(rebuild_fraction > 0.0)) throw ParameterError("maybe_rebuild: fraction must be > 0");
  RebuildReport report;
  for (std::size_t c = 0; c < clusters_.size(); ++c) {
    const auto& ci = clusters_[c];
    if (ci.folded_count() == 0 || ci.base_count() == 0) continue;
    const double fraction = static_cast<double>(ci.folded_count()) / static_cast<double>(ci.base_count());
    if (fraction > rebuild_fraction) report.rebuilt.push_back(c);
  }
  for (std::size_t c : report.rebuilt) {
    std::vector<corpus::WeightedDoc> docs(clusters_[c].docs().begin(), clusters_[c].docs().end());
    clusters_[c] = ClusterIndex::build(c, std::move(docs), params_.truncation);
  }
  if (!report.rebuilt.empty()) {
    network_.update(clusters_, report.rebuilt);
    refresh_relevant();
    stale_ = true;
  }
  return report;
}

nlohmann::json params_to_json(const IndexParams& p) {
  return {{"clusters", p.clusters},
          {"truncation", p.truncation.mode == Truncation::Mode::Rank ? "rank" : "threshold"},
          {"epsilon", p.truncation.epsilon},
          {"rank", p.truncation.rank},
          {"delta", p.delta},
          {"seed", p.seed},
          {"max_iters", p.max_iters},
          {"use_relations", p.use_relations}};
}

IndexParams params_from_json(const nlohmann::json& j) {
  IndexParams p;
  p.clusters = j.at("clusters").get<std::size_t>();
  const auto mode = j.at("truncation").get<std::string>();
  if (mode == "rank") {
    p.truncation = Truncation::fixed_rank(j.at("rank").get<std::size_t>());
  } else if (mode == "threshold") {
    p.truncation = Truncation::threshold(j.at("epsilon").get<double>());
  } else {
    throw ParseError("index params: unknown truncation \"" + mode + "\"");
  }
  p.delta = j.at("delta").get<double>();
  p.seed = j.at("seed").get<std::uint64_t>();
  p.max_iters = j.at("max_iters").get<std::size_t>();
  p.use_relations = j.at("use_relations").get<bool>();
  return p;
}

nlohmann::json PeerIndex::to_json() const {
  auto clusters = nlohmann::json::array();
  for (const auto& c : clusters_) {
    auto base = nlohmann::json::array();
    auto folded = nlohmann::json::array();
    for (std::size_t j = 0; j < c.doc_count(); ++j) {
      (j < c.base_count() ? base : folded).push_back(doc_to_json(c.docs()[j]));
    }
    clusters.push_back({{"base", std::move(base)}, {"folded", std::move(folded)}});
  }
  auto centroids = nlohmann::json::array();
  for (const auto& c : partition_.centroids) centroids.push_back(sparse_to_json(c));
  return {{"format", "cdlsi-peer-index"},
          {"version", 1},
          {"peer_id", peer_id_},
          {"params", params_to_json(params_)},
          {"partition_centroids", std::move(centroids)},
          {"partition_objective", partition_.objective},
          {"clusters", std::move(clusters)}};
}

PeerIndex PeerIndex::from_json(const nlohmann::json& j) {
  try {
    if (j.value("format", "") != "cdlsi-peer-index" || j.value("version", 0) != 1) {
      throw ParseError("peer index: unrecognized format or version");
    }
    PeerIndex index;
    index.peer_id_ = j.at("peer_id").get<std::string>();
    index.params_ = params_from_json(j.at("params"));
    const auto& clusters = j.at("clusters");
    std::vector<std::vector<corpus::WeightedDoc>> members;
    std::vector<std::vector<corpus::WeightedDoc>> folded;
    for (const auto& c : clusters) {
      auto& base = members.emplace_back();
      for (const auto& d : c.at("base")) base.push_back(doc_from_json(d));
      auto& extra = folded.emplace_back();
      for (const auto& d : c.at("folded")) extra.push_back(doc_from_json(d));
    }
    if (members.size() != index.params_.clusters) throw ParseError("peer index: cluster count mismatch");

    auto& part = index.partition_;
    part.k = members.size();
    part.objective = j.at("partition_objective").get<double>();
    for (const auto& c : j.at("partition_centroids")) part.centroids.push_back(sparse_from_json(c));
    if (part.centroids.size() != part.k) throw ParseError("peer index: centroid count mismatch");
    for (std::size_t c = 0; c < members.size(); ++c) {
      part.sizes.push_back(members[c].size() + folded[c].size());
      part.assignment.insert(part.assignment.end(), members[c].size(), c);
    }
    part.converged = true;

    index.index_clusters(std::move(members));
    for (std::size_t c = 0; c < folded.size(); ++c)
      for (auto& d : folded[c]) index.clusters_[c].fold_in(std::move(d));
    return index;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("peer index: ") + e.what());
  }
}

}  // namespace cdlsi::peer
