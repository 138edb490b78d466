#include "cdlsi/descriptor.hpp"

#include <algorithm>
#include <set>

#include "cdlsi/error.hpp"

namespace cdlsi::peer {

double descriptor_cluster_score(const ClusterDescriptor& cluster, const corpus::Query& q) {
  const auto n = static_cast<double>(cluster.doc_count);
  double score = 0.0;
  for (const auto& [t, qt] : q.weights) {
    if (auto w = cluster.centroid.find(t)) {
      score += term_contribution(n, *w, qt);
      continue;
    }
    for (const auto& rho : cluster.rho) {
      if (auto w = rho.find(t)) {
        score += term_contribution(n, *w, qt);
        break;
      }
    }
  }
  return score;
}

void validate(const PeerDescriptor& d) {
  if (d.version != kDescriptorVersion) {
    throw ValidationError("descriptor " + d.peer_id + ": unsupported version " + std::to_string(d.version));
  }
  if (d.peer_id.empty()) throw ValidationError("descriptor: empty peer id");
  const std::size_t k = d.clusters.size();
  for (std::size_t i = 0; i < k; ++i) {
    const auto& c = d.clusters[i];
    const std::string where = "descriptor " + d.peer_id + " cluster " + std::to_string(i);
    if (c.doc_count == 0) throw ValidationError(where + ": zero documents");
    if (c.relevant.size() != c.rho.size()) {
      throw ValidationError(where + ": " + std::to_string(c.rho.size()) + " rho vectors for " +
                            std::to_string(c.relevant.size()) + " relevant clusters");
    }
    std::set<std::size_t> seen;
    for (std::size_t r = 0; r < c.relevant.size(); ++r) {
      const std::size_t src = c.relevant[r];
      if (src >= k || src == i || !seen.insert(src).second) {
        throw ValidationError(where + ": invalid relevant cluster " + std::to_string(src));
      }
      const auto& support = d.clusters[src].centroid;
      for (const auto& e : c.rho[r]) {
        if (!support.contains(e.index)) {
          throw ValidationError(where + ": rho vector " + std::to_string(r) + " holds term " +
                                std::to_string(e.index) + " outside cluster " + std::to_string(src));
        }
      }
    }
  }
}

nlohmann::json sparse_to_json(const SparseVector& v) {
  auto arr = nlohmann::json::array();
  for (const auto& e : v) arr.push_back(nlohmann::json::array({e.index, e.value}));
  return arr;
}

SparseVector sparse_from_json(const nlohmann::json& j) {
  std::vector<SparseEntry> entries;
  entries.reserve(j.size());
  for (const auto& pair : j) {
    if (!pair.is_array() || pair.size() != 2) throw ValidationError("sparse vector: expected [term, weight]");
    entries.push_back({pair[0].get<TermId>(), pair[1].get<double>()});
  }
  try {
    return SparseVector(std::move(entries));
  } catch (const ParameterError& e) {
    throw ValidationError(e.what());
  }
}

nlohmann::json make_envelope(std::string_view strategy, const std::string& peer_id) {
  return {{"format", kDescriptorFormat}, {"version", kDescriptorVersion}, {"strategy", strategy}, {"peer_id", peer_id}};
}

std::string check_envelope(const nlohmann::json& j) {
  if (!j.is_object() || j.value("format", "") != kDescriptorFormat) {
    throw ValidationError("descriptor: not a " + std::string(kDescriptorFormat) + " record");
  }
  const auto version = j.value("version", 0U);
  if (version != kDescriptorVersion) {
    throw ValidationError("descriptor: unsupported version " + std::to_string(version));
  }
  return j.value("strategy", "");
}

nlohmann::json to_json(const PeerDescriptor& d) {
  auto j = make_envelope("cdlsi", d.peer_id);
  j["version"] = d.version;
  auto clusters = nlohmann::json::array();
  for (const auto& c : d.clusters) {
    auto rho = nlohmann::json::array();
    for (const auto& r : c.rho) rho.push_back(sparse_to_json(r));
    clusters.push_back({{"n", c.doc_count},
                        {"centroid", sparse_to_json(c.centroid)},
                        {"relevant", c.relevant},
                        {"rho", std::move(rho)}});
  }
  j["clusters"] = std::move(clusters);
  return j;
}

PeerDescriptor peer_descriptor_from_json(const nlohmann::json& j) {
  if (check_envelope(j) != "cdlsi") throw ValidationError("descriptor: strategy is not cdlsi");
  PeerDescriptor d;
  try {
    d.peer_id = j.at("peer_id").get<std::string>();
    d.version = j.at("version").get<std::uint32_t>();
    for (const auto& c : j.at("clusters")) {
      ClusterDescriptor cd;
      cd.doc_count = c.at("n").get<std::size_t>();
      cd.centroid = sparse_from_json(c.at("centroid"));
      cd.relevant = c.at("relevant").get<std::vector<std::size_t>>();
      for (const auto& r : c.at("rho")) cd.rho.push_back(sparse_from_json(r));
      d.clusters.push_back(std::move(cd));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("descriptor: ") + e.what());
  }
  validate(d);
  return d;
}

std::string serialize(const PeerDescriptor& d) { return to_json(d).dump(); }

PeerDescriptor deserialize_peer_descriptor(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("descriptor: ") + e.what());
  }
  return peer_descriptor_from_json(j);
}

}  // namespace cdlsi::peer
