#include "cdlsi/metrics.hpp"

#include <algorithm>
#include <set>

#include "cdlsi/error.hpp"

namespace cdlsi::eval {

double precision_at(const RankedList& results, const corpus::Qrels& qrels, const std::string& query_id,
                    std::size_t n) {
  if (n == 0) throw ParameterError("precision_at: n must be >= 1");
  const std::size_t limit = std::min(n, results.size());
  std::size_t hits = 0;
  for (std::size_t i = 0; i < limit; ++i) {
    if (qrels.is_relevant(query_id, results[i].doc_id)) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(n);
}

double avg_precision_at(const RankedList& results, const corpus::Qrels& qrels, const std::string& query_id,
                        std::size_t n) {
  if (n == 0) throw ParameterError("avg_precision_at: n must be >= 1");
  std::size_t hits = 0;
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i < results.size() && qrels.is_relevant(query_id, results[i].doc_id)) ++hits;
    sum += static_cast<double>(hits) / static_cast<double>(i + 1);
  }
  return sum / static_cast<double>(n);
}

DocLocation locate_documents(const federation::Federation& fed) {
  DocLocation where;
  for (const auto& p : fed.peers()) {
    for (const auto& c : p.index().clusters()) {
      for (const auto& d : c.docs()) where.emplace(d.id, p.id());
    }
  }
  return where;
}

std::size_t relevant_in_selection(const federation::SelectionResult& selection, const corpus::Qrels& qrels,
                                  const std::string& query_id, const DocLocation& where) {
  std::set<std::string, std::less<>> chosen;
  for (const auto& p : selection.peers) chosen.insert(p.peer_id);
  std::size_t count = 0;
  for (const auto& doc : qrels.relevant_docs(query_id)) {
    auto it = where.find(doc);
    if (it != where.end() && chosen.contains(it->second)) ++count;
  }
  return count;
}

std::optional<double> selected_peer_recall(const federation::SelectionResult& selection,
                                           const corpus::Qrels& qrels, const std::string& query_id,
                                           const DocLocation& where) {
  const auto relevant = qrels.relevant_docs(query_id);
  if (relevant.empty()) return std::nullopt;
  return static_cast<double>(relevant_in_selection(selection, qrels, query_id, where)) /
         static_cast<double>(relevant.size());
}

CompTable compare(std::string method_a, std::span<const RecallObservation> a, std::string method_b,
                  std::span<const RecallObservation> b) {
  std::map<std::pair<std::size_t, std::string>, std::optional<double>> rhs;
  for (const auto& o : b) rhs[{o.cast, o.query_id}] = o.recall;

  struct Tally {
    std::size_t queries = 0, wins = 0, losses = 0;
  };
  std::map<std::size_t, Tally> tallies;
  for (const auto& o : a) {
    auto it = rhs.find({o.cast, o.query_id});
    if (it == rhs.end()) continue;
    auto& t = tallies[o.cast];
    ++t.queries;
    if (!o.recall || !it->second) continue;
    if (*o.recall > *it->second) ++t.wins;
    if (*o.recall < *it->second) ++t.losses;
  }

  CompTable table{std::move(method_a), std::move(method_b), {}};
  for (const auto& [cast, t] : tallies) {
    const double q = static_cast<double>(t.queries);
    CompTable::Row row{cast, t.queries, 0.0, 0.0, 0.0};
    if (t.queries > 0) {
      row.wins = static_cast<double>(t.wins) / q;
      row.losses = static_cast<double>(t.losses) / q;
      row.ties = static_cast<double>(t.queries - t.wins - t.losses) / q;
    }
    table.rows.push_back(row);
  }
  return table;
}

}  // namespace cdlsi::eval
