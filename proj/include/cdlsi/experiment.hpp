#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cdlsi/corpus.hpp"
#include "cdlsi/metrics.hpp"
#include "cdlsi/peer_index.hpp"

namespace cdlsi::eval {

/// Weighted, normalized documents and vectorized queries over one dictionary.
struct Dataset {
  corpus::TermDictionary dictionary;
  std::vector<double> global_factors;
  std::vector<corpus::WeightedDoc> docs;
  std::vector<corpus::Query> queries;
  corpus::Qrels qrels;
};

[[nodiscard]] Dataset prepare_dataset(std::span<const corpus::RawDoc> docs, std::span<const corpus::RawDoc> queries,
                                      corpus::Qrels qrels);
[[nodiscard]] Dataset synthetic_dataset(const corpus::SyntheticParams& params);

enum class Variant { Cdlsi, CdlsiK, CdlsiNr, Ggloss, IsCluster, Cm1, Cm2 };

[[nodiscard]] std::string_view to_string(Variant v) noexcept;
/// ConfigError for unknown names.
[[nodiscard]] Variant parse_variant(std::string_view name);

/// One point of the parameter grid. Parameters a method does not use are unset.
struct Setting {
  Variant method = Variant::Cdlsi;
  std::optional<std::size_t> clusters;
  std::optional<double> epsilon;
  std::optional<std::size_t> rank;
  std::optional<std::size_t> h;
  std::optional<double> delta;
  std::size_t cast = 1;
  std::size_t top_n = 10;

  /// Canonical text form, e.g. "cdlsi K=20 eps=5 h=10 delta=0.05 G=5 N=10".
  [[nodiscard]] std::string label() const;
  /// Same without the cast number.
  [[nodiscard]] std::string family() const;
  /// 16 hex digits of the FNV-1a hash of `label()`.
  [[nodiscard]] std::string key() const;
};

struct SweepConfig {
  std::vector<Variant> methods{Variant::Cdlsi, Variant::Ggloss};
  std::size_t peers = 50;
  std::vector<std::size_t> clusters{20};
  std::vector<double> epsilons{5.0};
  std::vector<std::size_t> ranks;
  std::vector<std::size_t> hs{10};
  std::vector<double> deltas{0.05};
  std::vector<std::size_t> casts{5, 10};
  std::size_t top_n = 10;
  std::vector<std::uint64_t> seeds{1};
  std::size_t max_iters = clustering::kDefaultMaxIters;
  /// Worker threads for independent sweep cells; 0 picks the hardware count.
  std::size_t threads = 1;
};

struct QueryRow {
  Setting setting;
  std::uint64_t seed = 0;
  std::string query_id;
  double p_at_n = 0.0;
  double ap_at_n = 0.0;
  std::optional<double> recall;
};

struct MetricRow {
  Setting setting;
  std::uint64_t seed = 0;
  double p_at_n = 0.0;
  double ap_at_n = 0.0;
  /// Mean over queries with at least one relevant document.
  std::optional<double> recall;
  std::size_t queries = 0;
  std::size_t recall_queries = 0;
  std::optional<std::string> skipped;
};

/// Seed-averaged results of one setting.
struct SettingSummary {
  Setting setting;
  std::vector<std::uint64_t> seeds;
  double p_at_n = 0.0;
  double ap_at_n = 0.0;
  std::optional<double> recall;
  std::optional<std::string> skipped;
};

struct SweepReport {
  SweepConfig config;
  std::vector<QueryRow> query_rows;
  std::vector<MetricRow> rows;
  std::vector<SettingSummary> summaries;
  /// Per method, the setting family with the highest P@N averaged over casts
  /// and seeds (first in grid order on ties).
  std::vector<std::pair<Variant, std::string>> best;
  /// Best C-DLSI family against the best family of every other method.
  std::vector<CompTable> comparisons;

  [[nodiscard]] const SettingSummary* find(std::string_view family, std::size_t cast) const;
};

using DatasetSource = std::function<Dataset(std::uint64_t seed)>;

/// ConfigError for an empty or invalid grid.
void validate(const SweepConfig& config);

[[nodiscard]] SweepReport run_sweep(const SweepConfig& config, const DatasetSource& source);

/// Columns: method,K,epsilon,k,h,delta,G,N,seed,query_id,p_at_n,ap_at_n,recall.
void write_query_csv(std::ostream& out, const SweepReport& report);
[[nodiscard]] nlohmann::json report_json(const SweepReport& report);
[[nodiscard]] nlohmann::json config_json(const SweepConfig& config);

struct UpdateConfig {
  std::size_t peers = 50;
  peer::IndexParams index;
  std::size_t h = 10;
  std::size_t cast = 10;
  std::size_t top_n = 10;
  double initial_fraction = 0.7;
  double step_fraction = 0.05;
  /// Per-cluster folded / base ratio above which a cluster is rebuilt.
  double rebuild_fraction = 0.1;
  std::vector<std::uint64_t> seeds{1};
};

struct UpdatePoint {
  std::uint64_t seed = 0;
  bool rebuild = false;
  std::size_t step = 0;
  std::size_t indexed_docs = 0;
  double p_at_n = 0.0;
  double ap_at_n = 0.0;
  std::size_t folded = 0;
  std::size_t rebuilt_clusters = 0;
};

struct UpdateReport {
  UpdateConfig config;
  std::vector<UpdatePoint> points;
};

/// ceil((1 - initial) / step).
[[nodiscard]] std::size_t update_step_count(double initial_fraction, double step_fraction);

/// Indexes the initial share of every peer's documents, then folds in the
/// rest in steps, measuring after each step once with the rebuild trigger
/// and once without.
[[nodiscard]] UpdateReport run_update_study(const UpdateConfig& config, const DatasetSource& source);

void write_update_csv(std::ostream& out, const UpdateReport& report);

/// Columns: peer_id,cluster,term_id,term,weight (LSI centroid weights).
void write_cluster_terms(std::ostream& out, const peer::PeerIndex& index, const corpus::TermDictionary& dictionary);

}  // namespace cdlsi::eval
