#include "cdlsi/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <thread>

#include <fmt/format.h>

#include "cdlsi/baselines.hpp"
#include "cdlsi/clustering.hpp"
#include "cdlsi/error.hpp"
#include "cdlsi/federation.hpp"

namespace cdlsi::eval {

Dataset prepare_dataset(std::span<const corpus::RawDoc> docs, std::span<const corpus::RawDoc> queries,
                        corpus::Qrels qrels) {
  auto weighted = corpus::log_entropy_weights(docs);
  Dataset out;
  out.docs.reserve(weighted.docs.size());
  for (const auto& d : weighted.docs) out.docs.push_back(d.normalized());
  for (const auto& q : queries) {
    out.queries.push_back(corpus::vectorize_query(q.id, q.text, weighted.dictionary, weighted.global_factors));
  }
  out.dictionary = std::move(weighted.dictionary);
  out.global_factors = std::move(weighted.global_factors);
  out.qrels = std::move(qrels);
  return out;
}

Dataset synthetic_dataset(const corpus::SyntheticParams& params) {
  auto synth = corpus::generate_synthetic(params);
  return prepare_dataset(synth.docs, synth.queries, std::move(synth.qrels));
}

std::string_view to_string(Variant v) noexcept {
  switch (v) {
    case Variant::Cdlsi: return "cdlsi";
    case Variant::CdlsiK: return "cdlsi-k";
    case Variant::CdlsiNr: return "cdlsi-nr";
    case Variant::Ggloss: return "ggloss";
    case Variant::IsCluster: return "iscluster";
    case Variant::Cm1: return "cm1";
    case Variant::Cm2: return "cm2";
  }
  return "unknown";
}

Variant parse_variant(std::string_view name) {
  for (Variant v : {Variant::Cdlsi, Variant::CdlsiK, Variant::CdlsiNr, Variant::Ggloss, Variant::IsCluster,
                    Variant::Cm1, Variant::Cm2}) {
    if (to_string(v) == name) return v;
  }
  throw ConfigError("unknown method \"" + std::string(name) +
                    "\" (cdlsi, cdlsi-k, cdlsi-nr, ggloss, iscluster, cm1, cm2)");
}

std::string Setting::family() const {
  std::string s(to_string(method));
  if (clusters) s += fmt::format(" K={}", *clusters);
  if (epsilon) s += fmt::format(" eps={}", *epsilon);
  if (rank) s += fmt::format(" k={}", *rank);
  if (h) s += fmt::format(" h={}", *h);
  if (delta) s += fmt::format(" delta={}", *delta);
  s += fmt::format(" N={}", top_n);
  return s;
}

std::string Setting::label() const { return family() + fmt::format(" G={}", cast); }

std::string Setting::key() const { return fmt::format("{:016x}", clustering::fnv1a(label())); }

const SettingSummary* SweepReport::find(std::string_view family, std::size_t cast) const {
  for (const auto& s : summaries) {
    if (s.setting.cast == cast && s.setting.family() == family) return &s;
  }
  return nullptr;
}

void validate(const SweepConfig& c) {
  if (c.methods.empty()) throw ConfigError("sweep: no methods");
  if (c.peers == 0) throw ConfigError("sweep: peers must be >= 1");
  if (c.casts.empty() || c.seeds.empty()) throw ConfigError("sweep: casts and seeds must be non-empty");
  if (c.top_n == 0) throw ConfigError("sweep: N must be >= 1");
  for (auto g : c.casts) {
    if (g == 0 || g > c.peers) throw ConfigError(fmt::format("sweep: cast {} outside [1, {}]", g, c.peers));
  }
  const auto uses = [&](std::initializer_list<Variant> vs) {
    return std::any_of(c.methods.begin(), c.methods.end(),
                       [&](Variant m) { return std::find(vs.begin(), vs.end(), m) != vs.end(); });
  };
  if (uses({Variant::Cdlsi, Variant::CdlsiK, Variant::CdlsiNr, Variant::IsCluster, Variant::Cm1, Variant::Cm2})) {
    if (c.clusters.empty()) throw ConfigError("sweep: K grid is empty");
    for (auto k : c.clusters) {
      if (k == 0) throw ConfigError("sweep: K must be >= 1");
    }
  }
  if (uses({Variant::Cdlsi, Variant::CdlsiNr, Variant::Cm1, Variant::Cm2})) {
    if (c.epsilons.empty()) throw ConfigError("sweep: epsilon grid is empty");
    for (auto e : c.epsilons) {
      if (!(e >= 0.0) || !std::isfinite(e)) throw ConfigError("sweep: epsilon must be finite and >= 0");
    }
  }
  if (uses({Variant::CdlsiK})) {
    if (c.ranks.empty()) throw ConfigError("sweep: k grid is empty");
    for (auto k : c.ranks) {
      if (k == 0) throw ConfigError("sweep: k must be >= 1");
    }
  }
  if (uses({Variant::Cdlsi, Variant::CdlsiK, Variant::CdlsiNr, Variant::IsCluster, Variant::Cm2})) {
    if (c.hs.empty()) throw ConfigError("sweep: h grid is empty");
    for (auto h : c.hs) {
      if (h == 0) throw ConfigError("sweep: h must be >= 1");
    }
  }
  if (uses({Variant::Cdlsi, Variant::CdlsiK, Variant::Cm1, Variant::Cm2})) {
    if (c.deltas.empty()) throw ConfigError("sweep: delta grid is empty");
    for (auto d : c.deltas) {
      if (!(d >= 0.0 && d < 1.0)) throw ConfigError("sweep: delta must be in [0, 1)");
    }
  }
}

namespace {

using OptSize = std::optional<std::size_t>;
using OptReal = std::optional<double>;

template <typename T>
std::vector<std::optional<T>> axis(bool used, const std::vector<T>& values) {
  if (!used) return {std::nullopt};
  return {values.begin(), values.end()};
}

std::vector<Setting> enumerate_settings(const SweepConfig& c) {
  std::vector<Setting> out;
  for (Variant m : c.methods) {
    const bool clustered = m != Variant::Ggloss;
    const bool eps = m == Variant::Cdlsi || m == Variant::CdlsiNr || m == Variant::Cm1 || m == Variant::Cm2;
    const bool rank = m == Variant::CdlsiK;
    const bool h = m != Variant::Ggloss && m != Variant::Cm1;
    const bool delta = m == Variant::Cdlsi || m == Variant::CdlsiK || m == Variant::Cm1 || m == Variant::Cm2;
    for (OptSize k : axis(clustered, c.clusters)) {
      for (OptReal e : axis(eps, c.epsilons)) {
        for (OptSize r : axis(rank, c.ranks)) {
          for (OptSize hh : axis(h, c.hs)) {
            for (OptReal d : axis(delta, c.deltas)) {
              for (std::size_t g : c.casts) out.push_back({m, k, e, r, hh, d, g, c.top_n});
            }
          }
        }
      }
    }
  }
  return out;
}

federation::Method method_of(Variant v) {
  switch (v) {
    case Variant::Cdlsi:
    case Variant::CdlsiK:
    case Variant::CdlsiNr: return federation::Method::Cdlsi;
    case Variant::Ggloss: return federation::Method::Ggloss;
    case Variant::IsCluster: return federation::Method::IsCluster;
    case Variant::Cm1: return federation::Method::Cm1;
    case Variant::Cm2: return federation::Method::Cm2;
  }
  throw ParameterError("unknown variant");
}

std::uint64_t peer_seed(std::uint64_t seed, std::size_t peer) {
  return clustering::fnv1a(fmt::format("{}:{}", seed, peer));
}

/// Index parameters behind a setting. Baseline-only methods get a rank-0
/// truncation and no network since they never touch the LSI spaces.
peer::IndexParams build_params(const Setting& s, std::uint64_t seed, std::size_t max_iters) {
  peer::IndexParams p;
  p.clusters = s.clusters.value_or(1);
  p.seed = seed;
  p.max_iters = max_iters;
  p.delta = s.delta.value_or(0.0);
  if (s.rank) {
    p.truncation = peer::Truncation::fixed_rank(*s.rank);
  } else if (s.epsilon) {
    p.truncation = peer::Truncation::threshold(*s.epsilon);
  } else {
    p.truncation = peer::Truncation::threshold(std::numeric_limits<double>::max());
  }
  p.use_relations = s.delta.has_value() && s.method != Variant::CdlsiNr;
  return p;
}

std::string build_key(const peer::IndexParams& p) {
  return fmt::format("{}|{}|{}|{}|{}", p.clusters, static_cast<int>(p.truncation.mode), p.truncation.epsilon,
                     p.truncation.rank, p.use_relations ? p.delta : -1.0);
}

struct Job {
  std::uint64_t seed = 0;
  std::size_t seed_index = 0;
  OptSize clusters;
  std::vector<std::size_t> settings;
};

struct JobOutput {
  std::vector<std::vector<QueryRow>> queries;
  std::vector<MetricRow> rows;
};

struct Built {
  std::optional<federation::Federation> fed;
  DocLocation where;
  std::string error;
};

JobOutput run_job(const Job& job, const std::vector<Setting>& settings, const Dataset& data, const SweepConfig& c) {
  JobOutput out;
  const auto shares = federation::distribute_round_robin(data.docs, c.peers);

  std::vector<clustering::Clustering> partitions;
  std::string partition_error;
  try {
    for (std::size_t p = 0; p < shares.size(); ++p) {
      partitions.push_back(clustering::kmeans(shares[p], job.clusters.value_or(1), peer_seed(job.seed, p),
                                              c.max_iters));
    }
  } catch (const ParameterError& e) {
    partition_error = e.what();
  }

  std::map<std::string, Built> builds;
  for (std::size_t idx : job.settings) {
    const Setting& s = settings[idx];
    MetricRow row{s, job.seed, 0.0, 0.0, std::nullopt, 0, 0, std::nullopt};
    std::vector<QueryRow> qrows;
    if (!partition_error.empty()) {
      row.skipped = partition_error;
      out.rows.push_back(std::move(row));
      out.queries.push_back({});
      continue;
    }
    const auto params = build_params(s, job.seed, c.max_iters);
    auto [it, fresh] = builds.try_emplace(build_key(params));
    Built& built = it->second;
    if (fresh) {
      try {
        std::vector<federation::Peer> peers;
        for (std::size_t p = 0; p < shares.size(); ++p) {
          auto pp = params;
          pp.seed = peer_seed(job.seed, p);
          peers.emplace_back(federation::peer_name(p, shares.size()), shares[p], pp, partitions[p]);
        }
        built.fed.emplace(std::move(peers));
        built.fed->publish_all();
        built.where = locate_documents(*built.fed);
      } catch (const ParameterError& e) {
        built.error = e.what();
      }
    }
    if (!built.fed) {
      row.skipped = built.error;
      out.rows.push_back(std::move(row));
      out.queries.push_back({});
      continue;
    }
    double recall_sum = 0.0;
    for (const auto& q : data.queries) {
      const auto method = method_of(s.method);
      const auto sel = built.fed->select(method, q, s.cast, s.h.value_or(1));
      const auto results = built.fed->retrieve(method, q, sel, s.top_n);
      QueryRow qr{s, job.seed, q.id, precision_at(results, data.qrels, q.id, s.top_n),
                  avg_precision_at(results, data.qrels, q.id, s.top_n),
                  selected_peer_recall(sel, data.qrels, q.id, built.where)};
      row.p_at_n += qr.p_at_n;
      row.ap_at_n += qr.ap_at_n;
      if (qr.recall) {
        recall_sum += *qr.recall;
        ++row.recall_queries;
      }
      ++row.queries;
      qrows.push_back(std::move(qr));
    }
    if (row.queries > 0) {
      row.p_at_n /= static_cast<double>(row.queries);
      row.ap_at_n /= static_cast<double>(row.queries);
    }
    if (row.recall_queries > 0) row.recall = recall_sum / static_cast<double>(row.recall_queries);
    out.rows.push_back(std::move(row));
    out.queries.push_back(std::move(qrows));
  }
  return out;
}

template <typename F>
void parallel_for(std::size_t count, std::size_t threads, F&& body) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

std::string csv_real(const OptReal& v) { return v ? fmt::format("{}", *v) : std::string(); }
std::string csv_size(const OptSize& v) { return v ? fmt::format("{}", *v) : std::string(); }

nlohmann::json opt_json(const OptReal& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }
nlohmann::json opt_json(const OptSize& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }

}  // namespace

SweepReport run_sweep(const SweepConfig& config, const DatasetSource& source) {
  validate(config);
  const auto settings = enumerate_settings(config);

  std::vector<Dataset> datasets;
  datasets.reserve(config.seeds.size());
  for (auto seed : config.seeds) datasets.push_back(source(seed));

  std::vector<Job> jobs;
  for (std::size_t si = 0; si < config.seeds.size(); ++si) {
    std::map<OptSize, std::size_t> by_k;
    for (std::size_t idx = 0; idx < settings.size(); ++idx) {
      const auto k = settings[idx].clusters;
      auto [it, fresh] = by_k.try_emplace(k, jobs.size());
      if (fresh) jobs.push_back({config.seeds[si], si, k, {}});
      jobs[it->second].settings.push_back(idx);
    }
  }

  std::vector<JobOutput> outputs(jobs.size());
  parallel_for(jobs.size(), config.threads, [&](std::size_t j) {
    outputs[j] = run_job(jobs[j], settings, datasets[jobs[j].seed_index], config);
  });

  // Reassemble in (setting, seed) order.
  std::vector<std::vector<std::pair<MetricRow, std::vector<QueryRow>>>> per_setting(settings.size());
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    for (std::size_t n = 0; n < jobs[j].settings.size(); ++n) {
      per_setting[jobs[j].settings[n]].emplace_back(std::move(outputs[j].rows[n]), std::move(outputs[j].queries[n]));
    }
  }

  SweepReport report;
  report.config = config;
  for (std::size_t idx = 0; idx < settings.size(); ++idx) {
    SettingSummary summary{settings[idx], {}, 0.0, 0.0, std::nullopt, std::nullopt};
    std::size_t used = 0;
    std::size_t with_recall = 0;
    double recall = 0.0;
    for (auto& [row, qrows] : per_setting[idx]) {
      summary.seeds.push_back(row.seed);
      if (row.skipped) {
        summary.skipped = row.skipped;
      } else {
        ++used;
        summary.p_at_n += row.p_at_n;
        summary.ap_at_n += row.ap_at_n;
        if (row.recall) {
          recall += *row.recall;
          ++with_recall;
        }
      }
      report.rows.push_back(std::move(row));
      for (auto& q : qrows) report.query_rows.push_back(std::move(q));
    }
    if (used > 0) {
      summary.p_at_n /= static_cast<double>(used);
      summary.ap_at_n /= static_cast<double>(used);
    }
    if (with_recall > 0) summary.recall = recall / static_cast<double>(with_recall);
    report.summaries.push_back(std::move(summary));
  }

  for (Variant m : config.methods) {
    std::vector<std::string> order;
    std::map<std::string, std::pair<double, std::size_t>> score;
    std::map<std::string, bool> complete;
    for (const auto& s : report.summaries) {
      if (s.setting.method != m) continue;
      const auto fam = s.setting.family();
      if (!score.contains(fam)) {
        order.push_back(fam);
        complete[fam] = true;
      }
      auto& [sum, n] = score[fam];
      if (s.skipped) complete[fam] = false;
      sum += s.p_at_n;
      ++n;
    }
    std::optional<std::string> best;
    double best_score = -1.0;
    for (const auto& fam : order) {
      if (!complete[fam]) continue;
      const double v = score[fam].first / static_cast<double>(score[fam].second);
      if (v > best_score) {
        best_score = v;
        best = fam;
      }
    }
    if (best) report.best.emplace_back(m, *best);
  }

  const auto observations = [&](const std::string& family) {
    std::vector<RecallObservation> obs;
    for (const auto& q : report.query_rows) {
      if (q.setting.family() == family) obs.push_back({q.setting.cast, fmt::format("{}:{}", q.seed, q.query_id), q.recall});
    }
    return obs;
  };
  auto cdlsi = std::find_if(report.best.begin(), report.best.end(),
                            [](const auto& b) { return b.first == Variant::Cdlsi; });
  if (cdlsi != report.best.end()) {
    const auto a = observations(cdlsi->second);
    for (const auto& [m, fam] : report.best) {
      if (m == Variant::Cdlsi) continue;
      const auto b = observations(fam);
      report.comparisons.push_back(compare(cdlsi->second, a, fam, b));
    }
  }
  return report;
}

void write_query_csv(std::ostream& out, const SweepReport& report) {
  out << "method,K,epsilon,k,h,delta,G,N,seed,query_id,p_at_n,ap_at_n,recall\n";
  for (const auto& q : report.query_rows) {
    const auto& s = q.setting;
    out << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{}\n", to_string(s.method), csv_size(s.clusters),
                       csv_real(s.epsilon), csv_size(s.rank), csv_size(s.h), csv_real(s.delta), s.cast, s.top_n,
                       q.seed, q.query_id, q.p_at_n, q.ap_at_n, csv_real(q.recall));
  }
}

nlohmann::json config_json(const SweepConfig& c) {
  nlohmann::json j;
  std::vector<std::string> methods;
  for (auto m : c.methods) methods.emplace_back(to_string(m));
  j["methods"] = methods;
  j["peers"] = c.peers;
  j["K"] = c.clusters;
  j["epsilon"] = c.epsilons;
  j["k"] = c.ranks;
  j["h"] = c.hs;
  j["delta"] = c.deltas;
  j["G"] = c.casts;
  j["N"] = c.top_n;
  j["seeds"] = c.seeds;
  j["max_iters"] = c.max_iters;
  return j;
}

nlohmann::json report_json(const SweepReport& r) {
  nlohmann::json j;
  j["config"] = config_json(r.config);
  nlohmann::json settings = nlohmann::json::object();
  for (const auto& s : r.summaries) {
    const auto& st = s.setting;
    nlohmann::json e;
    e["label"] = st.label();
    e["method"] = to_string(st.method);
    e["K"] = opt_json(st.clusters);
    e["epsilon"] = opt_json(st.epsilon);
    e["k"] = opt_json(st.rank);
    e["h"] = opt_json(st.h);
    e["delta"] = opt_json(st.delta);
    e["G"] = st.cast;
    e["N"] = st.top_n;
    e["seeds"] = s.seeds;
    e["p_at_n"] = s.p_at_n;
    e["ap_at_n"] = s.ap_at_n;
    e["recall"] = opt_json(s.recall);
    e["skipped"] = s.skipped ? nlohmann::json(*s.skipped) : nlohmann::json(nullptr);
    settings[st.key()] = std::move(e);
  }
  j["settings"] = std::move(settings);

  nlohmann::json rows = nlohmann::json::array();
  for (const auto& m : r.rows) {
    rows.push_back({{"setting", m.setting.key()},
                    {"seed", m.seed},
                    {"p_at_n", m.p_at_n},
                    {"ap_at_n", m.ap_at_n},
                    {"recall", opt_json(m.recall)},
                    {"queries", m.queries},
                    {"recall_queries", m.recall_queries},
                    {"zero_relevant_queries", m.queries - m.recall_queries},
                    {"skipped", m.skipped ? nlohmann::json(*m.skipped) : nlohmann::json(nullptr)}});
  }
  j["rows"] = std::move(rows);

  nlohmann::json best = nlohmann::json::object();
  for (const auto& [m, fam] : r.best) best[std::string(to_string(m))] = fam;
  j["best"] = std::move(best);

  nlohmann::json comps = nlohmann::json::array();
  for (const auto& t : r.comparisons) {
    nlohmann::json ct{{"a", t.method_a}, {"b", t.method_b}, {"rows", nlohmann::json::array()}};
    for (const auto& row : t.rows) {
      ct["rows"].push_back(
          {{"G", row.cast}, {"queries", row.queries}, {">", row.wins}, {"<", row.losses}, {"=", row.ties}});
    }
    comps.push_back(std::move(ct));
  }
  j["comparisons"] = std::move(comps);
  return j;
}

std::size_t update_step_count(double initial_fraction, double step_fraction) {
  if (!(initial_fraction > 0.0 && initial_fraction <= 1.0)) {
    throw ConfigError("update: initial fraction must be in (0, 1]");
  }
  if (!(step_fraction > 0.0)) throw ConfigError("update: step fraction must be > 0");
  return static_cast<std::size_t>(std::ceil((1.0 - initial_fraction) / step_fraction - 1e-9));
}

namespace {

std::pair<double, double> measure(const federation::Federation& fed, const Dataset& data, const UpdateConfig& c) {
  double p = 0.0, ap = 0.0;
  for (const auto& q : data.queries) {
    const auto results = fed.query(federation::Method::Cdlsi, q, c.cast, c.h, c.top_n);
    p += precision_at(results, data.qrels, q.id, c.top_n);
    ap += avg_precision_at(results, data.qrels, q.id, c.top_n);
  }
  const double n = data.queries.empty() ? 1.0 : static_cast<double>(data.queries.size());
  return {p / n, ap / n};
}

}  // namespace

UpdateReport run_update_study(const UpdateConfig& c, const DatasetSource& source) {
  const std::size_t steps = update_step_count(c.initial_fraction, c.step_fraction);
  if (c.peers == 0) throw ConfigError("update: peers must be >= 1");
  if (c.cast == 0 || c.cast > c.peers) throw ConfigError("update: cast outside [1, peers]");
  UpdateReport report{c, {}};
  for (auto seed : c.seeds) {
    const Dataset data = source(seed);
    const auto shares = federation::distribute_round_robin(data.docs, c.peers);
    const auto boundary = [&](std::size_t p, std::size_t s) {
      const auto n = static_cast<double>(shares[p].size());
      const auto initial = static_cast<std::size_t>(std::floor(c.initial_fraction * n + 1e-9));
      if (s >= steps) return shares[p].size();
      const auto extra = static_cast<std::size_t>(std::llround(static_cast<double>(s) * c.step_fraction * n));
      return std::min(shares[p].size(), initial + extra);
    };
    for (bool rebuild : {false, true}) {
      std::vector<federation::Peer> peers;
      std::size_t indexed = 0;
      for (std::size_t p = 0; p < shares.size(); ++p) {
        const auto end = boundary(p, 0);
        indexed += end;
        auto params = c.index;
        params.seed = peer_seed(seed, p);
        peers.emplace_back(federation::peer_name(p, shares.size()),
                           std::vector<corpus::WeightedDoc>(shares[p].begin(), shares[p].begin() + end), params);
      }
      federation::Federation fed(std::move(peers));
      fed.publish_all();
      auto [p0, ap0] = measure(fed, data, c);
      report.points.push_back({seed, rebuild, 0, indexed, p0, ap0, 0, 0});
      for (std::size_t s = 1; s <= steps; ++s) {
        UpdatePoint pt{seed, rebuild, s, 0, 0.0, 0.0, 0, 0};
        for (std::size_t p = 0; p < shares.size(); ++p) {
          const auto from = boundary(p, s - 1);
          const auto to = boundary(p, s);
          auto& peer = fed.peers()[p];
          pt.folded += peer.fold_in(std::span(shares[p]).subspan(from, to - from)).folded;
          if (rebuild) pt.rebuilt_clusters += peer.maybe_rebuild(c.rebuild_fraction).rebuilt.size();
        }
        indexed = 0;
        for (std::size_t p = 0; p < shares.size(); ++p) indexed += boundary(p, s);
        pt.indexed_docs = indexed;
        fed.publish_all();
        std::tie(pt.p_at_n, pt.ap_at_n) = measure(fed, data, c);
        report.points.push_back(pt);
      }
    }
  }
  return report;
}

void write_update_csv(std::ostream& out, const UpdateReport& report) {
  out << "seed,rebuild,step,indexed_docs,folded,rebuilt_clusters,p_at_n,ap_at_n\n";
  for (const auto& p : report.points) {
    out << fmt::format("{},{},{},{},{},{},{},{}\n", p.seed, p.rebuild ? 1 : 0, p.step, p.indexed_docs, p.folded,
                       p.rebuilt_clusters, p.p_at_n, p.ap_at_n);
  }
}

void write_cluster_terms(std::ostream& out, const peer::PeerIndex& index, const corpus::TermDictionary& dictionary) {
  out << "peer_id,cluster,term_id,term,weight\n";
  for (const auto& c : index.clusters()) {
    for (const auto& e : c.centroid()) {
      const std::string term = e.index < dictionary.size() ? dictionary.term(e.index) : std::string();
      out << fmt::format("{},{},{},{},{}\n", index.peer_id(), c.id(), e.index, term, e.value);
    }
  }
}

}  // namespace cdlsi::eval
