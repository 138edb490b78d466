#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <sstream>

#include "cdlsi/error.hpp"
#include "cdlsi/experiment.hpp"
#include "cdlsi/metrics.hpp"
#include "support.hpp"

using namespace cdlsi;
using namespace cdlsi::eval;

namespace {

RankedList ranked(std::initializer_list<const char*> ids) {
  RankedList out;
  double s = 1.0;
  for (const auto* id : ids) {
    out.push_back({id, s, "p0"});
    s -= 0.01;
  }
  return out;
}

corpus::Qrels qrels_for(const std::string& query, std::initializer_list<const char*> relevant) {
  corpus::Qrels q;
  for (const auto* d : relevant) q.set(query, d, 1);
  return q;
}

DatasetSource small_source(std::size_t topics = 4, std::size_t per_topic = 12) {
  return [=](std::uint64_t seed) {
    corpus::SyntheticParams p;
    p.topics = topics;
    p.docs_per_topic = per_topic;
    p.overlap_fraction = 0.2;
    p.polysemy_terms = 3;
    p.seed = seed;
    return synthetic_dataset(p);
  };
}

SweepConfig small_sweep() {
  SweepConfig c;
  c.methods = {Variant::Cdlsi, Variant::Ggloss};
  c.peers = 4;
  c.clusters = {2};
  c.epsilons = {0.3};
  c.hs = {1};
  c.deltas = {0.05};
  c.casts = {1, 2};
  c.top_n = 5;
  c.seeds = {1, 2};
  return c;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

TEST_SUITE("metrics") {
  TEST_CASE("precision at n") {
    const auto qrels = qrels_for("q", {"d1", "d4", "d9"});
    const auto list = ranked({"d0", "d1", "d2", "d3", "d4", "d5", "d6", "d7", "d8", "d9"});
    CHECK(precision_at(list, qrels, "q", 10) == doctest::Approx(0.3));
    CHECK(precision_at(ranked({"d1", "d4", "d9"}), qrels, "q", 3) == 1.0);
    CHECK(precision_at({}, qrels, "q", 10) == 0.0);
    CHECK(precision_at(ranked({"d1"}), qrels, "q", 10) == doctest::Approx(0.1));
    CHECK_THROWS_AS((void)precision_at(list, qrels, "q", 0), ParameterError);
  }

  TEST_CASE("average precision at n") {
    const auto qrels = qrels_for("q", {"r"});
    double h10 = 0.0;
    for (int i = 1; i <= 10; ++i) h10 += 1.0 / i;
    CHECK(avg_precision_at(ranked({"r", "a", "b", "c", "d", "e", "f", "g", "h", "i"}), qrels, "q", 10) ==
          doctest::Approx(h10 / 10.0));
    CHECK(h10 / 10.0 == doctest::Approx(0.29290).epsilon(1e-4));
    CHECK(avg_precision_at(ranked({"a", "b", "c", "d", "r"}), qrels, "q", 5) == doctest::Approx(1.0 / 25.0));
    const auto all = qrels_for("q", {"a", "b", "c"});
    CHECK(avg_precision_at(ranked({"a", "b", "c"}), all, "q", 3) == doctest::Approx(1.0));
    CHECK_THROWS_AS((void)avg_precision_at({}, all, "q", 0), ParameterError);
  }

  TEST_CASE("bounds on random lists") {
    std::mt19937_64 rng(1);
    std::bernoulli_distribution coin(0.3);
    for (int t = 0; t < 100; ++t) {
      corpus::Qrels q;
      RankedList list;
      for (int i = 0; i < 15; ++i) {
        const auto id = "d" + std::to_string(i);
        if (coin(rng)) q.set("q", id, 1);
        list.push_back({id, 1.0 - i * 0.01, "p"});
      }
      const double ap = avg_precision_at(list, q, "q", 10);
      CHECK(ap >= 0.0);
      CHECK(ap <= 1.0);
    }
  }

  TEST_CASE("selected peer recall") {
    federation::SelectionResult all{{{"p0", 1.0, {}}, {"p1", 0.5, {}}}};
    federation::SelectionResult one{{{"p0", 1.0, {}}}};
    federation::SelectionResult none;
    const DocLocation where{{"a", "p0"}, {"b", "p0"}, {"c", "p1"}, {"d", "p1"}};
    const auto qrels = qrels_for("q", {"a", "b", "c", "d"});
    CHECK(selected_peer_recall(all, qrels, "q", where) == 1.0);
    CHECK(selected_peer_recall(one, qrels, "q", where) == 0.5);
    CHECK(selected_peer_recall(none, qrels, "q", where) == 0.0);
    CHECK_FALSE(selected_peer_recall(all, qrels, "other", where).has_value());
  }

  TEST_CASE("comparison table") {
    const std::vector<RecallObservation> a{{1, "q1", 1.0}, {1, "q2", 0.5}, {1, "q3", 0.2}, {1, "q4", std::nullopt}};
    const std::vector<RecallObservation> b{{1, "q1", 0.5}, {1, "q2", 0.5}, {1, "q3", 0.4}, {1, "q4", 0.1}};
    const auto t = compare("x", a, "y", b);
    REQUIRE(t.rows.size() == 1);
    CHECK(t.rows[0].queries == 4);
    CHECK(t.rows[0].wins == doctest::Approx(0.25));
    CHECK(t.rows[0].losses == doctest::Approx(0.25));
    CHECK(t.rows[0].ties == doctest::Approx(0.5));
  }
}

TEST_SUITE("sweep") {
  TEST_CASE("one method, one setting, one query") {
    SweepConfig c;
    c.methods = {Variant::Ggloss};
    c.peers = 2;
    c.clusters = {2};
    c.casts = {1};
    c.seeds = {3};
    const auto source = [](std::uint64_t seed) {
      auto d = small_source()(seed);
      d.queries.resize(1);
      return d;
    };
    const auto report = run_sweep(c, source);
    CHECK(report.rows.size() == 1);
    CHECK(report.query_rows.size() == 1);
    CHECK(report.rows[0].queries == 1);
  }

  TEST_CASE("repeated runs give byte-identical reports") {
    auto c = small_sweep();
    const auto a = run_sweep(c, small_source());
    c.threads = 3;
    const auto b = run_sweep(c, small_source());
    std::ostringstream ca, cb;
    write_query_csv(ca, a);
    write_query_csv(cb, b);
    CHECK(ca.str() == cb.str());
    CHECK(report_json(a).dump() == report_json(b).dump());
  }

  TEST_CASE("comparison fractions recomputed from the per-query csv") {
    const auto report = run_sweep(small_sweep(), small_source());
    std::ostringstream csv;
    write_query_csv(csv, report);
    std::istringstream in(csv.str());
    std::string line;
    std::getline(in, line);
    // (G, seed:query) -> recall text, per method.
    std::map<std::string, std::map<std::pair<std::string, std::string>, std::string>> recall;
    while (std::getline(in, line)) {
      const auto cells = split(line);
      REQUIRE(cells.size() == 13);
      recall[cells[0]][{cells[6], cells[8] + ":" + cells[9]}] = cells[12];
    }
    REQUIRE(report.comparisons.size() == 1);
    const auto& table = report.comparisons[0];
    REQUIRE(table.rows.size() == 2);
    for (const auto& row : table.rows) {
      std::size_t n = 0, wins = 0, losses = 0;
      for (const auto& [key, ra] : recall["cdlsi"]) {
        if (key.first != std::to_string(row.cast)) continue;
        ++n;
        const auto& rb = recall["ggloss"].at(key);
        if (ra.empty() || rb.empty()) continue;
        wins += std::stod(ra) > std::stod(rb);
        losses += std::stod(ra) < std::stod(rb);
      }
      CHECK(row.queries == n);
      CHECK(row.wins == doctest::Approx(static_cast<double>(wins) / n));
      CHECK(row.losses == doctest::Approx(static_cast<double>(losses) / n));
      CHECK(row.wins + row.losses + row.ties == doctest::Approx(1.0));
    }
    const auto j = report_json(report);
    CHECK(j["comparisons"][0]["rows"].size() == 2);
    CHECK(j["best"].contains("cdlsi"));
  }

  TEST_CASE("infeasible rank marks the row skipped") {
    auto c = small_sweep();
    c.methods = {Variant::CdlsiK};
    c.ranks = {1, 500};
    c.seeds = {1};
    const auto report = run_sweep(c, small_source());
    std::size_t skipped = 0;
    for (const auto& r : report.rows) {
      if (r.skipped) {
        ++skipped;
        CHECK(r.setting.rank == 500u);
      }
    }
    CHECK(skipped == 2);
    REQUIRE(report.best.size() == 1);
    CHECK(report.best[0].second.find("k=1") != std::string::npos);
  }

  TEST_CASE("configuration validation") {
    auto c = small_sweep();
    c.casts = {5};
    CHECK_THROWS_AS(validate(c), ConfigError);
    c = small_sweep();
    c.seeds.clear();
    CHECK_THROWS_AS(validate(c), ConfigError);
    c = small_sweep();
    c.methods = {Variant::CdlsiK};
    CHECK_THROWS_AS(validate(c), ConfigError);
    CHECK_NOTHROW(validate(small_sweep()));
  }

  TEST_CASE("variant names") {
    for (auto v : {Variant::Cdlsi, Variant::CdlsiK, Variant::CdlsiNr, Variant::Ggloss, Variant::IsCluster, Variant::Cm1,
                   Variant::Cm2}) {
      CHECK(parse_variant(to_string(v)) == v);
    }
    CHECK_THROWS_AS((void)parse_variant("lsi"), ConfigError);
  }
}

TEST_SUITE("update study") {
  TEST_CASE("step count") {
    CHECK(update_step_count(0.7, 0.05) == 6);
    CHECK(update_step_count(0.5, 0.25) == 2);
    CHECK(update_step_count(0.9, 0.3) == 1);
  }

  TEST_CASE("both curves are emitted") {
    UpdateConfig c;
    c.peers = 3;
    c.index.clusters = 2;
    c.index.truncation = peer::Truncation::threshold(0.3);
    c.h = 1;
    c.cast = 2;
    c.top_n = 5;
    c.seeds = {1};
    const auto report = run_update_study(c, small_source(4, 15));
    std::size_t with = 0, without = 0;
    for (const auto& p : report.points) (p.rebuild ? with : without) += 1;
    CHECK(with == 7);
    CHECK(without == 7);
    CHECK(report.points.back().indexed_docs == 60);
    for (const auto& p : report.points) {
      if (!p.rebuild) CHECK(p.rebuilt_clusters == 0);
    }
    std::ostringstream csv;
    write_update_csv(csv, report);
    const auto text = csv.str();
    CHECK(std::count(text.begin(), text.end(), '\n') == 15);
  }
}
