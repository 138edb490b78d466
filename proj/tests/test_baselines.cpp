#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "cdlsi/baselines.hpp"
#include "cdlsi/error.hpp"
#include "cdlsi/experiment.hpp"
#include "cdlsi/federation.hpp"
#include "support.hpp"

using namespace cdlsi;
using namespace cdlsi::baselines;
using corpus::WeightedDoc;

namespace {

std::vector<WeightedDoc> random_peer_docs(std::mt19937_64& rng, const std::string& prefix, std::size_t n, TermId vocab) {
  std::vector<WeightedDoc> docs;
  for (std::size_t j = 0; j < n; ++j) docs.push_back(testing::random_doc(rng, prefix + std::to_string(j), testing::term_range(0, vocab), 0.3));
  return docs;
}

clustering::Clustering singleton_partition(std::size_t n) {
  clustering::Clustering c;
  c.k = n;
  c.sizes.assign(n, 1);
  for (std::size_t j = 0; j < n; ++j) c.assignment.push_back(j);
  return c;
}

eval::Dataset planted(std::size_t topics, std::size_t per_topic, std::uint64_t seed, double overlap = 0.2) {
  corpus::SyntheticParams p;
  p.topics = topics;
  p.docs_per_topic = per_topic;
  p.overlap_fraction = overlap;
  p.polysemy_terms = overlap > 0.0 ? 3 : 0;
  p.seed = seed;
  return eval::synthetic_dataset(p);
}

}  // namespace

TEST_SUITE("ggloss") {
  TEST_CASE("two documents") {
    const std::vector<WeightedDoc> docs{{"a", SparseVector{{0, 1.0}}}, {"b", SparseVector{{1, 1.0}}}};
    const auto d = make_ggloss_descriptor("p", docs);
    CHECK(d.doc_count == 2);
    CHECK(d.centroid.at(0) == doctest::Approx(0.5));
    CHECK(ggloss_score(d, testing::query_of("q", {{0, 1.0}})) == doctest::Approx(1.0));
    CHECK(ggloss_score(d, testing::query_of("q", {{5, 1.0}})) == 0.0);
  }

  TEST_CASE("aggregate equals the per-document sum") {
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 30; ++trial) {
      const auto docs = random_peer_docs(rng, "d", 3 + trial % 11, 25);
      const auto d = make_ggloss_descriptor("p", docs);
      const auto q = testing::random_query(rng, "q", 25, 4);
      double explicit_sum = 0.0;
      for (const auto& doc : docs) explicit_sum += dot(doc.weights, q.weights);
      CHECK(std::abs(ggloss_score(d, q) - explicit_sum) < 1e-12);
      for (const auto& e : d.centroid) {
        double mean = 0.0;
        for (const auto& doc : docs) mean += doc.weights.at(e.index);
        CHECK(std::abs(e.value - mean / static_cast<double>(docs.size())) < 1e-10);
      }
    }
  }

  TEST_CASE("ranking order and ties") {
    std::vector<GglossDescriptor> ds{{"p2", 1, SparseVector{{0, 1.0}}}, {"p1", 1, SparseVector{{0, 1.0}}},
                                     {"p0", 1, SparseVector{{0, 0.5}}}};
    const auto ranks = ggloss_rank(ds, testing::query_of("q", {{0, 1.0}}));
    REQUIRE(ranks.size() == 3);
    CHECK(ranks[0].peer_id == "p1");
    CHECK(ranks[1].peer_id == "p2");
    CHECK(ranks[2].peer_id == "p0");
  }

  TEST_CASE("json round trip") {
    std::mt19937_64 rng(2);
    const auto d = make_ggloss_descriptor("peer", random_peer_docs(rng, "d", 6, 12));
    CHECK(ggloss_descriptor_from_json(nlohmann::json::parse(to_json(d).dump())) == d);
  }
}

TEST_SUITE("iscluster") {
  TEST_CASE("mean weight over the documents that carry a term") {
    const std::vector<WeightedDoc> docs{{"a", SparseVector{{0, 0.4}, {1, 0.9}}}, {"b", SparseVector{{0, 0.6}}},
                                        {"c", SparseVector{{1, 0.3}}}};
    clustering::Clustering c;
    c.k = 1;
    c.assignment = {0, 0, 0};
    c.sizes = {3};
    const auto d = make_iscluster_descriptor("p", docs, c);
    REQUIRE(d.clusters.size() == 1);
    CHECK(d.clusters[0].doc_count == 3);
    CHECK(d.clusters[0].term_weights.at(0) == doctest::Approx(0.5));
    CHECK(d.clusters[0].term_weights.at(1) == doctest::Approx(0.6));

    const auto q = testing::query_of("q", {{0, 1.0}});
    const double expected = 3 * 0.5;
    CHECK(iscluster_cluster_score(d.clusters[0], q) == doctest::Approx(expected));
    const std::vector<IsClusterDescriptor> ds{d};
    CHECK(iscluster_rank(ds, q, 1)[0].rank == doctest::Approx(expected));
    CHECK_THROWS_AS((void)iscluster_rank(ds, q, 0), ParameterError);
  }

  TEST_CASE("term weights stay within contributing document weights") {
    std::mt19937_64 rng(3);
    const auto docs = random_peer_docs(rng, "d", 20, 15);
    const auto c = clustering::kmeans(docs, 4, 1);
    const auto d = make_iscluster_descriptor("p", docs, c);
    for (std::size_t l = 0; l < c.k; ++l) {
      for (const auto& e : d.clusters[l].term_weights) {
        double lo = 1e9, hi = -1e9;
        for (std::size_t j = 0; j < docs.size(); ++j) {
          const double w = docs[j].weights.at(e.index);
          if (c.assignment[j] != l || w == 0.0) continue;
          lo = std::min(lo, w);
          hi = std::max(hi, w);
        }
        CHECK(e.value >= lo - 1e-12);
        CHECK(e.value <= hi + 1e-12);
      }
    }
  }

  TEST_CASE("one document per cluster ranks like ggloss") {
    std::mt19937_64 rng(4);
    std::vector<IsClusterDescriptor> is;
    std::vector<GglossDescriptor> gg;
    for (int p = 0; p < 6; ++p) {
      const auto docs = random_peer_docs(rng, "p" + std::to_string(p) + "d", 4 + p % 3, 20);
      is.push_back(make_iscluster_descriptor("p" + std::to_string(p), docs, singleton_partition(docs.size())));
      gg.push_back(make_ggloss_descriptor("p" + std::to_string(p), docs));
    }
    for (int i = 0; i < 20; ++i) {
      const auto q = testing::random_query(rng, "q", 20, 3);
      const auto a = iscluster_rank(is, q, 10);
      const auto b = ggloss_rank(gg, q);
      REQUIRE(a.size() == b.size());
      for (std::size_t r = 0; r < a.size(); ++r) {
        CHECK(a[r].rank == doctest::Approx(b[r].rank).epsilon(1e-12));
        if (a[r].rank > 0.0) CHECK(a[r].peer_id == b[r].peer_id);
      }
    }
  }

  TEST_CASE("json round trip") {
    std::mt19937_64 rng(5);
    const auto docs = random_peer_docs(rng, "d", 9, 12);
    const auto d = make_iscluster_descriptor("peer", docs, clustering::kmeans(docs, 3, 7));
    CHECK(iscluster_descriptor_from_json(nlohmann::json::parse(to_json(d).dump())) == d);
  }
}

TEST_SUITE("term match") {
  TEST_CASE("raw inner products, positive only") {
    const std::vector<WeightedDoc> docs{{"a", SparseVector{{0, 0.3}}}, {"b", SparseVector{{0, 0.8}}}, {"c", SparseVector{{1, 1.0}}}};
    const auto hits = term_match_retrieve("p", docs, testing::query_of("q", {{0, 1.0}}), 10);
    REQUIRE(hits.size() == 2);
    CHECK(hits[0].doc_id == "b");
    CHECK(hits[1].doc_id == "a");
    CHECK(hits[0].peer_id == "p");
  }
}

TEST_SUITE("ablations") {
  TEST_CASE("fixed rank at the cluster rank equals a zero threshold") {
    std::mt19937_64 rng(6);
    std::vector<WeightedDoc> docs;
    for (int j = 0; j < 6; ++j) docs.push_back(testing::random_doc(rng, "d" + std::to_string(j), testing::term_range(0, 12)));
    peer::IndexParams base;
    base.clusters = 1;
    base.truncation = peer::Truncation::threshold(0.0);
    const auto full = peer::PeerIndex::build("p", docs, base);
    const auto ranked = peer::PeerIndex::build("p", docs, cdlsi_k_params(base, full.cluster(0).lsi_rank()));
    const auto q = testing::random_query(rng, "q", 12, 3);
    CHECK(ranked.cluster_query_score(0, q) == doctest::Approx(full.cluster_query_score(0, q)).epsilon(1e-10));
    for (std::size_t j = 0; j < docs.size(); ++j) {
      CHECK(ranked.document_score(0, j, q) == doctest::Approx(full.document_score(0, j, q)).epsilon(1e-10));
    }
  }

  TEST_CASE("no-relations variant ignores terms outside the cluster") {
    const auto data = planted(6, 10, 3, 0.3);
    peer::IndexParams p;
    p.clusters = 6;
    p.truncation = peer::Truncation::threshold(0.3);
    p.delta = 0.0;
    const auto nr = peer::PeerIndex::build("p", data.docs, cdlsi_nr_params(p));
    for (std::size_t i = 0; i < 6; ++i) {
      CHECK(nr.relevant(i).empty());
      for (TermId t = 0; t < data.dictionary.size(); ++t) {
        if (nr.cluster(i).contains(t)) continue;
        CHECK(nr.cluster_query_score(i, testing::query_of("q", {{t, 1.0}})) == 0.0);
      }
    }
  }

  TEST_CASE("vocabulary-disjoint clusters make relations irrelevant") {
    std::mt19937_64 rng(8);
    std::vector<WeightedDoc> docs;
    for (TermId g = 0; g < 5; ++g) {
      for (int j = 0; j < 8; ++j) {
        docs.push_back(testing::random_doc(rng, "g" + std::to_string(g) + "d" + std::to_string(j), testing::term_range(10 * g, 8)));
      }
    }
    peer::IndexParams p;
    p.clusters = 5;
    p.truncation = peer::Truncation::threshold(0.3);
    p.delta = 0.0;
    const auto with = peer::PeerIndex::build("p", docs, p);
    const auto without = peer::PeerIndex::build("p", docs, cdlsi_nr_params(p));
    for (std::size_t i = 0; i < 5; ++i) {
      for (std::size_t j = i + 1; j < 5; ++j) {
        std::vector<TermId> inter;
        std::set_intersection(with.cluster(i).terms().begin(), with.cluster(i).terms().end(), with.cluster(j).terms().begin(),
                              with.cluster(j).terms().end(), std::back_inserter(inter));
        REQUIRE(inter.empty());
      }
    }
    const std::vector<std::size_t> all{0, 1, 2, 3, 4};
    for (int i = 0; i < 20; ++i) {
      const auto q = testing::random_query(rng, "q", 50, 3);
      CHECK(with.cluster_scores(q) == without.cluster_scores(q));
      CHECK(with.local_retrieve(q, all, 20) == without.local_retrieve(q, all, 20));
    }
  }
}

TEST_SUITE("combination methods") {
  federation::Federation build_federation(const eval::Dataset& data, std::size_t peers, std::size_t k) {
    peer::IndexParams p;
    p.clusters = k;
    p.truncation = peer::Truncation::threshold(0.3);
    p.delta = 0.01;
    std::vector<federation::Peer> ps;
    const auto parts = federation::distribute_round_robin(data.docs, peers);
    for (std::size_t i = 0; i < peers; ++i) ps.emplace_back(federation::peer_name(i, peers), parts[i], p);
    federation::Federation fed(std::move(ps));
    fed.publish_all();
    return fed;
  }

  TEST_CASE("CM1 at full cast matches C-DLSI querying every cluster") {
    const auto data = planted(5, 12, 5);
    const auto fed = build_federation(data, 4, 3);
    for (const auto& q : data.queries) {
      CHECK(fed.query(federation::Method::Cm1, q, 4, 3, 10) == fed.query(federation::Method::Cdlsi, q, 4, 3, 10));
    }
  }

  TEST_CASE("CM2 selects the IS-Cluster top peers") {
    const auto data = planted(5, 12, 6);
    const auto fed = build_federation(data, 5, 3);
    const auto is = fed.directory().iscluster_descriptors();
    for (const auto& q : data.queries) {
      const auto ranks = iscluster_rank(is, q, 2);
      std::vector<std::string> expected;
      for (std::size_t i = 0; i < 2; ++i) expected.push_back(ranks[i].peer_id);
      CHECK(fed.select(federation::Method::Cm2, q, 2, 2).peer_ids() == expected);
    }
  }

  TEST_CASE("selectors order the same peer set") {
    const auto data = planted(4, 10, 7);
    const auto fed = build_federation(data, 4, 2);
    for (const auto& q : data.queries) {
      auto sorted = [](std::vector<std::string> v) {
        std::sort(v.begin(), v.end());
        return v;
      };
      const auto a = sorted(fed.select(federation::Method::Cdlsi, q, 4, 2).peer_ids());
      CHECK(a == sorted(fed.select(federation::Method::Ggloss, q, 4, 2).peer_ids()));
      CHECK(a == sorted(fed.select(federation::Method::IsCluster, q, 4, 2).peer_ids()));
    }
  }
}
