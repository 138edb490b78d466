#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <functional>

#include "cdlsi/error.hpp"
#include "cdlsi/experiment.hpp"
#include "cdlsi/federation.hpp"
#include "cdlsi/metrics.hpp"
#include "support.hpp"

using namespace cdlsi;
using namespace cdlsi::federation;
using corpus::WeightedDoc;

namespace {

eval::Dataset planted(std::size_t topics, std::size_t per_topic, std::uint64_t seed) {
  corpus::SyntheticParams p;
  p.topics = topics;
  p.docs_per_topic = per_topic;
  p.overlap_fraction = 0.2;
  p.polysemy_terms = 3;
  p.seed = seed;
  return eval::synthetic_dataset(p);
}

peer::IndexParams params(std::size_t k) {
  peer::IndexParams p;
  p.clusters = k;
  p.truncation = peer::Truncation::threshold(0.3);
  p.delta = 0.01;
  return p;
}

Federation federation_of(std::span<const WeightedDoc> docs, std::size_t peers, std::size_t k) {
  std::vector<Peer> ps;
  const auto parts = distribute_round_robin(docs, peers);
  for (std::size_t i = 0; i < peers; ++i) ps.emplace_back(peer_name(i, peers), parts[i], params(k));
  Federation fed(std::move(ps));
  fed.publish_all();
  return fed;
}

}  // namespace

TEST_SUITE("directory") {
  TEST_CASE("publish then read back") {
    const auto data = planted(3, 6, 1);
    Peer p("p0", data.docs, params(2));
    Directory dir;
    const auto published = p.publish();
    REQUIRE(published.size() == 3);
    for (const auto& d : published) dir.publish(d);
    for (const auto& d : published) {
      const auto* found = dir.find("p0", strategy_of(d));
      REQUIRE(found != nullptr);
      CHECK(*found == d);
      CHECK(deserialize(serialize(d)) == d);
    }
    CHECK(dir.find("p9", Strategy::Cdlsi) == nullptr);
    CHECK(dir.peers(Strategy::Ggloss) == std::vector<std::string>{"p0"});
  }

  TEST_CASE("republish after fold-in replaces the entry") {
    const auto data = planted(3, 8, 2);
    std::vector<WeightedDoc> base(data.docs.begin(), data.docs.begin() + 18);
    Peer p("p0", base, params(2));
    Directory dir;
    for (auto& d : p.publish()) dir.publish(d);
    const auto before = std::get<peer::PeerDescriptor>(*dir.find("p0", Strategy::Cdlsi));
    (void)p.fold_in(std::span(data.docs).subspan(18));
    for (auto& d : p.publish()) dir.publish(d);
    CHECK(dir.size(Strategy::Cdlsi) == 1);
    CHECK(dir.size(Strategy::Ggloss) == 1);
    const auto after = std::get<peer::PeerDescriptor>(*dir.find("p0", Strategy::Cdlsi));
    CHECK_FALSE(after == before);
    CHECK(std::get<baselines::GglossDescriptor>(*dir.find("p0", Strategy::Ggloss)).doc_count == data.docs.size());
  }

  TEST_CASE("corrupted descriptor is rejected") {
    const auto data = planted(4, 8, 3);
    Peer p("p0", data.docs, params(3));
    auto d = std::get<peer::PeerDescriptor>(p.publish()[0]);
    auto it = std::find_if(d.clusters.begin(), d.clusters.end(), [](const auto& c) { return !c.rho.empty(); });
    REQUIRE(it != d.clusters.end());
    it->rho[0] = SparseVector::from_unsorted({{999999, 1.0}});
    Directory dir;
    CHECK_THROWS_AS(dir.publish(d), ValidationError);
    CHECK(dir.size(Strategy::Cdlsi) == 0);
    CHECK_THROWS_AS((void)deserialize(R"({"format":"cdlsi-descriptor","version":1,"strategy":"nope","peer_id":"x"})"),
                    ValidationError);
  }
}

TEST_SUITE("selection") {
  TEST_CASE("argument checks and empty directory") {
    Directory dir;
    const auto q = testing::query_of("q", {{0, 1.0}});
    CHECK(select_peers(dir, q, 3, 2).peers.empty());
    CHECK_THROWS_AS((void)select_peers(dir, q, 0, 2), ParameterError);
    CHECK_THROWS_AS((void)select_peers(dir, q, 3, 0), ParameterError);
  }

  TEST_CASE("single best cluster gives the maximum cluster score") {
    const auto data = planted(5, 10, 4);
    const auto fed = federation_of(data.docs, 3, 4);
    for (const auto& q : data.queries) {
      const auto sel = select_peers(fed.directory(), q, 3, 1);
      for (const auto& sp : sel.peers) {
        const auto scores = fed.peer(sp.peer_id).index().cluster_scores(q);
        CHECK(sp.rank == *std::max_element(scores.begin(), scores.end()));
        REQUIRE(sp.clusters.size() == 1);
        CHECK(scores[sp.clusters[0]] == sp.rank);
      }
    }
  }

  TEST_CASE("peer sharing no query terms ranks zero") {
    std::mt19937_64 rng(5);
    std::vector<WeightedDoc> a, b;
    for (int j = 0; j < 6; ++j) {
      a.push_back(testing::random_doc(rng, "a" + std::to_string(j), testing::term_range(0, 6)));
      b.push_back(testing::random_doc(rng, "b" + std::to_string(j), testing::term_range(20, 6)));
    }
    std::vector<Peer> ps;
    ps.emplace_back("pa", a, params(2));
    ps.emplace_back("pb", b, params(2));
    Federation fed(std::move(ps));
    fed.publish_all();
    const auto sel = fed.select(Method::Cdlsi, testing::query_of("q", {{1, 1.0}}), 2, 2);
    REQUIRE(sel.peers.size() == 2);
    CHECK(sel.peers[0].peer_id == "pa");
    CHECK(sel.peers[0].rank > 0.0);
    CHECK(sel.peers[1].rank == 0.0);
  }

  TEST_CASE("broker-side rank equals peer-side recomputation") {
    const auto data = planted(6, 12, 6);
    const auto fed = federation_of(data.docs, 4, 4);
    std::mt19937_64 rng(7);
    for (int i = 0; i < 50; ++i) {
      const auto q = testing::random_query(rng, "q" + std::to_string(i), static_cast<TermId>(data.dictionary.size()), 3);
      const std::size_t h = 1 + static_cast<std::size_t>(i) % 4;
      const auto sel = select_peers(fed.directory(), q, 4, h);
      REQUIRE(sel.peers.size() == 4);
      for (std::size_t r = 0; r < sel.peers.size(); ++r) {
        auto scores = fed.peer(sel.peers[r].peer_id).index().cluster_scores(q);
        std::sort(scores.begin(), scores.end(), std::greater<>());
        double expected = 0.0;
        for (std::size_t c = 0; c < h && c < scores.size(); ++c) expected += scores[c];
        CHECK(sel.peers[r].rank == expected);
        if (r > 0) CHECK(sel.peers[r - 1].rank >= sel.peers[r].rank);
      }
    }
  }

  TEST_CASE("scaling the query keeps peer and cluster choices") {
    const auto data = planted(5, 10, 8);
    const auto fed = federation_of(data.docs, 5, 3);
    for (const auto& q : data.queries) {
      auto scaled = q;
      scaled.weights = q.weights.scaled(2.5);
      for (auto method : {Method::Cdlsi, Method::Ggloss, Method::IsCluster}) {
        const auto a = fed.select(method, q, 3, 2);
        const auto b = fed.select(method, scaled, 3, 2);
        CHECK(a.peer_ids() == b.peer_ids());
        for (std::size_t i = 0; i < a.peers.size(); ++i) CHECK(a.peers[i].clusters == b.peers[i].clusters);
      }
    }
  }
}

TEST_SUITE("query") {
  TEST_CASE("merge orders by score then doc id") {
    const std::vector<RankedList> lists{{{"a", 0.9, "p0"}, {"b", 0.5, "p0"}}, {{"c", 0.7, "p1"}}};
    const auto merged = merge_results(lists);
    REQUIRE(merged.size() == 3);
    CHECK(merged[0].doc_id == "a");
    CHECK(merged[1].doc_id == "c");
    CHECK(merged[2].doc_id == "b");
    const std::vector<RankedList> tied{{{"y", 0.5, "p0"}}, {{"x", 0.5, "p1"}}};
    CHECK(merge_results(tied)[0].doc_id == "x");
  }

  TEST_CASE("document with a unique query term comes first") {
    auto raw = corpus::generate_synthetic(corpus::SyntheticParams{});
    raw.docs.push_back({"needle", "zyzzogeton " + raw.docs.front().text});
    const auto data = eval::prepare_dataset(raw.docs, {}, {});
    const auto fed = federation_of(data.docs, 4, 3);
    const auto q = corpus::vectorize_query("q", "zyzzogeton", data.dictionary, data.global_factors);
    REQUIRE_FALSE(q.weights.empty());
    const auto results = fed.query(Method::Cdlsi, q, 4, 3, 10);
    REQUIRE_FALSE(results.empty());
    CHECK(results[0].doc_id == "needle");
  }

  TEST_CASE("federated results equal a monolithic ranking at full cast") {
    const auto data = planted(6, 15, 9);
    const std::size_t k = 3;
    const auto fed = federation_of(data.docs, 3, k);
    for (const auto& q : data.queries) {
      RankedList mono;
      for (const auto& p : fed.peers()) {
        for (std::size_t c = 0; c < k; ++c) {
          for (std::size_t j = 0; j < p.index().cluster(c).doc_count(); ++j) {
            const double s = p.index().document_score(c, j, q);
            if (s > 0.0) mono.push_back({p.index().cluster(c).docs()[j].id, s, p.id()});
          }
        }
      }
      mono = top_ranked(std::move(mono), 10);
      const auto fedres = fed.query(Method::Cdlsi, q, 3, k, 10);
      CHECK(eval::precision_at(fedres, data.qrels, q.id, 10) == eval::precision_at(mono, data.qrels, q.id, 10));
      REQUIRE(fedres.size() >= mono.size());
      for (std::size_t r = 0; r < mono.size(); ++r) {
        CHECK(fedres[r].doc_id == mono[r].doc_id);
        CHECK(fedres[r].score == mono[r].score);
      }
    }
  }

  TEST_CASE("merged list stays within cast times top n") {
    const auto data = planted(5, 10, 10);
    const auto fed = federation_of(data.docs, 5, 2);
    for (const auto& q : data.queries) {
      for (auto m : {Method::Cdlsi, Method::Ggloss, Method::IsCluster, Method::Cm1, Method::Cm2}) {
        const auto r = fed.query(m, q, 2, 1, 4);
        CHECK(r.size() <= 8);
        const auto sel = fed.select(m, q, 2, 1);
        const auto ids = sel.peer_ids();
        for (const auto& d : r) CHECK(std::find(ids.begin(), ids.end(), d.peer_id) != ids.end());
      }
    }
  }

  TEST_CASE("duplicate ids are configuration errors") {
    const auto data = planted(2, 5, 11);
    std::vector<Peer> same_doc;
    same_doc.emplace_back("p0", std::vector<WeightedDoc>(data.docs.begin(), data.docs.begin() + 5), params(1));
    same_doc.emplace_back("p1", std::vector<WeightedDoc>(data.docs.begin() + 4, data.docs.end()), params(1));
    CHECK_THROWS_AS(Federation(std::move(same_doc)), ConfigError);
    std::vector<Peer> same_peer;
    same_peer.emplace_back("p0", std::vector<WeightedDoc>(data.docs.begin(), data.docs.begin() + 5), params(1));
    same_peer.emplace_back("p0", std::vector<WeightedDoc>(data.docs.begin() + 5, data.docs.end()), params(1));
    CHECK_THROWS_AS(Federation(std::move(same_peer)), ConfigError);
  }

  TEST_CASE("method names") {
    CHECK(parse_method("cm2") == Method::Cm2);
    CHECK(to_string(Method::IsCluster) == "iscluster");
    CHECK_THROWS_AS((void)parse_method("lsi"), ConfigError);
    CHECK(peer_name(3, 50) == "p03");
    CHECK(distribute_round_robin(std::vector<WeightedDoc>(50), 5)[4].size() == 10);
  }
}
