#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "cdlsi/config.hpp"
#include "cdlsi/error.hpp"
#include "cdlsi/experiment.hpp"
#include "cdlsi/federation.hpp"
#include "cdlsi/linalg.hpp"
#include "cdlsi/metrics.hpp"

namespace py = pybind11;
using namespace cdlsi;

namespace {

using Matrix = std::vector<std::vector<double>>;
using Hit = std::tuple<std::string, double, std::string>;
using DocPairs = std::vector<std::pair<std::string, std::string>>;

Matrix to_rows(const linalg::DenseMatrix& m) {
  Matrix out(m.rows(), std::vector<double>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) out[i][j] = m(i, j);
  }
  return out;
}

linalg::DenseMatrix from_rows(const Matrix& rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.front().size();
  linalg::DenseMatrix m(r, c);
  for (std::size_t i = 0; i < r; ++i) {
    if (rows[i].size() != c) throw DimensionError("svd: ragged matrix rows");
    for (std::size_t j = 0; j < c; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

std::vector<corpus::RawDoc> to_raw(const DocPairs& docs) {
  std::vector<corpus::RawDoc> out;
  out.reserve(docs.size());
  for (const auto& [id, text] : docs) out.push_back({id, text});
  return out;
}

DocPairs to_pairs(const std::vector<corpus::RawDoc>& docs) {
  DocPairs out;
  out.reserve(docs.size());
  for (const auto& d : docs) out.emplace_back(d.id, d.text);
  return out;
}

corpus::Qrels single_query_qrels(const std::vector<std::string>& relevant) {
  corpus::Qrels q;
  for (const auto& d : relevant) q.set("q", d, 1);
  return q;
}

RankedList as_ranked(const std::vector<std::string>& ids) {
  RankedList out;
  for (std::size_t i = 0; i < ids.size(); ++i) out.push_back({ids[i], static_cast<double>(ids.size() - i), ""});
  return out;
}

/// A federation over an in-memory corpus split round-robin across peers.
class Engine {
 public:
  Engine(const DocPairs& docs, std::size_t peers, std::size_t clusters, double epsilon, std::optional<std::size_t> rank,
         double delta, bool relations, std::uint64_t seed) {
    if (peers == 0) throw ConfigError("peers must be >= 1");
    const auto raw = to_raw(docs);
    auto weighted = corpus::log_entropy_weights(raw);
    std::vector<corpus::WeightedDoc> normalized;
    for (const auto& d : weighted.docs) normalized.push_back(d.normalized());
    peer::IndexParams params;
    params.clusters = clusters;
    params.truncation = rank ? peer::Truncation::fixed_rank(*rank) : peer::Truncation::threshold(epsilon);
    params.delta = delta;
    params.use_relations = relations;
    const auto shares = federation::distribute_round_robin(normalized, peers);
    std::vector<federation::Peer> built;
    for (std::size_t p = 0; p < shares.size(); ++p) {
      auto pp = params;
      pp.seed = seed + p;
      built.emplace_back(federation::peer_name(p, peers), shares[p], pp);
    }
    dictionary_ = std::move(weighted.dictionary);
    factors_ = std::move(weighted.global_factors);
    fed_.emplace(std::move(built));
    fed_->publish_all();
  }

  std::vector<Hit> query(const std::string& text, const std::string& method, std::size_t cast, std::size_t h,
                         std::size_t top_n) const {
    const auto q = corpus::vectorize_query("q", text, dictionary_, factors_);
    std::vector<Hit> out;
    for (const auto& r : fed_->query(federation::parse_method(method), q, cast, h, top_n)) {
      out.emplace_back(r.doc_id, r.score, r.peer_id);
    }
    return out;
  }

  std::vector<std::pair<std::string, double>> select(const std::string& text, const std::string& method,
                                                     std::size_t cast, std::size_t h) const {
    const auto q = corpus::vectorize_query("q", text, dictionary_, factors_);
    std::vector<std::pair<std::string, double>> out;
    for (const auto& p : fed_->select(federation::parse_method(method), q, cast, h).peers) {
      out.emplace_back(p.peer_id, p.rank);
    }
    return out;
  }

  std::string descriptor(const std::string& peer_id, const std::string& strategy) const {
    for (auto s : {federation::Strategy::Cdlsi, federation::Strategy::Ggloss, federation::Strategy::IsCluster}) {
      if (federation::to_string(s) != strategy) continue;
      const auto* d = fed_->directory().find(peer_id, s);
      if (d == nullptr) throw ParameterError("no descriptor for peer " + peer_id);
      return federation::serialize(*d);
    }
    throw ParameterError("unknown strategy " + strategy);
  }

  std::vector<std::string> peers() const {
    std::vector<std::string> out;
    for (const auto& p : fed_->peers()) out.push_back(p.id());
    return out;
  }

  std::size_t vocabulary_size() const { return dictionary_.size(); }

 private:
  corpus::TermDictionary dictionary_;
  std::vector<double> factors_;
  std::optional<federation::Federation> fed_;
};

}  // namespace

PYBIND11_MODULE(_cdlsi, m) {
  m.doc() = "C-DLSI federated retrieval engine";

  py::register_exception<Error>(m, "CdlsiError", PyExc_RuntimeError);

  m.def("tokenize", &corpus::tokenize, py::arg("text"));

  m.def(
      "svd",
      [](const Matrix& rows) {
        const auto f = linalg::svd(from_rows(rows));
        return std::make_tuple(to_rows(f.u), f.sigma, to_rows(f.v));
      },
      py::arg("matrix"), "Thin SVD (u, sigma, v) of a list-of-rows matrix.");

  m.def(
      "synthetic_corpus",
      [](std::size_t topics, std::size_t docs_per_topic, std::size_t vocab_per_topic, double overlap,
         std::size_t polysemy, std::uint64_t seed) {
        corpus::SyntheticParams p;
        p.topics = topics;
        p.docs_per_topic = docs_per_topic;
        p.vocab_per_topic = vocab_per_topic;
        p.overlap_fraction = overlap;
        p.polysemy_terms = polysemy;
        p.seed = seed;
        const auto s = corpus::generate_synthetic(p);
        py::dict out;
        out["docs"] = to_pairs(s.docs);
        out["queries"] = to_pairs(s.queries);
        out["qrels"] = s.qrels.judgments();
        return out;
      },
      py::arg("topics") = 20, py::arg("docs_per_topic") = 50, py::arg("vocab_per_topic") = 40,
      py::arg("overlap") = 0.1, py::arg("polysemy") = 0, py::arg("seed") = 1);

  m.def(
      "precision_at",
      [](const std::vector<std::string>& ranked, const std::vector<std::string>& relevant, std::size_t n) {
        return eval::precision_at(as_ranked(ranked), single_query_qrels(relevant), "q", n);
      },
      py::arg("ranked"), py::arg("relevant"), py::arg("n"));

  m.def(
      "avg_precision_at",
      [](const std::vector<std::string>& ranked, const std::vector<std::string>& relevant, std::size_t n) {
        return eval::avg_precision_at(as_ranked(ranked), single_query_qrels(relevant), "q", n);
      },
      py::arg("ranked"), py::arg("relevant"), py::arg("n"));

  m.def(
      "bench",
      [](const std::map<std::string, std::string>& settings) {
        KeyValues kv(settings.begin(), settings.end());
        const auto cfg = apply_config(Config{}, kv);
        cfg.validate();
        const auto synthetic = cfg.synthetic;
        const auto report = eval::run_sweep(cfg.sweep_config(), [synthetic](std::uint64_t seed) {
          auto p = synthetic;
          p.seed = seed;
          return eval::synthetic_dataset(p);
        });
        return eval::report_json(report).dump();
      },
      py::arg("settings"), "Runs a sweep over synthetic data; returns the JSON report.");

  py::class_<Engine>(m, "Engine")
      .def(py::init<const DocPairs&, std::size_t, std::size_t, double, std::optional<std::size_t>, double, bool,
                    std::uint64_t>(),
           py::arg("docs"), py::arg("peers") = 5, py::arg("clusters") = 3, py::arg("epsilon") = 0.5,
           py::arg("rank") = py::none(), py::arg("delta") = 0.05, py::arg("relations") = true, py::arg("seed") = 1)
      .def("query", &Engine::query, py::arg("text"), py::arg("method") = "cdlsi", py::arg("cast") = 1,
           py::arg("h") = 1, py::arg("top_n") = 10)
      .def("select", &Engine::select, py::arg("text"), py::arg("method") = "cdlsi", py::arg("cast") = 1,
           py::arg("h") = 1)
      .def("descriptor", &Engine::descriptor, py::arg("peer_id"), py::arg("strategy") = "cdlsi")
      .def_property_readonly("peers", &Engine::peers)
      .def_property_readonly("vocabulary_size", &Engine::vocabulary_size);
}
