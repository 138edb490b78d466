// Command-line driver: corpus generation, indexing, publishing, queries,
// parameter sweeps and the update simulation.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "cdlsi/config.hpp"
#include "cdlsi/error.hpp"
#include "cdlsi/experiment.hpp"
#include "cdlsi/federation.hpp"

namespace fs = std::filesystem;
using namespace cdlsi;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  if (!out) throw IoError("write failed for " + path.string());
}

fs::path or_default(const fs::path& p, const fs::path& fallback) { return p.empty() ? fallback : p; }

struct Layout {
  fs::path root;
  [[nodiscard]] fs::path corpus() const { return root / "corpus.jsonl"; }
  [[nodiscard]] fs::path queries() const { return root / "queries.jsonl"; }
  [[nodiscard]] fs::path qrels() const { return root / "qrels.txt"; }
  [[nodiscard]] fs::path dictionary() const { return root / "dictionary.json"; }
  [[nodiscard]] fs::path index_dir() const { return root / "index"; }
  [[nodiscard]] fs::path descriptor_dir() const { return root / "descriptors"; }
};

std::vector<fs::path> sorted_files(const fs::path& dir, std::string_view extension) {
  std::vector<fs::path> out;
  if (!fs::is_directory(dir)) return out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == extension) out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

nlohmann::json parse_json(const fs::path& path) {
  try {
    return nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void save_dictionary(const fs::path& path, const corpus::TermDictionary& dict, std::span<const double> factors) {
  nlohmann::json j{{"format", "cdlsi-dictionary"},
                   {"version", 1},
                   {"terms", std::vector<std::string>(dict.terms().begin(), dict.terms().end())},
                   {"global_factors", std::vector<double>(factors.begin(), factors.end())}};
  write_file(path, j.dump() + "\n");
}

std::pair<corpus::TermDictionary, std::vector<double>> load_dictionary(const fs::path& path) {
  if (!fs::exists(path)) throw IoError("no dictionary at " + path.string() + "; run `cdlsi index` first");
  const auto j = parse_json(path);
  if (j.value("format", "") != "cdlsi-dictionary") throw ParseError(path.string() + ": not a dictionary file");
  corpus::TermDictionary dict;
  for (const auto& t : j.at("terms")) dict.intern(t.get<std::string>());
  auto factors = j.at("global_factors").get<std::vector<double>>();
  if (factors.size() != dict.size()) throw ParseError(path.string() + ": factor count does not match terms");
  return {std::move(dict), std::move(factors)};
}

/// Peer collections named by peer id, raw text.
std::vector<std::pair<std::string, std::vector<corpus::RawDoc>>> load_collections(const Config& cfg,
                                                                                   const Layout& layout) {
  std::vector<std::pair<std::string, std::vector<corpus::RawDoc>>> out;
  if (cfg.assignment == "by-file") {
    if (!fs::is_directory(cfg.corpus)) {
      throw ConfigError("assignment=by-file needs corpus to be a directory of per-peer .jsonl files");
    }
    for (const auto& f : sorted_files(cfg.corpus, ".jsonl")) out.emplace_back(f.stem().string(), corpus::load_corpus(f));
    if (out.empty()) throw IoError("no .jsonl files under " + cfg.corpus.string());
    return out;
  }
  const auto path = or_default(cfg.corpus, layout.corpus());
  if (!fs::exists(path)) throw IoError("no corpus at " + path.string() + "; run `cdlsi generate` or set --corpus");
  const auto docs = corpus::load_corpus(path);
  for (std::size_t p = 0; p < cfg.peers; ++p) out.emplace_back(federation::peer_name(p, cfg.peers), std::vector<corpus::RawDoc>{});
  for (std::size_t j = 0; j < docs.size(); ++j) out[j % cfg.peers].second.push_back(docs[j]);
  return out;
}

void write_descriptors(const Layout& layout, federation::Peer& peer, federation::Directory& dir) {
  for (auto& d : peer.publish()) {
    const auto name = fmt::format("{}.{}.json", peer.id(), federation::to_string(federation::strategy_of(d)));
    write_file(layout.descriptor_dir() / name, federation::serialize(d) + "\n");
    dir.publish(std::move(d));
  }
}

std::vector<federation::Peer> load_peers(const Layout& layout) {
  const auto files = sorted_files(layout.index_dir(), ".json");
  if (files.empty()) {
    throw IoError("no peer indexes under " + layout.index_dir().string() + "; run `cdlsi index` first");
  }
  std::vector<federation::Peer> peers;
  for (const auto& f : files) peers.emplace_back(peer::PeerIndex::from_json(parse_json(f)));
  return peers;
}

eval::DatasetSource dataset_source(const Config& cfg) {
  if (cfg.corpus.empty()) {
    return [params = cfg.synthetic](std::uint64_t seed) {
      auto p = params;
      p.seed = seed;
      return eval::synthetic_dataset(p);
    };
  }
  if (cfg.queries.empty() || cfg.qrels.empty()) throw ConfigError("corpus given without queries and qrels");
  auto data = std::make_shared<eval::Dataset>(eval::prepare_dataset(
      corpus::load_corpus(cfg.corpus), corpus::load_corpus(cfg.queries), corpus::load_qrels(cfg.qrels)));
  return [data](std::uint64_t) { return *data; };
}

int cmd_generate(const Config& cfg) {
  const Layout layout{cfg.output};
  auto params = cfg.synthetic;
  params.seed = cfg.seeds.front();
  const auto synth = corpus::generate_synthetic(params);
  std::error_code ec;
  fs::create_directories(cfg.output, ec);
  if (ec) throw IoError("cannot create directory " + cfg.output.string() + ": " + ec.message());
  corpus::save_corpus(layout.corpus(), synth.docs);
  corpus::save_corpus(layout.queries(), synth.queries);
  corpus::save_qrels(layout.qrels(), synth.qrels);
  fmt::print("wrote {} documents, {} queries, {} judgments to {}\n", synth.docs.size(), synth.queries.size(),
             synth.qrels.size(), cfg.output.string());
  return 0;
}

int cmd_index(const Config& cfg) {
  const Layout layout{cfg.output};
  const auto collections = load_collections(cfg, layout);
  std::vector<corpus::RawDoc> all;
  for (const auto& [id, docs] : collections) all.insert(all.end(), docs.begin(), docs.end());
  const auto weighted = corpus::log_entropy_weights(all);

  std::vector<federation::Peer> peers;
  std::size_t offset = 0;
  for (const auto& [id, docs] : collections) {
    std::vector<corpus::WeightedDoc> mine;
    for (std::size_t j = 0; j < docs.size(); ++j) mine.push_back(weighted.docs[offset + j].normalized());
    offset += docs.size();
    auto params = cfg.index_params();
    params.seed = clustering::fnv1a(fmt::format("{}:{}", cfg.seeds.front(), id));
    peers.emplace_back(id, std::move(mine), params);
  }
  federation::Federation fed(std::move(peers));

  std::error_code ec;
  fs::remove_all(layout.index_dir(), ec);
  fs::remove_all(layout.descriptor_dir(), ec);
  save_dictionary(layout.dictionary(), weighted.dictionary, weighted.global_factors);
  std::ostringstream terms;
  for (auto& p : fed.peers()) {
    write_file(layout.index_dir() / (p.id() + ".json"), p.index().to_json().dump() + "\n");
    write_descriptors(layout, p, fed.directory());
    eval::write_cluster_terms(terms, p.index(), weighted.dictionary);
  }
  write_file(cfg.output / "cluster_terms.csv", terms.str());
  write_file(cfg.output / "index.conf", format_config(cfg));
  fmt::print("indexed {} documents on {} peers into {}\n", all.size(), fed.peers().size(), cfg.output.string());
  for (const auto& p : fed.peers()) {
    fmt::print("  {} docs={} clusters={}\n", p.id(), p.index().doc_count(), p.index().clusters().size());
  }
  return 0;
}

int cmd_publish(const Config& cfg) {
  const Layout layout{cfg.output};
  auto peers = load_peers(layout);
  federation::Directory dir;
  std::error_code ec;
  fs::remove_all(layout.descriptor_dir(), ec);
  for (auto& p : peers) write_descriptors(layout, p, dir);
  nlohmann::json listing = nlohmann::json::object();
  for (auto s : {federation::Strategy::Cdlsi, federation::Strategy::Ggloss, federation::Strategy::IsCluster}) {
    listing[std::string(federation::to_string(s))] = dir.peers(s);
  }
  write_file(cfg.output / "directory.json", listing.dump(2) + "\n");
  fmt::print("published descriptors for {} peers ({} cdlsi, {} ggloss, {} iscluster)\n", peers.size(),
             dir.size(federation::Strategy::Cdlsi), dir.size(federation::Strategy::Ggloss),
             dir.size(federation::Strategy::IsCluster));
  return 0;
}

int cmd_query(const Config& cfg, const std::string& text, const std::string& query_id) {
  const Layout layout{cfg.output};
  if (text.empty()) throw ConfigError("query: --text is required");
  const auto [dict, factors] = load_dictionary(layout.dictionary());
  federation::Federation fed(load_peers(layout));
  const auto descriptors = sorted_files(layout.descriptor_dir(), ".json");
  if (descriptors.empty()) {
    throw IoError("no descriptors under " + layout.descriptor_dir().string() + "; run `cdlsi publish` first");
  }
  for (const auto& f : descriptors) fed.directory().publish(federation::deserialize(read_file(f)));

  const auto method = federation::parse_method(cfg.methods.front());
  const auto q = corpus::vectorize_query(query_id, text, dict, factors);
  const auto cast = std::min(cfg.casts.front(), fed.peers().size());
  const auto selection = fed.select(method, q, cast, cfg.hs.front());
  const auto results = fed.retrieve(method, q, selection, cfg.top_n);

  fmt::print("{}", format_config(cfg));
  fmt::print("# query {} ({} weighted terms)\n", query_id, q.weights.size());
  fmt::print("# selected peers\n");
  for (const auto& p : selection.peers) {
    fmt::print("peer {} rank={} clusters=[{}]\n", p.peer_id, p.rank, fmt::join(p.clusters, ","));
  }
  fmt::print("# results\n");
  for (std::size_t i = 0; i < results.size(); ++i) {
    fmt::print("{} {} {} {}\n", i + 1, results[i].doc_id, results[i].score, results[i].peer_id);
  }
  return 0;
}

int cmd_bench(const Config& cfg) {
  const auto report = eval::run_sweep(cfg.sweep_config(), dataset_source(cfg));
  std::ostringstream csv;
  eval::write_query_csv(csv, report);
  write_file(cfg.output / "bench_queries.csv", csv.str());
  write_file(cfg.output / "bench_report.json", eval::report_json(report).dump(2) + "\n");
  fmt::print("{}", format_config(cfg));
  fmt::print("# setting | P@N | AP@N | recall\n");
  for (const auto& s : report.summaries) {
    if (s.skipped) {
      fmt::print("{} | skipped: {}\n", s.setting.label(), *s.skipped);
      continue;
    }
    fmt::print("{} | {:.4f} | {:.4f} | {}\n", s.setting.label(), s.p_at_n, s.ap_at_n,
               s.recall ? fmt::format("{:.4f}", *s.recall) : std::string("n/a"));
  }
  for (const auto& t : report.comparisons) {
    fmt::print("# comp: [{}] vs [{}]\n", t.method_a, t.method_b);
    for (const auto& r : t.rows) {
      fmt::print("G={} queries={} wins={:.3f} losses={:.3f} ties={:.3f}\n", r.cast, r.queries, r.wins, r.losses, r.ties);
    }
  }
  return 0;
}

int cmd_update_sim(const Config& cfg) {
  const auto report = eval::run_update_study(cfg.update_config(), dataset_source(cfg));
  std::ostringstream csv;
  eval::write_update_csv(csv, report);
  write_file(cfg.output / "update.csv", csv.str());
  fmt::print("{}", format_config(cfg));
  fmt::print("# seed rebuild step indexed folded rebuilt P@N AP@N\n");
  for (const auto& p : report.points) {
    fmt::print("{} {} {} {} {} {} {:.4f} {:.4f}\n", p.seed, p.rebuild ? "yes" : "no", p.step, p.indexed_docs,
               p.folded, p.rebuilt_clusters, p.p_at_n, p.ap_at_n);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"C-DLSI federated retrieval engine and simulation harness"};
  app.set_help_flag("--help", "print help and exit");
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "key=value config file; flags override it");

  KeyValues flags;
  const auto add_keys = [&](CLI::App* sub) {
    for (const auto& key : config_keys()) {
      const std::string flag = key.size() == 1 ? "-" + key : "--" + key;
      sub->add_option_function<std::string>(flag, [&flags, key](const std::string& v) { flags[key] = v; },
                                            "config key " + key);
    }
  };

  auto* generate = app.add_subcommand("generate", "write a synthetic planted-topic corpus");
  auto* index = app.add_subcommand("index", "build per-peer indexes and descriptors");
  auto* publish = app.add_subcommand("publish", "regenerate and validate descriptors from stored indexes");
  auto* query = app.add_subcommand("query", "run one federated query");
  auto* bench = app.add_subcommand("bench", "parameter sweep with metrics reports");
  auto* update = app.add_subcommand("update-sim", "incremental update study");
  std::string text;
  std::string query_id = "q";
  query->add_option("--text", text, "query text")->required();
  query->add_option("--id", query_id, "query id");
  for (auto* sub : {generate, index, publish, query, bench, update}) add_keys(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: usage: " << e.what() << "\n";
    return 2;
  }

  try {
    Config cfg;
    if (!config_path.empty()) cfg = apply_config(cfg, load_key_values(config_path));
    cfg = apply_config(cfg, flags);
    cfg.validate();
    if (*generate) return cmd_generate(cfg);
    if (*index) return cmd_index(cfg);
    if (*publish) return cmd_publish(cfg);
    if (*query) return cmd_query(cfg, text, query_id);
    if (*bench) return cmd_bench(cfg);
    if (*update) return cmd_update_sim(cfg);
  } catch (const Error& e) {
    std::cerr << "error: " << e.category() << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
