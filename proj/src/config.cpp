#include "cdlsi/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "cdlsi/error.hpp"

namespace cdlsi {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> out;
  while (true) {
    const auto comma = s.find(',');
    const auto item = trim(s.substr(0, comma));
    if (!item.empty()) out.push_back(item);
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
  T value{};
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError(fmt::format("{}: cannot parse \"{}\"", key, text));
  }
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(value)) throw ConfigError(fmt::format("{}: value must be finite", key));
  }
  return value;
}

template <typename T>
std::vector<T> parse_numbers(std::string_view key, std::string_view text) {
  std::vector<T> out;
  for (auto item : split_list(text)) out.push_back(parse_number<T>(key, item));
  return out;
}

bool parse_bool(std::string_view key, std::string_view text) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw ConfigError(fmt::format("{}: expected a boolean, got \"{}\"", key, text));
}

template <typename T>
std::string join(const std::vector<T>& values) {
  return fmt::format("{}", fmt::join(values, ","));
}

}  // namespace

std::vector<std::string> config_keys() {
  return {"corpus",       "queries",         "qrels",          "output",         "peers",
          "assignment",   "K",               "epsilon",        "k",              "h",
          "delta",        "G",               "N",              "rebuild_fraction", "seeds",
          "methods",      "relations",       "max_iters",      "threads",        "initial_fraction",
          "step_fraction", "topics",         "docs_per_topic", "vocab_per_topic", "overlap",
          "polysemy",     "doc_length",      "core_terms",     "query_length"};
}

KeyValues parse_key_values(std::string_view text) {
  KeyValues out;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(fmt::format("config line {}: expected key = value", line_no));
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) throw ParseError(fmt::format("config line {}: empty key", line_no));
    out[std::string(key)] = std::string(trim(line.substr(eq + 1)));
  }
  return out;
}

KeyValues load_key_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_key_values(buffer.str());
}

Config apply_config(Config c, const KeyValues& values) {
  for (const auto& [key, value] : values) {
    const std::string_view v = value;
    if (key == "corpus") c.corpus = value;
    else if (key == "queries") c.queries = value;
    else if (key == "qrels") c.qrels = value;
    else if (key == "output") c.output = value;
    else if (key == "peers") c.peers = parse_number<std::size_t>(key, v);
    else if (key == "assignment") c.assignment = value;
    else if (key == "K") c.clusters = parse_numbers<std::size_t>(key, v);
    else if (key == "epsilon") c.epsilons = parse_numbers<double>(key, v);
    else if (key == "k") c.ranks = parse_numbers<std::size_t>(key, v);
    else if (key == "h") c.hs = parse_numbers<std::size_t>(key, v);
    else if (key == "delta") c.deltas = parse_numbers<double>(key, v);
    else if (key == "G") c.casts = parse_numbers<std::size_t>(key, v);
    else if (key == "N") c.top_n = parse_number<std::size_t>(key, v);
    else if (key == "rebuild_fraction") c.rebuild_fraction = parse_number<double>(key, v);
    else if (key == "seeds") c.seeds = parse_numbers<std::uint64_t>(key, v);
    else if (key == "methods") {
      c.methods.clear();
      for (auto m : split_list(v)) c.methods.emplace_back(m);
    }
    else if (key == "relations") c.relations = parse_bool(key, v);
    else if (key == "max_iters") c.max_iters = parse_number<std::size_t>(key, v);
    else if (key == "threads") c.threads = parse_number<std::size_t>(key, v);
    else if (key == "initial_fraction") c.initial_fraction = parse_number<double>(key, v);
    else if (key == "step_fraction") c.step_fraction = parse_number<double>(key, v);
    else if (key == "topics") c.synthetic.topics = parse_number<std::size_t>(key, v);
    else if (key == "docs_per_topic") c.synthetic.docs_per_topic = parse_number<std::size_t>(key, v);
    else if (key == "vocab_per_topic") c.synthetic.vocab_per_topic = parse_number<std::size_t>(key, v);
    else if (key == "overlap") c.synthetic.overlap_fraction = parse_number<double>(key, v);
    else if (key == "polysemy") c.synthetic.polysemy_terms = parse_number<std::size_t>(key, v);
    else if (key == "doc_length") c.synthetic.doc_length = parse_number<std::size_t>(key, v);
    else if (key == "core_terms") c.synthetic.core_terms = parse_number<std::size_t>(key, v);
    else if (key == "query_length") c.synthetic.query_length = parse_number<std::size_t>(key, v);
    else throw ConfigError("unknown config key \"" + key + "\"");
  }
  if (!c.seeds.empty()) c.synthetic.seed = c.seeds.front();
  return c;
}

void Config::validate() const {
  if (peers == 0) throw ConfigError("peers: must be >= 1");
  if (assignment != "uniform" && assignment != "by-file") {
    throw ConfigError("assignment: expected uniform or by-file, got \"" + assignment + "\"");
  }
  const auto nonempty = [](const auto& v, const char* key) {
    if (v.empty()) throw ConfigError(fmt::format("{}: needs at least one value", key));
  };
  nonempty(clusters, "K");
  nonempty(epsilons, "epsilon");
  nonempty(hs, "h");
  nonempty(deltas, "delta");
  nonempty(casts, "G");
  nonempty(seeds, "seeds");
  nonempty(methods, "methods");
  for (auto k : clusters) {
    if (k == 0) throw ConfigError("K: must be >= 1");
  }
  for (auto e : epsilons) {
    if (e < 0.0) throw ConfigError("epsilon: must be >= 0");
  }
  for (auto k : ranks) {
    if (k == 0) throw ConfigError("k: must be >= 1");
  }
  for (auto h : hs) {
    if (h == 0) throw ConfigError("h: must be >= 1");
  }
  for (auto d : deltas) {
    if (!(d >= 0.0 && d < 1.0)) throw ConfigError("delta: must be in [0, 1)");
  }
  for (auto g : casts) {
    if (g == 0 || g > peers) throw ConfigError(fmt::format("G: must be in [1, peers={}]", peers));
  }
  if (top_n == 0) throw ConfigError("N: must be >= 1");
  if (!(rebuild_fraction >= 0.0)) throw ConfigError("rebuild_fraction: must be >= 0");
  if (!(initial_fraction > 0.0 && initial_fraction <= 1.0)) throw ConfigError("initial_fraction: must be in (0, 1]");
  if (!(step_fraction > 0.0)) throw ConfigError("step_fraction: must be > 0");
  if (max_iters == 0) throw ConfigError("max_iters: must be >= 1");
  if (!(synthetic.overlap_fraction >= 0.0 && synthetic.overlap_fraction <= 1.0)) {
    throw ConfigError("overlap: must be in [0, 1]");
  }
  for (const auto& m : methods) (void)eval::parse_variant(m);
}

peer::IndexParams Config::index_params() const {
  peer::IndexParams p;
  p.clusters = clusters.front();
  p.truncation = ranks.empty() ? peer::Truncation::threshold(epsilons.front())
                               : peer::Truncation::fixed_rank(ranks.front());
  p.delta = deltas.front();
  p.seed = seeds.front();
  p.max_iters = max_iters;
  p.use_relations = relations;
  return p;
}

eval::SweepConfig Config::sweep_config() const {
  eval::SweepConfig s;
  s.methods.clear();
  for (const auto& m : methods) s.methods.push_back(eval::parse_variant(m));
  s.peers = peers;
  s.clusters = clusters;
  s.epsilons = epsilons;
  s.ranks = ranks;
  s.hs = hs;
  s.deltas = deltas;
  s.casts = casts;
  s.top_n = top_n;
  s.seeds = seeds;
  s.max_iters = max_iters;
  s.threads = threads;
  return s;
}

eval::UpdateConfig Config::update_config() const {
  eval::UpdateConfig u;
  u.peers = peers;
  u.index = index_params();
  u.h = hs.front();
  u.cast = casts.front();
  u.top_n = top_n;
  u.initial_fraction = initial_fraction;
  u.step_fraction = step_fraction;
  u.rebuild_fraction = rebuild_fraction;
  u.seeds = seeds;
  return u;
}

KeyValues to_key_values(const Config& c) {
  KeyValues kv;
  kv["corpus"] = c.corpus.string();
  kv["queries"] = c.queries.string();
  kv["qrels"] = c.qrels.string();
  kv["output"] = c.output.string();
  kv["peers"] = std::to_string(c.peers);
  kv["assignment"] = c.assignment;
  kv["K"] = join(c.clusters);
  kv["epsilon"] = join(c.epsilons);
  kv["k"] = join(c.ranks);
  kv["h"] = join(c.hs);
  kv["delta"] = join(c.deltas);
  kv["G"] = join(c.casts);
  kv["N"] = std::to_string(c.top_n);
  kv["rebuild_fraction"] = fmt::format("{}", c.rebuild_fraction);
  kv["seeds"] = join(c.seeds);
  kv["methods"] = join(c.methods);
  kv["relations"] = c.relations ? "true" : "false";
  kv["max_iters"] = std::to_string(c.max_iters);
  kv["threads"] = std::to_string(c.threads);
  kv["initial_fraction"] = fmt::format("{}", c.initial_fraction);
  kv["step_fraction"] = fmt::format("{}", c.step_fraction);
  kv["topics"] = std::to_string(c.synthetic.topics);
  kv["docs_per_topic"] = std::to_string(c.synthetic.docs_per_topic);
  kv["vocab_per_topic"] = std::to_string(c.synthetic.vocab_per_topic);
  kv["overlap"] = fmt::format("{}", c.synthetic.overlap_fraction);
  kv["polysemy"] = std::to_string(c.synthetic.polysemy_terms);
  kv["doc_length"] = std::to_string(c.synthetic.doc_length);
  kv["core_terms"] = std::to_string(c.synthetic.core_terms);
  kv["query_length"] = std::to_string(c.synthetic.query_length);
  return kv;
}

std::string format_config(const Config& c) {
  const auto kv = to_key_values(c);
  std::string out = "# effective config\n";
  for (const auto& key : config_keys()) out += fmt::format("{} = {}\n", key, kv.at(key));
  return out;
}

}  // namespace cdlsi
