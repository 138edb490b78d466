#include "cdlsi/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include <json.hpp>

#include "cdlsi/error.hpp"

namespace cdlsi::corpus {

TermId TermDictionary::intern(std::string_view term) {
  auto it = ids_.find(std::string(term));
  if (it != ids_.end()) return it->second;
  const auto id = static_cast<TermId>(terms_.size());
  terms_.emplace_back(term);
  ids_.emplace(terms_.back(), id);
  return id;
}

std::optional<TermId> TermDictionary::find(std::string_view term) const {
  auto it = ids_.find(std::string(term));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

void Qrels::set(const std::string& query_id, const std::string& doc_id, int grade) {
  if (grade < 0) throw ParameterError("qrels: negative grade for " + query_id + "/" + doc_id);
  grades_[query_id][doc_id] = grade;
}

int Qrels::grade(const std::string& query_id, const std::string& doc_id) const {
  auto q = grades_.find(query_id);
  if (q == grades_.end()) return 0;
  auto d = q->second.find(doc_id);
  return d == q->second.end() ? 0 : d->second;
}

std::vector<std::string> Qrels::relevant_docs(const std::string& query_id) const {
  std::vector<std::string> out;
  auto q = grades_.find(query_id);
  if (q == grades_.end()) return out;
  for (const auto& [doc, g] : q->second) {
    if (g >= 1) out.push_back(doc);
  }
  return out;
}

std::size_t Qrels::size() const noexcept {
  std::size_t n = 0;
  for (const auto& [q, docs] : grades_) n += docs.size();
  return n;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string current;
  auto flush = [&] {
    if (current.size() >= 2 && !is_stopword(current)) out.push_back(current);
    current.clear();
  };
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c)) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else {
      flush();
    }
  }
  flush();
  return out;
}

namespace {

using TermCounts = std::map<TermId, std::size_t>;

TermCounts count_terms(std::string_view text, TermDictionary& dict) {
  TermCounts counts;
  for (const auto& tok : tokenize(text)) ++counts[dict.intern(tok)];
  return counts;
}

TermCounts count_known_terms(std::string_view text, const TermDictionary& dict) {
  TermCounts counts;
  for (const auto& tok : tokenize(text)) {
    if (auto id = dict.find(tok)) ++counts[*id];
  }
  return counts;
}

SparseVector local_weights(const TermCounts& counts, std::span<const double> global) {
  std::vector<SparseEntry> entries;
  entries.reserve(counts.size());
  for (const auto& [term, tf] : counts) {
    const double w = std::log2(1.0 + static_cast<double>(tf)) * global[term];
    if (w != 0.0) entries.push_back({term, w});
  }
  return SparseVector(std::move(entries));
}

}  // namespace

WeightedCorpus log_entropy_weights(std::span<const RawDoc> corpus) {
  if (corpus.empty()) throw ParameterError("log_entropy_weights: empty corpus");
  WeightedCorpus out;
  std::vector<TermCounts> counts;
  counts.reserve(corpus.size());
  for (const auto& doc : corpus) counts.push_back(count_terms(doc.text, out.dictionary));

  const std::size_t vocab = out.dictionary.size();
  std::vector<double> totals(vocab, 0.0);
  for (const auto& c : counts)
    for (const auto& [term, tf] : c) totals[term] += static_cast<double>(tf);

  std::vector<double> entropy(vocab, 0.0);
  for (const auto& c : counts) {
    for (const auto& [term, tf] : c) {
      const double p = static_cast<double>(tf) / totals[term];
      entropy[term] += p * std::log2(p);
    }
  }

  const double log_n = std::log2(static_cast<double>(corpus.size()));
  out.global_factors.assign(vocab, 1.0);
  if (corpus.size() > 1) {
    for (std::size_t t = 0; t < vocab; ++t) {
      // Clamp rounding noise so uniform terms land exactly on 0.
      out.global_factors[t] = std::clamp(1.0 + entropy[t] / log_n, 0.0, 1.0);
      if (std::abs(out.global_factors[t]) < 1e-14) out.global_factors[t] = 0.0;
    }
  }

  out.docs.reserve(corpus.size());
  for (std::size_t j = 0; j < corpus.size(); ++j) {
    out.docs.push_back({corpus[j].id, local_weights(counts[j], out.global_factors)});
  }
  return out;
}

WeightedDoc weight_document(const RawDoc& doc, const TermDictionary& dictionary,
                            std::span<const double> global_factors) {
  return {doc.id, local_weights(count_known_terms(doc.text, dictionary), global_factors)};
}

Query vectorize_query(std::string id, std::string_view text, const TermDictionary& dictionary,
                      std::span<const double> global_factors) {
  std::vector<SparseEntry> entries;
  for (const auto& [term, count] : count_known_terms(text, dictionary)) {
    const double w = static_cast<double>(count) * global_factors[term];
    if (w != 0.0) entries.push_back({term, w});
  }
  return {std::move(id), SparseVector(std::move(entries)).normalized()};
}

namespace {

std::string topic_term(std::size_t topic, std::size_t index) {
  std::ostringstream os;
  os << "tp" << topic << "w" << index;
  return os.str();
}

}  // namespace

SyntheticCorpus generate_synthetic(const SyntheticParams& p) {
  if (p.topics < 1 || p.docs_per_topic < 1 || p.vocab_per_topic < 1 || p.doc_length < 1 ||
      p.query_length < 1) {
    throw ParameterError("generate_synthetic: counts must be >= 1");
  }
  if (!(p.overlap_fraction >= 0.0 && p.overlap_fraction <= 1.0)) {
    throw ParameterError("generate_synthetic: overlap_fraction must lie in [0, 1]");
  }
  if (!(p.background_rate >= 0.0 && p.background_rate < 1.0)) {
    throw ParameterError("generate_synthetic: background_rate must lie in [0, 1)");
  }
  const std::size_t core = std::min(p.core_terms, p.vocab_per_topic);
  const std::size_t shared =
      p.topics >= 2 ? static_cast<std::size_t>(std::floor(p.overlap_fraction *
                                                          static_cast<double>(p.vocab_per_topic)))
                    : 0;
  if (core < 1) throw ParameterError("generate_synthetic: vocabulary exhausted (no core terms)");
  if (shared + core > p.vocab_per_topic) {
    throw ParameterError("generate_synthetic: vocabulary exhausted (shared terms overlap the " +
                         std::to_string(core) + " core terms)");
  }
  if (p.polysemy_terms > 0 && p.topics < 2) {
    throw ParameterError("generate_synthetic: polysemy needs at least two topics");
  }

  std::mt19937_64 rng(p.seed);
  SyntheticCorpus out;

  // Topic vocabularies in sampling-rank order: core terms, polysemous terms,
  // the remaining own terms, then terms borrowed from the previous topic.
  std::vector<std::vector<std::string>> own(p.topics);
  for (std::size_t t = 0; t < p.topics; ++t)
    for (std::size_t j = 0; j < p.vocab_per_topic; ++j) own[t].push_back(topic_term(t, j));

  std::vector<std::vector<std::string>> poly(p.topics);
  for (std::size_t j = 0; j < p.polysemy_terms; ++j) {
    const std::size_t a = j % p.topics;
    const std::size_t b = (a + std::max<std::size_t>(1, p.topics / 2)) % p.topics;
    const std::string term = "poly" + std::to_string(j);
    poly[a].push_back(term);
    poly[b].push_back(term);
  }

  out.topic_vocabularies.resize(p.topics);
  for (std::size_t t = 0; t < p.topics; ++t) {
    auto& vocab = out.topic_vocabularies[t];
    vocab.insert(vocab.end(), own[t].begin(), own[t].begin() + static_cast<std::ptrdiff_t>(core));
    vocab.insert(vocab.end(), poly[t].begin(), poly[t].end());
    vocab.insert(vocab.end(), own[t].begin() + static_cast<std::ptrdiff_t>(core), own[t].end());
    if (shared > 0) {
      const std::size_t prev = (t + p.topics - 1) % p.topics;
      if (prev != t) {
        vocab.insert(vocab.end(), own[prev].end() - static_cast<std::ptrdiff_t>(shared),
                     own[prev].end());
      }
    }
  }

  std::vector<std::string> background;
  for (std::size_t j = 0; j < p.background_terms; ++j) background.push_back("bg" + std::to_string(j));

  std::bernoulli_distribution use_background(background.empty() ? 0.0 : p.background_rate);
  struct Pending {
    std::size_t topic;
    std::string text;
  };
  std::vector<Pending> pending;
  pending.reserve(p.topics * p.docs_per_topic);
  for (std::size_t t = 0; t < p.topics; ++t) {
    const auto& vocab = out.topic_vocabularies[t];
    std::vector<double> zipf(vocab.size());
    for (std::size_t r = 0; r < vocab.size(); ++r) zipf[r] = 1.0 / std::pow(static_cast<double>(r + 1), 0.7);
    std::discrete_distribution<std::size_t> pick_topic_term(zipf.begin(), zipf.end());
    std::uniform_int_distribution<std::size_t> pick_background(0, background.empty() ? 0 : background.size() - 1);
    for (std::size_t d = 0; d < p.docs_per_topic; ++d) {
      std::string text;
      for (std::size_t i = 0; i < p.doc_length; ++i) {
        if (!text.empty()) text.push_back(' ');
        if (use_background(rng)) {
          text += background[pick_background(rng)];
        } else {
          text += vocab[pick_topic_term(rng)];
        }
      }
      pending.push_back({t, std::move(text)});
    }
  }
  std::shuffle(pending.begin(), pending.end(), rng);

  const std::size_t width = std::to_string(pending.size()).size();
  for (std::size_t i = 0; i < pending.size(); ++i) {
    std::string num = std::to_string(i);
    std::string id = "d" + std::string(width - num.size(), '0') + num;
    out.qrels.set("q" + std::to_string(pending[i].topic), id, 1);
    out.docs.push_back({std::move(id), std::move(pending[i].text)});
    out.doc_topics.push_back(pending[i].topic);
  }

  for (std::size_t t = 0; t < p.topics; ++t) {
    std::vector<std::string> candidates(own[t].begin(), own[t].begin() + static_cast<std::ptrdiff_t>(core));
    candidates.insert(candidates.end(), poly[t].begin(), poly[t].end());
    if (p.query_length > candidates.size()) {
      throw ParameterError("generate_synthetic: vocabulary exhausted (query_length " +
                           std::to_string(p.query_length) + " > " +
                           std::to_string(candidates.size()) + " query candidates)");
    }
    std::shuffle(candidates.begin(), candidates.end(), rng);
    std::sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(p.query_length));
    std::string text;
    for (std::size_t i = 0; i < p.query_length; ++i) {
      if (i > 0) text.push_back(' ');
      text += candidates[i];
    }
    out.queries.push_back({"q" + std::to_string(t), std::move(text)});
  }
  return out;
}

std::vector<RawDoc> load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<RawDoc> docs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      auto j = nlohmann::json::parse(line);
      docs.push_back({j.at("id").get<std::string>(), j.at("text").get<std::string>()});
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return docs;
}

void save_corpus(const std::filesystem::path& path, std::span<const RawDoc> docs) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  for (const auto& d : docs) out << nlohmann::json{{"id", d.id}, {"text", d.text}}.dump() << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

Qrels load_qrels(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  Qrels qrels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string q;
    std::string d;
    std::string g;
    std::string extra;
    if (!(fields >> q)) continue;
    if (!(fields >> d >> g) || (fields >> extra)) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) +
                       ": expected \"query-id doc-id grade\"");
    }
    int grade = 0;
    std::size_t used = 0;
    try {
      grade = std::stoi(g, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != g.size() || grade < 0) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": bad grade \"" + g + "\"");
    }
    qrels.set(q, d, grade);
  }
  return qrels;
}

void save_qrels(const std::filesystem::path& path, const Qrels& qrels) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  for (const auto& [q, docs] : qrels.judgments())
    for (const auto& [d, g] : docs) out << q << ' ' << d << ' ' << g << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace cdlsi::corpus
