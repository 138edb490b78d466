#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "cdlsi/corpus.hpp"
#include "cdlsi/experiment.hpp"
#include "cdlsi/peer_index.hpp"

namespace cdlsi {

/// Every setting a command can take. Grid-valued keys hold lists; commands
/// that need a single value use the first element.
struct Config {
  std::filesystem::path corpus;
  std::filesystem::path queries;
  std::filesystem::path qrels;
  std::filesystem::path output = "cdlsi-out";

  std::size_t peers = 50;
  /// "uniform" (round-robin) or "by-file" (one JSONL per peer in a directory).
  std::string assignment = "uniform";

  std::vector<std::size_t> clusters{20};
  std::vector<double> epsilons{5.0};
  /// Fixed ranks; when non-empty, single-index commands truncate by rank.
  std::vector<std::size_t> ranks;
  std::vector<std::size_t> hs{10};
  std::vector<double> deltas{0.05};
  std::vector<std::size_t> casts{10};
  std::size_t top_n = 10;
  double rebuild_fraction = 0.1;
  std::vector<std::uint64_t> seeds{1};
  std::vector<std::string> methods{"cdlsi", "ggloss"};
  bool relations = true;
  std::size_t max_iters = clustering::kDefaultMaxIters;
  std::size_t threads = 1;

  double initial_fraction = 0.7;
  double step_fraction = 0.05;

  corpus::SyntheticParams synthetic;

  /// Checks legal ranges. ConfigError naming the key on failure.
  void validate() const;

  [[nodiscard]] peer::IndexParams index_params() const;
  [[nodiscard]] eval::SweepConfig sweep_config() const;
  [[nodiscard]] eval::UpdateConfig update_config() const;
};

using KeyValues = std::map<std::string, std::string, std::less<>>;

/// Parses "key = value" lines; '#' starts a comment. ParseError with the
/// line number on malformed input.
[[nodiscard]] KeyValues parse_key_values(std::string_view text);
[[nodiscard]] KeyValues load_key_values(const std::filesystem::path& path);

/// Applies values over `base`. ConfigError for unknown keys or bad values.
[[nodiscard]] Config apply_config(Config base, const KeyValues& values);

/// All known keys, in output order.
[[nodiscard]] std::vector<std::string> config_keys();

/// Effective configuration as key=value lines, re-readable by `apply_config`.
[[nodiscard]] KeyValues to_key_values(const Config& config);
[[nodiscard]] std::string format_config(const Config& config);

}  // namespace cdlsi
