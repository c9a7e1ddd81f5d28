#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "clem/engine.hpp"
#include "clem/game.hpp"
#include "clem/registry.hpp"
#include "clem/scoring.hpp"

namespace clem {

// Results layout:
//   {results}/{modelA}-t{tA}--{modelB}-t{tB}/{game}/{experiment}/episode_{k}/
//       interactions.json  instance.json  transcript.html  scores.json

// Shortest decimal with at least one fractional digit: 0 -> "0.0".
std::string format_temperature(double t);
std::string model_pair_id(const std::vector<ModelSpec>& models);
std::filesystem::path episode_dir(const std::filesystem::path& results_dir, const std::string& pair_id,
                                  const std::string& game, const std::string& experiment, std::int64_t instance_id);

struct RunOptions {
  std::vector<std::string> games;   // names; {"all"} selects every game
  std::vector<std::string> models;  // one (self-play) or two
  std::optional<double> temperature;
  std::vector<std::string> experiments;  // empty = all
  std::filesystem::path results_dir = "results";
  // Overrides the game's bundled instance file (single game only).
  std::optional<std::filesystem::path> instances;
  std::uint64_t seed = 0;
  int parallel = 1;
  bool strict = false;
  int max_reprompts = 0;
  RelayMode relay_mode = RelayMode::templated;
};

struct RunSummary {
  int played = 0;
  int skipped = 0;  // already had a terminal interactions.json
  int success = 0;
  int lost = 0;
  int aborted = 0;
  int backend_errors = 0;
  int game_errors = 0;

  int failures() const { return backend_errors + game_errors; }
};

// Plays every selected instance into the results layout. Episodes with a
// terminal interactions.json already on disk are skipped. In strict mode a
// game error stops scheduling and is rethrown once running episodes finish.
RunSummary run_benchmark(const GameCatalog& games, const ModelRegistry& registry, BackendPool& pool,
                         const RunOptions& options, std::ostream& log);

// Every interactions.json under results_dir, sorted.
std::vector<std::filesystem::path> find_interactions(const std::filesystem::path& results_dir);

// Renders transcript.html where missing or older than interactions.json.
// Returns the number written.
int transcribe_results(const std::filesystem::path& results_dir, std::ostream& log);

// Writes scores.json for every episode; files whose bytes would not change
// are left alone. Returns the number of episodes scored.
int score_results(const std::filesystem::path& results_dir, const GameCatalog& games, std::ostream& log);

// Aggregates every model pair into results.json, results.csv and results.md
// at the top of results_dir.
std::vector<BenchmarkResult> eval_results(const std::filesystem::path& results_dir, const GameCatalog& games,
                                          std::ostream& log);

// Writes bytes unless the file already holds exactly them. Returns true if
// written.
bool write_if_changed(const std::filesystem::path& path, const std::string& bytes);

}  // namespace clem
