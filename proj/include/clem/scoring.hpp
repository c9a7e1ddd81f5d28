#pragma once

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "clem/core.hpp"
#include "clem/game.hpp"

namespace clem {

struct TurnScores {
  int requests = 0;
  int violations = 0;

  friend bool operator==(const TurnScores&, const TurnScores&) = default;
};

struct EpisodeScores {
  int aborted = 0;
  int lose = 0;
  int success = 0;
  std::optional<double> quality;  // absent iff aborted
  int request_count = 0;
  int parsed_request_count = 0;
  int violated_request_count = 0;
  std::map<int, TurnScores> turns;

  friend bool operator==(const EpisodeScores&, const EpisodeScores&) = default;
};

// Serialized as {"episode scores": {"Aborted", "Lose", "Success", "Quality",
// "Request Count", "Parsed Request Count", "Violated Request Count"},
// "turn scores": {"<turn>": {"requests", "violations"}}}.
void to_json(Json& j, const EpisodeScores& scores);
void from_json(const Json& j, EpisodeScores& scores);
std::vector<std::string> check_invariants(const EpisodeScores& scores);

using QualityFn = std::function<double(const EpisodeRecord&)>;

// Throws ValidationError for records without exactly one terminal event.
EpisodeScores score_episode(const EpisodeRecord& record, const QualityFn& quality);
EpisodeScores score_episode(const EpisodeRecord& record, const Game& game);

struct GameResult {
  std::string game_name;
  int n_episodes = 0;
  double pct_played = 0.0;
  std::optional<double> quality_mean;    // over played episodes
  std::optional<double> quality_stddev;  // population
  double clemscore_game = 0.0;

  friend bool operator==(const GameResult&, const GameResult&) = default;
};

struct BenchmarkResult {
  std::string model_pair_id;
  std::vector<GameResult> games;  // sorted by game_name
  double clemscore = 0.0;

  friend bool operator==(const BenchmarkResult&, const BenchmarkResult&) = default;
};

void to_json(Json& j, const GameResult& result);
void from_json(const Json& j, GameResult& result);
void to_json(Json& j, const BenchmarkResult& result);
void from_json(const Json& j, BenchmarkResult& result);

// pct_played = 100 * (1 - mean(Aborted)); clemscore_game = pct_played *
// quality_mean / 100, or 0 when nothing was played. Sums run over sorted
// values so the result does not depend on input order.
GameResult aggregate_game(std::string game_name, std::span<const EpisodeScores> scores);

// Unweighted mean of clemscore_game over games.
BenchmarkResult aggregate_benchmark(std::string model_pair_id, std::vector<GameResult> games);

struct Leaderboard {
  std::string csv;
  std::string markdown;
};

// Rows by clemscore descending, ties by model_pair_id. Columns:
// model_pair_id, clemscore, then one clemscore_game column per game name.
Leaderboard render_leaderboard(std::vector<BenchmarkResult> results);

}  // namespace clem
