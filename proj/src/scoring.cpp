#include "clem/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

namespace clem {

void to_json(Json& j, const EpisodeScores& s) {
  Json episode = {{"Aborted", s.aborted},
                  {"Lose", s.lose},
                  {"Success", s.success},
                  {"Request Count", s.request_count},
                  {"Parsed Request Count", s.parsed_request_count},
                  {"Violated Request Count", s.violated_request_count}};
  if (s.quality) episode["Quality"] = *s.quality;
  Json turns = Json::object();
  for (const auto& [turn, ts] : s.turns) {
    turns[std::to_string(turn)] = {{"requests", ts.requests}, {"violations", ts.violations}};
  }
  j = Json{{"episode scores", episode}, {"turn scores", turns}};
}

void from_json(const Json& j, EpisodeScores& s) {
  const auto& e = j.at("episode scores");
  s.aborted = e.at("Aborted").get<int>();
  s.lose = e.at("Lose").get<int>();
  s.success = e.at("Success").get<int>();
  s.request_count = e.at("Request Count").get<int>();
  s.parsed_request_count = e.at("Parsed Request Count").get<int>();
  s.violated_request_count = e.at("Violated Request Count").get<int>();
  s.quality.reset();
  if (e.contains("Quality") && !e["Quality"].is_null()) s.quality = e["Quality"].get<double>();
  s.turns.clear();
  const Json turns = j.value("turn scores", Json::object());
  for (const auto& [key, ts] : turns.items()) {
    s.turns[std::stoi(key)] = TurnScores{ts.at("requests").get<int>(), ts.at("violations").get<int>()};
  }
}

std::vector<std::string> check_invariants(const EpisodeScores& s) {
  std::vector<std::string> problems;
  if (!OutcomeTriple{s.aborted, s.lose, s.success}.valid()) {
    problems.emplace_back("exactly one of Aborted/Lose/Success must be 1");
  }
  if (s.parsed_request_count + s.violated_request_count != s.request_count) {
    problems.emplace_back("Parsed + Violated must equal Request Count");
  }
  if (s.quality.has_value() == (s.aborted == 1)) problems.emplace_back("Quality must be present iff not aborted");
  if (s.quality && !(*s.quality >= 0.0 && *s.quality <= 100.0)) problems.emplace_back("Quality outside [0, 100]");
  return problems;
}

EpisodeScores score_episode(const EpisodeRecord& record, const QualityFn& quality) {
  if (auto problems = check_event_log(record); !problems.empty()) {
    throw ValidationError("cannot score episode " + record.game_name + "/" + record.experiment_name + "/" +
                          std::to_string(record.instance_id) + ": " + problems.front());
  }
  EpisodeScores s;
  auto triple = OutcomeTriple::from(record.outcome);
  s.aborted = triple.aborted;
  s.lose = triple.lost;
  s.success = triple.success;

  for (const auto& ev : record.events) {
    switch (ev.kind) {
      case EventKind::get_response:
        ++s.request_count;
        ++s.turns[ev.turn].requests;
        break;
      case EventKind::parse_ok:
        ++s.parsed_request_count;
        break;
      case EventKind::violation:
        if (ev.content.is_object() && ev.content.value("type", std::string{}) == "format") {
          ++s.violated_request_count;
        }
        ++s.turns[ev.turn].violations;
        break;
      default:
        break;
    }
  }
  if (!s.aborted) {
    double q = quality(record);
    if (!(q >= 0.0 && q <= 100.0)) throw ValidationError("game quality " + std::to_string(q) + " outside [0, 100]");
    s.quality = q;
  }
  return s;
}

EpisodeScores score_episode(const EpisodeRecord& record, const Game& game) {
  return score_episode(record, [&game](const EpisodeRecord& r) { return game.score_episode(r); });
}

GameResult aggregate_game(std::string game_name, std::span<const EpisodeScores> scores) {
  if (scores.empty()) throw ValidationError("cannot aggregate game '" + game_name + "' over zero episodes");
  GameResult out;
  out.game_name = std::move(game_name);
  out.n_episodes = static_cast<int>(scores.size());

  int aborted = 0;
  std::vector<double> qualities;
  for (const auto& s : scores) {
    if (auto problems = check_invariants(s); !problems.empty()) {
      throw ValidationError("invalid episode scores: " + problems.front());
    }
    aborted += s.aborted;
    if (s.quality) qualities.push_back(*s.quality);
  }
  out.pct_played = 100.0 * (1.0 - static_cast<double>(aborted) / static_cast<double>(scores.size()));
  if (qualities.empty()) {
    out.clemscore_game = 0.0;
    return out;
  }
  std::sort(qualities.begin(), qualities.end());
  double sum = 0.0;
  for (double q : qualities) sum += q;
  double mean = sum / static_cast<double>(qualities.size());
  double sq = 0.0;
  for (double q : qualities) sq += (q - mean) * (q - mean);
  out.quality_mean = mean;
  out.quality_stddev = std::sqrt(sq / static_cast<double>(qualities.size()));
  out.clemscore_game = out.pct_played * mean / 100.0;
  return out;
}

BenchmarkResult aggregate_benchmark(std::string model_pair_id, std::vector<GameResult> games) {
  if (games.empty()) throw ValidationError("cannot aggregate a benchmark over zero games");
  std::sort(games.begin(), games.end(), [](const GameResult& a, const GameResult& b) {
    return a.game_name < b.game_name;
  });
  double sum = 0.0;
  for (const auto& g : games) sum += g.clemscore_game;
  BenchmarkResult out;
  out.model_pair_id = std::move(model_pair_id);
  out.clemscore = sum / static_cast<double>(games.size());
  out.games = std::move(games);
  return out;
}

void to_json(Json& j, const GameResult& r) {
  j = Json{{"game_name", r.game_name},
           {"n_episodes", r.n_episodes},
           {"pct_played", r.pct_played},
           {"quality_mean", r.quality_mean ? Json(*r.quality_mean) : Json()},
           {"quality_stddev", r.quality_stddev ? Json(*r.quality_stddev) : Json()},
           {"clemscore_game", r.clemscore_game}};
}

void from_json(const Json& j, GameResult& r) {
  r.game_name = j.at("game_name").get<std::string>();
  r.n_episodes = j.at("n_episodes").get<int>();
  r.pct_played = j.at("pct_played").get<double>();
  r.quality_mean.reset();
  r.quality_stddev.reset();
  if (!j.at("quality_mean").is_null()) r.quality_mean = j["quality_mean"].get<double>();
  if (!j.at("quality_stddev").is_null()) r.quality_stddev = j["quality_stddev"].get<double>();
  r.clemscore_game = j.at("clemscore_game").get<double>();
}

void to_json(Json& j, const BenchmarkResult& r) {
  j = Json{{"model_pair_id", r.model_pair_id}, {"games", r.games}, {"clemscore", r.clemscore}};
}

void from_json(const Json& j, BenchmarkResult& r) {
  r.model_pair_id = j.at("model_pair_id").get<std::string>();
  r.games = j.at("games").get<std::vector<GameResult>>();
  r.clemscore = j.at("clemscore").get<double>();
}

namespace {

std::string fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string md_cell(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '|') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

Leaderboard render_leaderboard(std::vector<BenchmarkResult> results) {
  std::sort(results.begin(), results.end(), [](const BenchmarkResult& a, const BenchmarkResult& b) {
    if (a.clemscore != b.clemscore) return a.clemscore > b.clemscore;
    return a.model_pair_id < b.model_pair_id;
  });
  std::set<std::string> game_set;
  for (const auto& r : results) {
    for (const auto& g : r.games) game_set.insert(g.game_name);
  }
  std::vector<std::string> header = {"model_pair_id", "clemscore"};
  header.insert(header.end(), game_set.begin(), game_set.end());

  std::vector<std::vector<std::string>> rows;
  for (const auto& r : results) {
    std::vector<std::string> row = {r.model_pair_id, fixed2(r.clemscore)};
    for (const auto& name : game_set) {
      auto it = std::find_if(r.games.begin(), r.games.end(), [&](const GameResult& g) { return g.game_name == name; });
      row.push_back(it == r.games.end() ? std::string{} : fixed2(it->clemscore_game));
    }
    rows.push_back(std::move(row));
  }

  Leaderboard out;
  auto emit_csv = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out.csv += ',';
      out.csv += csv_field(cells[i]);
    }
    out.csv += '\n';
  };
  auto emit_md = [&](const std::vector<std::string>& cells) {
    out.markdown += '|';
    for (const auto& c : cells) out.markdown += " " + md_cell(c) + " |";
    out.markdown += '\n';
  };
  emit_csv(header);
  emit_md(header);
  out.markdown += '|';
  for (std::size_t i = 0; i < header.size(); ++i) out.markdown += i == 0 ? " --- |" : " ---: |";
  out.markdown += '\n';
  for (const auto& row : rows) {
    emit_csv(row);
    emit_md(row);
  }
  return out;
}

}  // namespace clem
