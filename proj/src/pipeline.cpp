#include "clem/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <ostream>
#include <thread>

#include "clem/instancegen.hpp"
#include "clem/serialize.hpp"
#include "clem/transcript.hpp"

namespace fs = std::filesystem;

namespace clem {

std::string format_temperature(double t) {
  char buf[64];
  for (int precision = 1; precision <= 6; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*f", precision, t);
    if (std::strtod(buf, nullptr) == t) return buf;
  }
  std::snprintf(buf, sizeof buf, "%.17g", t);
  return buf;
}

std::string model_pair_id(const std::vector<ModelSpec>& models) {
  if (models.empty()) throw ValidationError("model pair needs at least one model");
  const ModelSpec& a = models.front();
  const ModelSpec& b = models.size() > 1 ? models[1] : models.front();
  return a.model_name + "-t" + format_temperature(a.temperature) + "--" + b.model_name + "-t" +
         format_temperature(b.temperature);
}

fs::path episode_dir(const fs::path& results_dir, const std::string& pair_id, const std::string& game,
                     const std::string& experiment, std::int64_t instance_id) {
  return results_dir / pair_id / game / experiment / ("episode_" + std::to_string(instance_id));
}

bool write_if_changed(const fs::path& path, const std::string& bytes) {
  std::error_code ec;
  if (fs::is_regular_file(path, ec)) {
    try {
      if (read_file(path) == bytes) return false;
    } catch (const IoError&) {
    }
  }
  write_file_atomic(path, bytes);
  return true;
}

namespace {

struct Task {
  const Game* game;
  std::string lang;
  std::string experiment;
  Instance instance;
};

bool has_terminal_record(const fs::path& path) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) return false;
  try {
    auto record = deserialize<EpisodeRecord>(read_file(path));
    return check_event_log(record).empty();
  } catch (const std::exception&) {
    return false;
  }
}

std::vector<Experiment> instances_for(const Game& game, const RunOptions& options) {
  if (options.instances) return load_instance_file(*options.instances);
  std::vector<Experiment> all;
  std::error_code ec;
  for (const auto& lang : game.spec().languages) {
    auto path = instance_file_path(game.directory(), lang, game.spec().version);
    if (!fs::is_regular_file(path, ec)) continue;
    auto exps = load_instance_file(path);
    all.insert(all.end(), exps.begin(), exps.end());
  }
  if (all.empty()) {
    throw IoError("game '" + game.name() + "' has no instance file for version " + game.spec().version);
  }
  return all;
}

std::string cause_of(const EpisodeRecord& record) {
  for (auto it = record.events.rbegin(); it != record.events.rend(); ++it) {
    if (it->kind == EventKind::abort && it->content.is_object()) return it->content.value("cause", std::string{});
  }
  return {};
}

}  // namespace

RunSummary run_benchmark(const GameCatalog& games, const ModelRegistry& registry, BackendPool& pool,
                         const RunOptions& options, std::ostream& log) {
  if (options.models.empty() || options.models.size() > 2) {
    throw ValidationError("run needs one or two models, got " + std::to_string(options.models.size()));
  }
  std::vector<ModelSpec> models;
  for (const auto& name : options.models) {
    ModelSpec spec = registry.resolve(name);
    if (options.temperature) spec.temperature = *options.temperature;
    models.push_back(std::move(spec));
  }
  const std::string pair_id = model_pair_id(models);

  std::vector<const Game*> selected;
  if (options.games.size() == 1 && options.games.front() == "all") {
    for (const auto& name : games.names()) selected.push_back(&games.get(name));
  } else {
    for (const auto& name : options.games) selected.push_back(&games.get(name));
  }
  if (options.instances && selected.size() != 1) {
    throw ValidationError("--instances needs exactly one selected game");
  }

  std::vector<Task> tasks;
  for (const Game* game : selected) {
    for (const auto& exp : instances_for(*game, options)) {
      if (exp.game_name != game->name()) {
        throw ValidationError("instance file lists experiment for game '" + exp.game_name + "' under '" +
                              game->name() + "'");
      }
      if (!options.experiments.empty() &&
          std::find(options.experiments.begin(), options.experiments.end(), exp.experiment_name) ==
              options.experiments.end()) {
        continue;
      }
      for (const auto& inst : exp.instances) {
        if (auto problems = game->check_params(inst); !problems.empty()) {
          throw ValidationError(game->name() + "/" + exp.experiment_name + " instance " +
                                std::to_string(inst.instance_id) + ": " + problems.front());
        }
        tasks.push_back(Task{game, exp.language, exp.experiment_name, inst});
      }
    }
  }

  RunSummary summary;
  std::mutex mu;
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::exception_ptr failure;

  auto worker = [&] {
    for (;;) {
      if (stop.load()) return;
      std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      const Task& task = tasks[i];
      const Game& game = *task.game;
      fs::path dir = episode_dir(options.results_dir, pair_id, game.name(), task.experiment, task.instance.instance_id);
      if (has_terminal_record(dir / "interactions.json")) {
        std::lock_guard lock(mu);
        ++summary.skipped;
        continue;
      }

      EpisodeRecord record;
      bool game_failure = false;
      try {
        std::map<std::string, Player> players;
        const auto& roles = game.spec().roles;
        for (std::size_t r = 0; r < roles.size(); ++r) {
          const ModelSpec& spec = models[std::min(r, models.size() - 1)];
          players[roles[r]] = Player{spec.model_name, pool.get(spec)};
        }
        EngineConfig cfg;
        cfg.max_reprompts = options.max_reprompts;
        cfg.relay_mode = options.relay_mode;
        cfg.seed = options.seed;
        cfg.strict = options.strict;
        EpisodeId id{game.name(), task.experiment, task.instance.instance_id,
                     (fs::path(pair_id) / game.name() / task.experiment / std::to_string(task.instance.instance_id)).string()};
        auto hooks = game.start(task.instance, task.lang);
        record = run_episode(*hooks, id, players, cfg);
      } catch (const EpisodeFailure& e) {
        record = e.record();
        game_failure = true;
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
        stop = true;
      } catch (const std::exception& e) {
        // The episode could not be set up, so there is no record to persist.
        std::lock_guard lock(mu);
        ++summary.game_errors;
        log << "episode " << dir.string() << " not played: " << e.what() << "\n";
        if (options.strict) {
          if (!failure) failure = std::current_exception();
          stop = true;
        }
        continue;
      }

      try {
        write_file_atomic(dir / "instance.json", canonical_dump(Json(task.instance)));
        write_file_atomic(dir / "interactions.json", canonical_serialize(record));
      } catch (const std::exception& e) {
        std::lock_guard lock(mu);
        log << "cannot persist " << dir.string() << ": " << e.what() << "\n";
        if (!failure) failure = std::current_exception();
        stop = true;
        continue;
      }

      std::lock_guard lock(mu);
      ++summary.played;
      switch (record.outcome) {
        case Outcome::success: ++summary.success; break;
        case Outcome::lost: ++summary.lost; break;
        case Outcome::aborted: {
          ++summary.aborted;
          auto cause = cause_of(record);
          if (cause == "backend_error") {
            ++summary.backend_errors;
            log << "episode " << dir.string() << " aborted: backend_error\n";
          } else if (cause == "game_error" || game_failure) {
            ++summary.game_errors;
            log << "episode " << dir.string() << " aborted: game_error\n";
          }
          break;
        }
      }
    }
  };

  const int n_threads = std::max(1, std::min<int>(options.parallel, static_cast<int>(std::max<std::size_t>(tasks.size(), 1))));
  {
    std::vector<std::jthread> threads;
    for (int t = 1; t < n_threads; ++t) threads.emplace_back(worker);
    worker();
  }
  if (failure) std::rethrow_exception(failure);

  return summary;
}

std::vector<fs::path> find_interactions(const fs::path& results_dir) {
  std::vector<fs::path> out;
  std::error_code ec;
  if (!fs::is_directory(results_dir, ec)) return out;
  for (const auto& entry : fs::recursive_directory_iterator(results_dir)) {
    if (entry.is_regular_file() && entry.path().filename() == "interactions.json") out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

int transcribe_results(const fs::path& results_dir, std::ostream& log) {
  int written = 0;
  for (const auto& path : find_interactions(results_dir)) {
    auto html_path = path.parent_path() / "transcript.html";
    std::error_code ec;
    if (fs::exists(html_path, ec) && fs::last_write_time(html_path, ec) >= fs::last_write_time(path, ec)) continue;
    try {
      auto record = deserialize<EpisodeRecord>(read_file(path));
      write_file_atomic(html_path, transcribe_html(record));
      ++written;
    } catch (const Error& e) {
      log << "skipping " << path.string() << ": " << e.what() << "\n";
    }
  }
  return written;
}

int score_results(const fs::path& results_dir, const GameCatalog& games, std::ostream& log) {
  int scored = 0;
  for (const auto& path : find_interactions(results_dir)) {
    try {
      auto record = deserialize<EpisodeRecord>(read_file(path));
      auto scores = score_episode(record, games.get(record.game_name));
      write_if_changed(path.parent_path() / "scores.json", canonical_serialize(scores));
      ++scored;
    } catch (const Error& e) {
      log << "skipping " << path.string() << ": " << e.what() << "\n";
    }
  }
  return scored;
}

std::vector<BenchmarkResult> eval_results(const fs::path& results_dir, const GameCatalog& games, std::ostream& log) {
  // pair -> game -> episode scores
  std::map<std::string, std::map<std::string, std::vector<EpisodeScores>>> grouped;
  for (const auto& path : find_interactions(results_dir)) {
    auto rel = fs::relative(path, results_dir);
    std::vector<std::string> parts;
    for (const auto& p : rel) parts.push_back(p.string());
    if (parts.size() != 5) continue;  // pair/game/experiment/episode_k/interactions.json
    try {
      EpisodeScores scores;
      auto scores_path = path.parent_path() / "scores.json";
      std::error_code ec;
      if (fs::is_regular_file(scores_path, ec)) {
        scores = deserialize<EpisodeScores>(read_file(scores_path));
      } else {
        auto record = deserialize<EpisodeRecord>(read_file(path));
        scores = score_episode(record, games.get(record.game_name));
      }
      grouped[parts[0]][parts[1]].push_back(std::move(scores));
    } catch (const Error& e) {
      log << "skipping " << path.string() << ": " << e.what() << "\n";
    }
  }

  std::vector<BenchmarkResult> results;
  for (auto& [pair, by_game] : grouped) {
    std::vector<GameResult> game_results;
    for (auto& [game, scores] : by_game) game_results.push_back(aggregate_game(game, scores));
    results.push_back(aggregate_benchmark(pair, std::move(game_results)));
  }
  if (results.empty()) {
    log << "no scored episodes under " << results_dir.string() << "\n";
    return results;
  }
  auto board = render_leaderboard(results);
  write_if_changed(results_dir / "results.json", canonical_dump(Json(results)));
  write_if_changed(results_dir / "results.csv", board.csv);
  write_if_changed(results_dir / "results.md", board.markdown);
  return results;
}

}  // namespace clem
