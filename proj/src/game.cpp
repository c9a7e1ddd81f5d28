#include "clem/game.hpp"

#include <algorithm>
#include <mutex>

#include "clem/taboo.hpp"
#include "clem/wordle.hpp"

namespace fs = std::filesystem;

namespace clem {

Game::Game(GameSpec spec, GameOptions options) : spec_(std::move(spec)), options_(std::move(options)) {
  std::error_code ec;
  for (const auto& lang : spec_.languages) {
    auto dir = spec_.template_root / lang;
    if (fs::is_directory(dir, ec)) templates_.emplace(lang, TemplateSet::load(dir));
  }
}

void Game::set_options(GameOptions options) {
  auto& dict = options.dictionary;
  std::sort(dict.begin(), dict.end());
  dict.erase(std::unique(dict.begin(), dict.end()), dict.end());
  options_ = std::move(options);
}

std::vector<Experiment> Game::generate_programmatic(int, std::uint64_t, const std::string&) const {
  throw UnsupportedOperation("game '" + name() + "' has no programmatic instance generator");
}

const TemplateSet& Game::templates(const std::string& lang) const {
  auto it = templates_.find(lang);
  if (it == templates_.end()) {
    throw ValidationError("game '" + name() + "' has no templates for language '" + lang + "'");
  }
  return it->second;
}

double speed_quality(const EpisodeRecord& record) {
  switch (record.outcome) {
    case Outcome::aborted:
      throw ValidationError("aborted episodes have no quality score");
    case Outcome::lost:
      return 0.0;
    case Outcome::success:
      if (record.final_turn < 1) throw ValidationError("success record with final_turn < 1");
      return 100.0 / record.final_turn;
  }
  return 0.0;
}

namespace {

struct FactoryRegistry {
  std::mutex mu;
  std::map<std::string, GameFactory> factories;

  FactoryRegistry() {
    factories["taboo"] = [](GameSpec s) { return std::make_unique<TabooGame>(std::move(s)); };
    factories["wordle"] = [](GameSpec s) { return std::make_unique<WordleGame>(std::move(s)); };
  }
};

FactoryRegistry& factories() {
  static FactoryRegistry registry;
  return registry;
}

}  // namespace

void register_game(const std::string& game_name, GameFactory factory) {
  auto& reg = factories();
  std::lock_guard lock(reg.mu);
  reg.factories[game_name] = std::move(factory);
}

GameCatalog GameCatalog::load(const fs::path& games_dir) {
  std::error_code ec;
  if (!fs::is_directory(games_dir, ec)) throw IoError("games directory " + games_dir.string() + " not found");
  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(games_dir)) {
    if (entry.is_directory() && fs::is_regular_file(entry.path() / "clemgame.json")) dirs.push_back(entry.path());
  }
  std::sort(dirs.begin(), dirs.end());

  GameCatalog catalog;
  auto& reg = factories();
  for (const auto& dir : dirs) {
    GameSpec spec = load_game_spec(dir);
    GameFactory factory;
    {
      std::lock_guard lock(reg.mu);
      auto it = reg.factories.find(spec.game_name);
      if (it == reg.factories.end()) continue;
      factory = it->second;
    }
    catalog.add(factory(std::move(spec)));
  }
  return catalog;
}

const Game& GameCatalog::get(std::string_view name) const {
  auto it = games_.find(name);
  if (it == games_.end()) {
    auto known = names();
    std::string msg = "unknown game '" + std::string(name) + "'; available games:";
    for (const auto& n : known) msg += " " + n;
    throw UnknownNameError(msg, std::move(known));
  }
  return *it->second;
}

Game& GameCatalog::get_mutable(std::string_view name) {
  return const_cast<Game&>(std::as_const(*this).get(name));
}

std::vector<std::string> GameCatalog::names() const {
  std::vector<std::string> out;
  for (const auto& [name, _] : games_) out.push_back(name);
  return out;
}

void GameCatalog::add(std::unique_ptr<Game> game) {
  auto name = game->name();
  if (!games_.emplace(name, std::move(game)).second) {
    throw ValidationError("duplicate game_name '" + name + "' in game collection");
  }
}

}  // namespace clem
