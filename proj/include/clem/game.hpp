#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "clem/core.hpp"
#include "clem/engine.hpp"
#include "clem/game_spec.hpp"
#include "clem/templates.hpp"

namespace clem {

struct GameOptions {
  // Overrides the game's default turn limit.
  std::optional<int> max_turns;
  // Wordle: reject guesses outside this list (empty = no dictionary check).
  std::vector<std::string> dictionary;
};

// A playable game: static metadata, templates, instance schema and scoring.
// Safe to share between concurrently running episodes; per-episode state
// lives in the GameHooks returned by start().
class Game {
 public:
  Game(GameSpec spec, GameOptions options = {});
  virtual ~Game() = default;

  const GameSpec& spec() const { return spec_; }
  const std::string& name() const { return spec_.game_name; }
  std::filesystem::path directory() const { return spec_.template_root.parent_path(); }
  const GameOptions& options() const { return options_; }
  // Sorts and deduplicates the dictionary.
  void set_options(GameOptions options);

  // Templates beyond initial_{role}.template that must exist per language.
  virtual std::vector<std::string> required_templates() const { return {}; }
  ValidationReport validate() const { return validate_game_spec(spec_, required_templates()); }

  // Problems with an instance's params against this game's schema.
  virtual std::vector<std::string> check_params(const Instance& instance) const = 0;

  virtual std::unique_ptr<GameHooks> start(const Instance& instance, const std::string& lang) const = 0;

  // Quality in [0, 100]; throws ValidationError for aborted records.
  virtual double score_episode(const EpisodeRecord& record) const = 0;

  virtual bool has_programmatic_generator() const { return false; }
  virtual std::vector<Experiment> generate_programmatic(int n, std::uint64_t seed,
                                                        const std::string& lang) const;

  const TemplateSet& templates(const std::string& lang) const;

 protected:
  GameSpec spec_;
  GameOptions options_;
  std::map<std::string, TemplateSet> templates_;
};

// Quality for games that reward speed: 100/t on success at turn t, 0 on loss.
double speed_quality(const EpisodeRecord& record);

using GameFactory = std::function<std::unique_ptr<Game>(GameSpec)>;

// Built-in factories ("taboo", "wordle") are always available.
void register_game(const std::string& game_name, GameFactory factory);

class GameCatalog {
 public:
  // Loads every subdirectory of games_dir holding a clemgame.json whose
  // game_name has a registered factory.
  static GameCatalog load(const std::filesystem::path& games_dir);

  const Game& get(std::string_view name) const;
  Game& get_mutable(std::string_view name);
  std::vector<std::string> names() const;
  void add(std::unique_ptr<Game> game);

 private:
  std::map<std::string, std::unique_ptr<Game>, std::less<>> games_;
};

}  // namespace clem
