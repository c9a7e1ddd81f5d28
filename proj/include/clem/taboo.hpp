#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "clem/game.hpp"

namespace clem {

struct TabooState {
  std::string target_word;
  std::vector<std::string> related_words;
  int turn = 1;
  int max_turns = 3;
};

// Problems with a state's words (lowercase, non-empty, single tokens, three
// related words distinct from the target).
std::vector<std::string> check_invariants(const TabooState& state);

// Lowercase tokens of `text`, split at every ASCII character that is not a
// letter or digit. Bytes >= 0x80 stay inside tokens.
std::vector<std::string> taboo_tokens(std::string_view text);

// Returns the first taboo word (target, then related words in order) that
// some clue token equals or starts with. A word ending in consonant + "y"
// also matches tokens starting with its "i" stem ("uglier" for "ugly").
std::optional<std::string> taboo_validate_clue(std::string_view clue, const TabooState& state);

bool taboo_check_guess(std::string_view guess, const TabooState& state);

// 100/t for success at turn t, 0 for a loss.
double taboo_score(const EpisodeRecord& record);

class TabooGame : public Game {
 public:
  using Game::Game;

  std::vector<std::string> required_templates() const override;
  std::vector<std::string> check_params(const Instance& instance) const override;
  std::unique_ptr<GameHooks> start(const Instance& instance, const std::string& lang) const override;
  double score_episode(const EpisodeRecord& record) const override { return taboo_score(record); }

  static constexpr int kDefaultMaxTurns = 3;
};

}  // namespace clem
