#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "clem/game.hpp"

namespace clem {

// Five lowercase ASCII letters.
bool is_wordle_word(std::string_view word);

// Per-letter feedback: 'g' right letter and position, 'y' letter occurs
// elsewhere, '-' otherwise. Greens consume their target letter first; the
// remaining letters are then handed out left to right, so repeated guess
// letters only score as often as the target contains them.
//
// Throws ValidationError unless both words satisfy is_wordle_word.
std::string wordle_feedback(std::string_view guess, std::string_view target);

struct WordleState {
  std::string target_word;
  std::vector<std::pair<std::string, std::string>> guesses;  // (guess, feedback)
  int max_turns = 6;
};

double wordle_score(const EpisodeRecord& record);

class WordleGame : public Game {
 public:
  using Game::Game;

  std::vector<std::string> required_templates() const override;
  std::vector<std::string> check_params(const Instance& instance) const override;
  std::unique_ptr<GameHooks> start(const Instance& instance, const std::string& lang) const override;
  double score_episode(const EpisodeRecord& record) const override { return wordle_score(record); }

  bool has_programmatic_generator() const override { return true; }
  // Stress set: targets drawn uniformly from a three-letter alphabet, which
  // forces heavy letter repetition.
  std::vector<Experiment> generate_programmatic(int n, std::uint64_t seed,
                                                const std::string& lang) const override;

  static constexpr int kDefaultMaxTurns = 6;
  static constexpr std::string_view kStressAlphabet = "abc";
};

}  // namespace clem
