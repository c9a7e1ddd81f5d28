#include "clem/wordle.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "clem/prng.hpp"

namespace clem {

bool is_wordle_word(std::string_view word) {
  return word.size() == 5 && std::all_of(word.begin(), word.end(), [](char c) { return c >= 'a' && c <= 'z'; });
}

std::string wordle_feedback(std::string_view guess, std::string_view target) {
  if (!is_wordle_word(guess) || !is_wordle_word(target)) {
    throw ValidationError("wordle feedback needs two 5-letter lowercase words, got '" + std::string(guess) +
                          "' and '" + std::string(target) + "'");
  }
  std::string out(5, '-');
  std::array<int, 26> unconsumed{};
  for (int i = 0; i < 5; ++i) {
    if (guess[i] == target[i]) {
      out[i] = 'g';
    } else {
      ++unconsumed[target[i] - 'a'];
    }
  }
  for (int i = 0; i < 5; ++i) {
    if (out[i] == 'g') continue;
    int& left = unconsumed[guess[i] - 'a'];
    if (left > 0) {
      out[i] = 'y';
      --left;
    }
  }
  return out;
}

double wordle_score(const EpisodeRecord& record) { return speed_quality(record); }

namespace {

constexpr const char* kGuesser = "guesser";

class WordleHooks : public GameHooks {
 public:
  WordleHooks(WordleState state, const TemplateSet& templates, const std::vector<std::string>& dictionary)
      : state_(std::move(state)), templates_(templates), dictionary_(dictionary) {}

  std::vector<std::string> roles() const override { return {kGuesser}; }
  int max_turns() const override { return state_.max_turns; }

  std::map<std::string, std::string> initial_prompts() override {
    return {{kGuesser, templates_.render("initial_guesser", {{"max_turns", std::to_string(state_.max_turns)}})}};
  }

  MoveGrammar grammar_for(const std::string&, int) const override { return {"GUESS: ", true, 100, true}; }

  std::optional<RuleViolation> validate(const ParsedMove& move) const override {
    std::string guess = normalize(move.payload);
    if (!is_wordle_word(guess)) return RuleViolation{"invalid_word"};
    if (!dictionary_.empty() && !std::binary_search(dictionary_.begin(), dictionary_.end(), guess)) {
      return RuleViolation{"not_in_dictionary"};
    }
    return std::nullopt;
  }

  Advance advance(const ParsedMove& move, int turn) override {
    std::string guess = normalize(move.payload);
    std::string feedback = wordle_feedback(guess, state_.target_word);
    state_.guesses.emplace_back(guess, feedback);
    if (feedback == "ggggg") return Terminal{Outcome::success, "solved"};
    if (turn >= state_.max_turns) return Terminal{Outcome::lost, "out_of_turns"};
    std::string text = templates_.render(
        "relay_guesser", {{"guess", guess}, {"feedback", feedback},
                          {"remaining", std::to_string(state_.max_turns - turn)}});
    return Continue{{Relay{kGuesser, std::move(text), feedback}}};
  }

 private:
  static std::string normalize(std::string_view payload) {
    std::string out(payload);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
  }

  WordleState state_;
  const TemplateSet& templates_;
  const std::vector<std::string>& dictionary_;
};

}  // namespace

std::vector<std::string> WordleGame::required_templates() const { return {"relay_guesser.template"}; }

std::vector<std::string> WordleGame::check_params(const Instance& instance) const {
  std::vector<std::string> problems;
  const auto& p = instance.params;
  if (!p.is_object()) return {"params must be an object"};
  for (const auto& [key, _] : p.items()) {
    if (key != "target_word") problems.push_back("unexpected param '" + key + "'");
  }
  if (!p.contains("target_word") || !p["target_word"].is_string() ||
      !is_wordle_word(p["target_word"].get<std::string>())) {
    problems.emplace_back("target_word must be a 5-letter lowercase a-z word");
  }
  return problems;
}

std::unique_ptr<GameHooks> WordleGame::start(const Instance& instance, const std::string& lang) const {
  if (auto problems = check_params(instance); !problems.empty()) {
    throw ValidationError("wordle instance " + std::to_string(instance.instance_id) + ": " + problems.front());
  }
  WordleState state;
  state.target_word = instance.params["target_word"].get<std::string>();
  state.max_turns = options_.max_turns.value_or(kDefaultMaxTurns);
  return std::make_unique<WordleHooks>(std::move(state), templates(lang), options_.dictionary);
}

std::vector<Experiment> WordleGame::generate_programmatic(int n, std::uint64_t seed, const std::string& lang) const {
  if (n <= 0) throw ValidationError("programmatic generation needs n > 0");
  Xoshiro256 rng(seed);
  Experiment exp{"0_stress_" + lang, name(), lang, {}};
  for (int i = 0; i < n; ++i) {
    std::string word;
    for (int k = 0; k < 5; ++k) word.push_back(kStressAlphabet[rng.below(kStressAlphabet.size())]);
    exp.instances.push_back(Instance{i, Json{{"target_word", word}}});
  }
  return {exp};
}

}  // namespace clem
