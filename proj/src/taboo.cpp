#include "clem/taboo.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace clem {

namespace {

bool is_word_byte(char c) {
  auto u = static_cast<unsigned char>(c);
  return u >= 0x80 || std::isalnum(u) != 0;
}

std::string lowercase(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool is_single_token(const std::string& w) {
  return !w.empty() && std::all_of(w.begin(), w.end(), [](char c) {
    return !std::isspace(static_cast<unsigned char>(c));
  });
}

}  // namespace

std::vector<std::string> check_invariants(const TabooState& state) {
  std::vector<std::string> problems;
  auto check_word = [&](const std::string& w, const char* what) {
    if (!is_single_token(w)) problems.push_back(std::string(what) + " '" + w + "' must be a non-empty single token");
    if (w != lowercase(w)) problems.push_back(std::string(what) + " '" + w + "' must be lowercase");
  };
  check_word(state.target_word, "target word");
  if (state.related_words.size() != 3) {
    problems.push_back("expected 3 related words, got " + std::to_string(state.related_words.size()));
  }
  for (const auto& w : state.related_words) {
    check_word(w, "related word");
    if (w == state.target_word) problems.push_back("target word '" + w + "' listed as related word");
  }
  if (state.max_turns < 1) problems.emplace_back("max_turns must be positive");
  return problems;
}

std::vector<std::string> taboo_tokens(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char c : text) {
    if (is_word_byte(c)) {
      current.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::optional<std::string> taboo_validate_clue(std::string_view clue, const TabooState& state) {
  auto tokens = taboo_tokens(clue);
  std::vector<std::string> taboo{state.target_word};
  taboo.insert(taboo.end(), state.related_words.begin(), state.related_words.end());
  for (const auto& word : taboo) {
    // consonant + y also matches the y -> i stem: ugly / uglier, ugliness
    std::string stem;
    if (word.size() >= 3 && word.back() == 'y' &&
        std::string_view("aeiou").find(word[word.size() - 2]) == std::string_view::npos) {
      stem = word.substr(0, word.size() - 1) + "i";
    }
    for (const auto& token : tokens) {
      if (token.starts_with(word) || (!stem.empty() && token.starts_with(stem))) return word;
    }
  }
  return std::nullopt;
}

bool taboo_check_guess(std::string_view guess, const TabooState& state) {
  std::string normalized;
  for (char c : guess) {
    if (is_word_byte(c)) normalized.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return normalized == state.target_word;
}

double taboo_score(const EpisodeRecord& record) { return speed_quality(record); }

namespace {

constexpr const char* kDescriber = "describer";
constexpr const char* kGuesser = "guesser";

class TabooHooks : public GameHooks {
 public:
  TabooHooks(TabooState state, const TemplateSet& templates, std::vector<std::string> roles)
      : state_(std::move(state)), templates_(templates), roles_(std::move(roles)) {}

  std::vector<std::string> roles() const override { return roles_; }
  int max_turns() const override { return state_.max_turns; }

  std::map<std::string, std::string> initial_prompts() override {
    return {{kDescriber, templates_.render("initial_describer", {{"target_word", state_.target_word},
                                                                 {"related_words", state_.related_words}})}};
  }

  MoveGrammar grammar_for(const std::string& role, int) const override {
    if (role == kDescriber) return {"CLUE: ", false, 1000, true};
    return {"GUESS: ", true, 100, true};
  }

  std::optional<RuleViolation> validate(const ParsedMove& move) const override {
    if (move.role != kDescriber) return std::nullopt;
    if (auto word = taboo_validate_clue(move.payload, state_)) return RuleViolation{*word};
    return std::nullopt;
  }

  Advance advance(const ParsedMove& move, int turn) override {
    state_.turn = turn;
    if (move.role == kDescriber) {
      const bool first = !guesser_prompted_;
      guesser_prompted_ = true;
      std::string text = templates_.render(first ? "initial_guesser" : "relay_guesser", {{"clue", move.payload}});
      return Continue{{Relay{kGuesser, text, first ? text : move.payload}}};
    }
    if (taboo_check_guess(move.payload, state_)) return Terminal{Outcome::success, "correct_guess"};
    if (turn >= state_.max_turns) return Terminal{Outcome::lost, "out_of_turns"};
    std::string guess;
    for (char c : move.payload) guess.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    return Continue{{Relay{kDescriber, templates_.render("relay_describer", {{"guess", guess}}), move.payload}}};
  }

 private:
  TabooState state_;
  const TemplateSet& templates_;
  std::vector<std::string> roles_;
  bool guesser_prompted_ = false;
};

}  // namespace

std::vector<std::string> TabooGame::required_templates() const {
  return {"relay_describer.template", "relay_guesser.template"};
}

std::vector<std::string> TabooGame::check_params(const Instance& instance) const {
  std::vector<std::string> problems;
  const auto& p = instance.params;
  if (!p.is_object()) return {"params must be an object"};
  for (const auto& [key, _] : p.items()) {
    if (key != "target_word" && key != "related_words") problems.push_back("unexpected param '" + key + "'");
  }
  if (!p.contains("target_word") || !p["target_word"].is_string()) {
    problems.emplace_back("target_word must be a string");
    return problems;
  }
  if (!p.contains("related_words") || !p["related_words"].is_array() ||
      !std::all_of(p["related_words"].begin(), p["related_words"].end(), [](const Json& v) { return v.is_string(); })) {
    problems.emplace_back("related_words must be a list of strings");
    return problems;
  }
  TabooState state{p["target_word"].get<std::string>(), p["related_words"].get<std::vector<std::string>>()};
  for (auto& s : check_invariants(state)) problems.push_back(std::move(s));
  return problems;
}

std::unique_ptr<GameHooks> TabooGame::start(const Instance& instance, const std::string& lang) const {
  if (auto problems = check_params(instance); !problems.empty()) {
    throw ValidationError("taboo instance " + std::to_string(instance.instance_id) + ": " + problems.front());
  }
  TabooState state;
  state.target_word = instance.params["target_word"].get<std::string>();
  state.related_words = instance.params["related_words"].get<std::vector<std::string>>();
  state.max_turns = options_.max_turns.value_or(kDefaultMaxTurns);
  return std::make_unique<TabooHooks>(std::move(state), templates(lang), spec_.roles);
}

}  // namespace clem
