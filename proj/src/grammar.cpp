#include "clem/grammar.hpp"

#include <algorithm>
#include <cctype>

namespace clem {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

}  // namespace

std::string_view to_string(FormatReason reason) {
  switch (reason) {
    case FormatReason::missing_prefix: return "missing_prefix";
    case FormatReason::multiple_words: return "multiple_words";
    case FormatReason::empty_payload: return "empty_payload";
    case FormatReason::too_long: return "too_long";
  }
  return "?";
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

ParseResult parse_move(std::string_view raw, const MoveGrammar& grammar, std::string_view role) {
  if (raw.size() > grammar.max_response_chars) return FormatViolation{FormatReason::too_long};

  std::string_view text = raw;
  if (grammar.strip_whitespace) {
    while (!text.empty() && is_space(text.front())) text.remove_prefix(1);
  }
  if (grammar.required_prefix.empty() || !text.starts_with(grammar.required_prefix)) {
    return FormatViolation{FormatReason::missing_prefix};
  }
  std::string_view payload = trim(text.substr(grammar.required_prefix.size()));
  if (payload.empty()) return FormatViolation{FormatReason::empty_payload};
  if (grammar.single_word && std::any_of(payload.begin(), payload.end(), is_space)) {
    return FormatViolation{FormatReason::multiple_words};
  }
  return ParsedMove{std::string(role), std::string(payload), std::string(raw)};
}

std::string reprompt(std::string_view, FormatReason reason, const MoveGrammar& grammar) {
  std::string msg;
  switch (reason) {
    case FormatReason::missing_prefix:
      msg = "Your answer did not start with the required prefix.";
      break;
    case FormatReason::multiple_words:
      msg = "Your answer contained more than one word.";
      break;
    case FormatReason::empty_payload:
      msg = "Your answer was empty after the prefix.";
      break;
    case FormatReason::too_long:
      msg = "Your answer was too long (at most " + std::to_string(grammar.max_response_chars) +
            " characters).";
      break;
  }
  msg += " Please try again. Start with \"" + grammar.required_prefix + "\"";
  msg += grammar.single_word ? ", and only give a single word." : ".";
  return msg;
}

}  // namespace clem
