#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <variant>

namespace clem {

// Surface-form constraints on one player response.
struct MoveGrammar {
  std::string required_prefix;
  bool single_word = false;
  std::size_t max_response_chars = 1000;
  bool strip_whitespace = true;
};

enum class FormatReason { missing_prefix, multiple_words, empty_payload, too_long };

std::string_view to_string(FormatReason reason);

struct ParsedMove {
  std::string role;
  std::string payload;  // prefix removed, trimmed
  std::string raw;

  friend bool operator==(const ParsedMove&, const ParsedMove&) = default;
};

struct FormatViolation {
  FormatReason reason;

  friend bool operator==(const FormatViolation&, const FormatViolation&) = default;
};

using ParseResult = std::variant<ParsedMove, FormatViolation>;

// Total: every input yields a move or a violation. The length limit is
// applied to the raw text before anything else.
ParseResult parse_move(std::string_view raw, const MoveGrammar& grammar, std::string_view role = {});

// Corrective message sent after a format violation. Always repeats the
// prefix instruction as: Start with "<prefix>".
std::string reprompt(std::string_view role, FormatReason reason, const MoveGrammar& grammar);

std::string_view trim(std::string_view s);

}  // namespace clem
