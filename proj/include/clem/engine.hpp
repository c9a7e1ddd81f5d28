#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "clem/core.hpp"
#include "clem/grammar.hpp"
#include "clem/registry.hpp"

namespace clem {

struct RuleViolation {
  std::string reason;
};

// A GM message for one role produced from a validated move. `text` is the
// templated rendering, `verbatim` the bare relayed content.
struct Relay {
  std::string role;
  std::string text;
  std::string verbatim;
};

struct Continue {
  std::vector<Relay> relays;
};

struct Terminal {
  Outcome outcome = Outcome::lost;  // lost or success
  std::string reason;
};

using Advance = std::variant<Continue, Terminal>;

// Per-episode game logic. One object per played instance; the engine calls
// it strictly sequentially.
//
// Only grammar_for and advance must be written for a round-robin game; the
// remaining hooks have defaults.
class GameHooks {
 public:
  virtual ~GameHooks() = default;

  // Declared play order within a turn.
  virtual std::vector<std::string> roles() const = 0;
  virtual int max_turns() const = 0;
  // First message for each role that is prompted before it receives any
  // relay. Roles missing here must get their first message via a relay.
  virtual std::map<std::string, std::string> initial_prompts() = 0;
  virtual MoveGrammar grammar_for(const std::string& role, int turn) const = 0;
  virtual std::optional<RuleViolation> validate(const ParsedMove&) const { return std::nullopt; }
  // Called only with moves that passed validate.
  virtual Advance advance(const ParsedMove& move, int turn) = 0;
};

enum class RelayMode { templated, verbatim };

struct EngineConfig {
  int max_reprompts = 0;
  RelayMode relay_mode = RelayMode::templated;
  std::uint64_t seed = 0;
  // Hook exceptions propagate (as EpisodeFailure) after the record is built.
  bool strict = false;
  // Timestamp source; defaults to the UTC wall clock.
  std::function<std::string()> clock;
};

struct Player {
  std::string model_name;
  std::shared_ptr<ChatBackend> backend;
};

struct EpisodeId {
  std::string game_name;
  std::string experiment_name;
  std::int64_t instance_id = 0;
  // Distinguishes concurrent episodes for per-episode backend state.
  std::string key;
};

// Thrown in strict mode when game code fails; carries the aborted record.
class EpisodeFailure : public Error {
 public:
  EpisodeFailure(const std::string& what, EpisodeRecord record)
      : Error(what), record_(std::move(record)) {}
  const EpisodeRecord& record() const { return record_; }

 private:
  EpisodeRecord record_;
};

// Plays one episode. Outcomes: format violation with no reprompts left ->
// aborted; rule violation -> lost; terminal decisions from advance are
// honoured; running past max_turns -> lost. Backend failures abort with
// cause "backend_error", hook exceptions with cause "game_error".
EpisodeRecord run_episode(GameHooks& game, const EpisodeId& id,
                          const std::map<std::string, Player>& players, const EngineConfig& cfg);

std::string utc_timestamp();

}  // namespace clem
