#include "clem/engine.hpp"

#include <chrono>
#include <ctime>

namespace clem {

std::string utc_timestamp() {
  using namespace std::chrono;
  auto now = system_clock::now();
  auto ms = duration_cast<milliseconds>(now.time_since_epoch()) % 1000;
  std::time_t t = system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
  char out[40];
  std::snprintf(out, sizeof out, "%s.%03dZ", buf, static_cast<int>(ms.count()));
  return out;
}

namespace {

class GameError : public Error {
 public:
  using Error::Error;
};

class Episode {
 public:
  Episode(GameHooks& game, const EpisodeId& id, const std::map<std::string, Player>& players,
          const EngineConfig& cfg)
      : game_(game), id_(id), players_(players), cfg_(cfg) {
    record_.game_name = id.game_name;
    record_.experiment_name = id.experiment_name;
    record_.instance_id = id.instance_id;
    record_.seed = cfg.seed;
    for (const auto& [role, player] : players) record_.player_models[role] = player.model_name;
  }

  EpisodeRecord run() {
    std::string failure;
    try {
      play();
    } catch (const BackendError& e) {
      emit(EventKind::metadata, {{"cause", "backend_error"}, {"detail", e.what()}, {"status", e.status()}});
      finish(Outcome::aborted, EventKind::abort, {{"cause", "backend_error"}});
    } catch (const std::exception& e) {
      failure = e.what();
      emit(EventKind::metadata, {{"cause", "game_error"}, {"detail", failure}});
      finish(Outcome::aborted, EventKind::abort, {{"cause", "game_error"}});
    }
    if (!failure.empty() && cfg_.strict) {
      throw EpisodeFailure("game error in " + id_.game_name + "/" + id_.experiment_name + "/" +
                               std::to_string(id_.instance_id) + ": " + failure,
                           std::move(record_));
    }
    return std::move(record_);
  }

 private:
  void play() {
    const auto roles = game_.roles();
    for (const auto& role : roles) {
      if (!players_.contains(role)) throw GameError("no player assigned to role '" + role + "'");
    }
    pending_ = game_.initial_prompts();
    const int max_turns = game_.max_turns();

    for (turn_ = 1; turn_ <= max_turns; ++turn_) {
      for (const auto& role : roles) {
        if (play_move(role)) return;
      }
    }
    turn_ = max_turns;
    finish(Outcome::lost, EventKind::lose, {{"reason", "max_turns"}});
  }

  // Returns true once the episode has ended.
  bool play_move(const std::string& role) {
    auto it = pending_.find(role);
    if (it == pending_.end()) {
      throw GameError("no prompt pending for role '" + role + "' at turn " + std::to_string(turn_));
    }
    std::string message = std::move(it->second);
    pending_.erase(it);

    const Player& player = players_.at(role);
    auto& history = histories_[role];
    int reprompts_left = cfg_.max_reprompts;

    for (;;) {
      emit(EventKind::send_message, message, std::string(kGameMaster), role);
      history.push_back({"user", message});

      Completion completion = player.backend->generate(history, CallKey{id_.key, role});
      emit(EventKind::get_response, completion.text, role, std::string(kGameMaster));
      history.push_back({"assistant", completion.text});

      MoveGrammar grammar = game_.grammar_for(role, turn_);
      ParseResult parsed = parse_move(completion.text, grammar, role);
      if (auto* bad = std::get_if<FormatViolation>(&parsed)) {
        emit(EventKind::violation,
             {{"type", "format"}, {"reason", std::string(to_string(bad->reason))}, {"role", role}});
        if (reprompts_left > 0) {
          --reprompts_left;
          message = reprompt(role, bad->reason, grammar);
          continue;
        }
        finish(Outcome::aborted, EventKind::abort, {{"cause", "format_violation"}});
        return true;
      }

      const auto& move = std::get<ParsedMove>(parsed);
      emit(EventKind::parse_ok, {{"role", role}, {"payload", move.payload}});

      if (auto violation = game_.validate(move)) {
        emit(EventKind::violation, {{"type", "rule"}, {"reason", violation->reason}, {"role", role}});
        finish(Outcome::lost, EventKind::lose, {{"reason", "rule_violation"}});
        return true;
      }

      Advance next = game_.advance(move, turn_);
      if (auto* end = std::get_if<Terminal>(&next)) {
        if (end->outcome == Outcome::success) {
          finish(Outcome::success, EventKind::success, {{"reason", end->reason}});
        } else {
          finish(Outcome::lost, EventKind::lose, {{"reason", end->reason}});
        }
        return true;
      }
      for (auto& relay : std::get<Continue>(next).relays) {
        if (!players_.contains(relay.role)) throw GameError("relay to unknown role '" + relay.role + "'");
        pending_[relay.role] = cfg_.relay_mode == RelayMode::templated ? relay.text : relay.verbatim;
      }
      return false;
    }
  }

  void emit(EventKind kind, Json content, std::string source = std::string(kGameMaster),
            std::string target = std::string(kGameMaster)) {
    Event ev;
    ev.seq = static_cast<std::int64_t>(record_.events.size());
    ev.turn = std::max(turn_, 1);
    ev.source = std::move(source);
    ev.target = std::move(target);
    ev.kind = kind;
    ev.content = std::move(content);
    ev.timestamp = cfg_.clock ? cfg_.clock() : utc_timestamp();
    record_.events.push_back(std::move(ev));
  }

  void finish(Outcome outcome, EventKind kind, Json content) {
    emit(kind, std::move(content));
    record_.outcome = outcome;
    record_.final_turn = std::max(turn_, 1);
  }

  GameHooks& game_;
  const EpisodeId& id_;
  const std::map<std::string, Player>& players_;
  const EngineConfig& cfg_;
  EpisodeRecord record_;
  std::map<std::string, std::string> pending_;
  std::map<std::string, ChatContext> histories_;
  int turn_ = 1;
};

}  // namespace

EpisodeRecord run_episode(GameHooks& game, const EpisodeId& id,
                          const std::map<std::string, Player>& players, const EngineConfig& cfg) {
  return Episode(game, id, players, cfg).run();
}

}  // namespace clem
