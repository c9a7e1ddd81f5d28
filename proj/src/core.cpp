#include "clem/core.hpp"

#include <array>
#include <optional>
#include <regex>
#include <set>

namespace clem {

namespace {

constexpr std::array<std::string_view, 3> kOutcomeNames = {"aborted", "lost", "success"};

constexpr std::array<std::string_view, 8> kEventKindNames = {
    "send_message", "get_response", "parse_ok", "violation",
    "abort",        "lose",         "success",  "metadata",
};

}  // namespace

std::string_view to_string(Outcome outcome) {
  return kOutcomeNames[static_cast<std::size_t>(outcome)];
}

Outcome outcome_from_string(std::string_view name) {
  for (std::size_t i = 0; i < kOutcomeNames.size(); ++i) {
    if (kOutcomeNames[i] == name) return static_cast<Outcome>(i);
  }
  throw ValidationError("unknown outcome '" + std::string(name) + "'");
}

OutcomeTriple OutcomeTriple::from(Outcome outcome) {
  OutcomeTriple t;
  switch (outcome) {
    case Outcome::aborted: t.aborted = 1; break;
    case Outcome::lost: t.lost = 1; break;
    case Outcome::success: t.success = 1; break;
  }
  return t;
}

bool OutcomeTriple::valid() const {
  auto bit = [](int v) { return v == 0 || v == 1; };
  return bit(aborted) && bit(lost) && bit(success) && aborted + lost + success == 1;
}

std::string_view to_string(EventKind kind) {
  return kEventKindNames[static_cast<std::size_t>(kind)];
}

EventKind event_kind_from_string(std::string_view name) {
  for (std::size_t i = 0; i < kEventKindNames.size(); ++i) {
    if (kEventKindNames[i] == name) return static_cast<EventKind>(i);
  }
  throw ValidationError("unknown event kind '" + std::string(name) + "'");
}

bool is_terminal(EventKind kind) {
  return kind == EventKind::abort || kind == EventKind::lose || kind == EventKind::success;
}

std::vector<std::string> check_invariants(const GameSpec& spec) {
  std::vector<std::string> problems;
  if (spec.game_name.empty()) problems.emplace_back("game_name must be non-empty");
  if (spec.roles.empty()) problems.emplace_back("roles must be non-empty");
  std::set<std::string> seen;
  for (const auto& role : spec.roles) {
    if (role.empty() || role == kGameMaster) {
      problems.push_back("invalid role name '" + role + "'");
    }
    if (!seen.insert(role).second) problems.push_back("duplicate role '" + role + "'");
  }
  if (spec.min_players < 1) problems.emplace_back("min_players must be at least 1");
  if (spec.min_players > spec.max_players) {
    problems.emplace_back("min_players must not exceed max_players");
  }
  if (spec.languages.empty()) problems.emplace_back("languages must be non-empty");
  return problems;
}

std::vector<std::string> check_invariants(const Instance& instance) {
  std::vector<std::string> problems;
  if (instance.instance_id < 0) problems.emplace_back("instance_id must be non-negative");
  if (!instance.params.is_object()) {
    problems.emplace_back("params must be a key/value map");
    return problems;
  }
  for (const auto& [key, value] : instance.params.items()) {
    bool scalar = value.is_string() || value.is_number() || value.is_boolean();
    bool scalar_array = value.is_array();
    if (scalar_array) {
      for (const auto& v : value) {
        if (!(v.is_string() || v.is_number() || v.is_boolean())) scalar_array = false;
      }
    }
    if (!scalar && !scalar_array) {
      problems.push_back("param '" + key + "' must be a JSON scalar or array of scalars");
    }
  }
  return problems;
}

std::vector<std::string> check_invariants(const Experiment& experiment) {
  static const std::regex kName(R"(^(\d+)_([A-Za-z0-9]+)_([A-Za-z-]+)$)");
  std::vector<std::string> problems;
  std::smatch m;
  if (!std::regex_match(experiment.experiment_name, m, kName)) {
    problems.push_back("experiment_name '" + experiment.experiment_name +
                       "' does not follow {index}_{stratum}_{lang}");
  } else if (m[3].str() != experiment.language) {
    problems.push_back("experiment_name language suffix '" + m[3].str() +
                       "' does not match language '" + experiment.language + "'");
  }
  if (experiment.game_name.empty()) problems.emplace_back("game_name must be non-empty");
  if (experiment.instances.empty()) problems.emplace_back("instances must be non-empty");
  std::set<std::int64_t> ids;
  for (const auto& inst : experiment.instances) {
    if (!ids.insert(inst.instance_id).second) {
      problems.push_back("duplicate instance_id " + std::to_string(inst.instance_id));
    }
    for (auto& p : check_invariants(inst)) problems.push_back(std::move(p));
  }
  return problems;
}

std::vector<std::string> check_event_log(const EpisodeRecord& record) {
  std::vector<std::string> problems;
  const std::string gm{kGameMaster};
  auto is_role = [&](const std::string& name) { return record.player_models.contains(name); };

  // Per role: true while a send_message is waiting for its get_response.
  std::map<std::string, bool> awaiting;
  std::int64_t last_seq = -1;
  int terminals = 0;
  std::optional<EventKind> terminal_kind;
  bool after_terminal_non_meta = false;
  int last_turn = 0;

  for (const auto& ev : record.events) {
    std::string at = "event seq " + std::to_string(ev.seq) + ": ";
    if (ev.seq <= last_seq) problems.push_back(at + "seq not strictly increasing");
    last_seq = ev.seq;
    if (ev.turn < last_turn) problems.push_back(at + "turn decreased");
    last_turn = ev.turn;

    bool src_gm = ev.source == gm;
    bool dst_gm = ev.target == gm;
    if (!src_gm && !is_role(ev.source)) problems.push_back(at + "unknown source '" + ev.source + "'");
    if (!dst_gm && !is_role(ev.target)) problems.push_back(at + "unknown target '" + ev.target + "'");
    if (!src_gm && !dst_gm) problems.push_back(at + "isolation: player-to-player event");

    if (terminals > 0 && ev.kind != EventKind::metadata) after_terminal_non_meta = true;

    switch (ev.kind) {
      case EventKind::send_message:
        if (!src_gm || dst_gm) {
          problems.push_back(at + "send_message must go from GM to a role");
        } else if (awaiting[ev.target]) {
          problems.push_back(at + "alternation: two send_message events to '" + ev.target +
                             "' without a response");
        } else {
          awaiting[ev.target] = true;
        }
        break;
      case EventKind::get_response:
        if (src_gm || !dst_gm) {
          problems.push_back(at + "get_response must go from a role to GM");
        } else if (!awaiting[ev.source]) {
          problems.push_back(at + "alternation: get_response from '" + ev.source +
                             "' without a preceding send_message");
        } else {
          awaiting[ev.source] = false;
        }
        break;
      default:
        if (!src_gm || !dst_gm) {
          problems.push_back(at + std::string(to_string(ev.kind)) + " events are GM-internal");
        }
        if (is_terminal(ev.kind)) {
          ++terminals;
          terminal_kind = ev.kind;
        }
        break;
    }
  }

  if (terminals != 1) {
    problems.push_back("expected exactly one terminal event, found " + std::to_string(terminals));
  } else {
    if (after_terminal_non_meta) problems.emplace_back("terminal event is not the last non-metadata event");
    EventKind expected = record.outcome == Outcome::aborted ? EventKind::abort
                         : record.outcome == Outcome::lost  ? EventKind::lose
                                                            : EventKind::success;
    if (*terminal_kind != expected) {
      problems.push_back("outcome '" + std::string(to_string(record.outcome)) +
                         "' disagrees with terminal event '" +
                         std::string(to_string(*terminal_kind)) + "'");
    }
  }
  return problems;
}

std::vector<std::string> check_invariants(const EpisodeRecord& record) {
  std::vector<std::string> problems;
  if (record.game_name.empty()) problems.emplace_back("game_name must be non-empty");
  if (record.instance_id < 0) problems.emplace_back("instance_id must be non-negative");
  if (record.player_models.empty()) problems.emplace_back("player_models must be non-empty");
  if (record.final_turn < 0) problems.emplace_back("final_turn must be non-negative");
  for (auto& p : check_event_log(record)) problems.push_back(std::move(p));
  return problems;
}

}  // namespace clem
