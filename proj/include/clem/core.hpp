#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace clem {

using Json = nlohmann::json;

inline constexpr std::string_view kEngineVersion = "clem-cpp/1.0.0";
inline constexpr std::string_view kGameMaster = "GM";

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A value or file violates a documented invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Name lookup failed; the message lists the known names.
class UnknownNameError : public Error {
 public:
  UnknownNameError(const std::string& what, std::vector<std::string> known)
      : Error(what), known_(std::move(known)) {}
  const std::vector<std::string>& known() const { return known_; }

 private:
  std::vector<std::string> known_;
};

class UnsupportedOperation : public Error {
 public:
  using Error::Error;
};

enum class Outcome { aborted, lost, success };

std::string_view to_string(Outcome outcome);
Outcome outcome_from_string(std::string_view name);

// Indicator view of an Outcome; exactly one field is 1.
struct OutcomeTriple {
  int aborted = 0;
  int lost = 0;
  int success = 0;

  static OutcomeTriple from(Outcome outcome);
  bool valid() const;
};

struct GameSpec {
  std::string game_name;
  std::string description;
  std::vector<std::string> roles;
  int min_players = 1;
  int max_players = 1;
  // Set by the loader to {game dir}/templates; not part of clemgame.json.
  std::filesystem::path template_root;
  std::vector<std::string> languages;
  std::string version;
};

struct Instance {
  std::int64_t instance_id = 0;
  Json params = Json::object();

  friend bool operator==(const Instance&, const Instance&) = default;
};

struct Experiment {
  std::string experiment_name;
  std::string game_name;
  std::string language;
  std::vector<Instance> instances;

  friend bool operator==(const Experiment&, const Experiment&) = default;
};

enum class EventKind {
  send_message,
  get_response,
  parse_ok,
  violation,
  abort,
  lose,
  success,
  metadata,
};

std::string_view to_string(EventKind kind);
EventKind event_kind_from_string(std::string_view name);
bool is_terminal(EventKind kind);

struct Event {
  std::int64_t seq = 0;
  int turn = 1;
  std::string source;
  std::string target;
  EventKind kind = EventKind::metadata;
  Json content;
  // ISO-8601 UTC; dropped from the scoring view.
  std::string timestamp;

  friend bool operator==(const Event&, const Event&) = default;
};

struct EpisodeRecord {
  std::string game_name;
  std::string experiment_name;
  std::int64_t instance_id = 0;
  std::map<std::string, std::string> player_models;  // role -> model_name
  std::vector<Event> events;
  Outcome outcome = Outcome::aborted;
  int final_turn = 0;
  std::string engine_version{kEngineVersion};
  std::uint64_t seed = 0;

  friend bool operator==(const EpisodeRecord&, const EpisodeRecord&) = default;
};

// Invariant checks. Each returns human-readable descriptions of every
// violated invariant; an empty result means the value is valid.
std::vector<std::string> check_invariants(const GameSpec& spec);
std::vector<std::string> check_invariants(const Instance& instance);
std::vector<std::string> check_invariants(const Experiment& experiment);
std::vector<std::string> check_invariants(const EpisodeRecord& record);

// Event-log properties only: seq order, per-role alternation, information
// isolation, terminal-event uniqueness and agreement with the outcome.
std::vector<std::string> check_event_log(const EpisodeRecord& record);

}  // namespace clem
