#include "clem/serialize.hpp"

#include <fstream>
#include <sstream>
#include <system_error>

namespace clem {

namespace {

template <typename T>
T required(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw ValidationError(std::string("missing required field '") + key + "'");
  }
  return j.at(key).get<T>();
}

}  // namespace

void to_json(Json& j, const GameSpec& spec) {
  j = Json{{"game_name", spec.game_name},     {"description", spec.description},
           {"roles", spec.roles},             {"min_players", spec.min_players},
           {"max_players", spec.max_players}, {"languages", spec.languages},
           {"version", spec.version}};
}

void from_json(const Json& j, GameSpec& spec) {
  spec.game_name = required<std::string>(j, "game_name");
  spec.description = j.value("description", std::string{});
  spec.roles = required<std::vector<std::string>>(j, "roles");
  spec.min_players = required<int>(j, "min_players");
  spec.max_players = required<int>(j, "max_players");
  spec.languages = required<std::vector<std::string>>(j, "languages");
  spec.version = required<std::string>(j, "version");
}

void to_json(Json& j, const Instance& instance) {
  j = Json{{"instance_id", instance.instance_id}, {"params", instance.params}};
}

void from_json(const Json& j, Instance& instance) {
  instance.instance_id = required<std::int64_t>(j, "instance_id");
  instance.params = required<Json>(j, "params");
}

void to_json(Json& j, const Experiment& experiment) {
  j = Json{{"experiment_name", experiment.experiment_name},
           {"game_name", experiment.game_name},
           {"language", experiment.language},
           {"instances", experiment.instances}};
}

void from_json(const Json& j, Experiment& experiment) {
  experiment.experiment_name = required<std::string>(j, "experiment_name");
  experiment.game_name = required<std::string>(j, "game_name");
  experiment.language = required<std::string>(j, "language");
  experiment.instances = required<std::vector<Instance>>(j, "instances");
}

void to_json(Json& j, const Event& event) {
  j = Json{{"seq", event.seq},
           {"turn", event.turn},
           {"source", event.source},
           {"target", event.target},
           {"kind", std::string(to_string(event.kind))},
           {"content", event.content},
           {"timestamp", event.timestamp}};
}

void from_json(const Json& j, Event& event) {
  event.seq = required<std::int64_t>(j, "seq");
  event.turn = required<int>(j, "turn");
  event.source = required<std::string>(j, "source");
  event.target = required<std::string>(j, "target");
  event.kind = event_kind_from_string(required<std::string>(j, "kind"));
  event.content = j.value("content", Json{});
  event.timestamp = j.value("timestamp", std::string{});
}

void to_json(Json& j, const EpisodeRecord& record) {
  j = Json{{"game_name", record.game_name},
           {"experiment_name", record.experiment_name},
           {"instance_id", record.instance_id},
           {"player_models", record.player_models},
           {"events", record.events},
           {"outcome", std::string(to_string(record.outcome))},
           {"final_turn", record.final_turn},
           {"engine_version", record.engine_version},
           {"seed", record.seed}};
}

void from_json(const Json& j, EpisodeRecord& record) {
  record.game_name = required<std::string>(j, "game_name");
  record.experiment_name = required<std::string>(j, "experiment_name");
  record.instance_id = required<std::int64_t>(j, "instance_id");
  record.player_models = required<std::map<std::string, std::string>>(j, "player_models");
  record.events = required<std::vector<Event>>(j, "events");
  record.outcome = outcome_from_string(required<std::string>(j, "outcome"));
  record.final_turn = required<int>(j, "final_turn");
  record.engine_version = required<std::string>(j, "engine_version");
  record.seed = required<std::uint64_t>(j, "seed");
}

std::string canonical_dump(const Json& j) {
  // nlohmann's object type is a std::map, so keys are already sorted.
  std::string out = j.dump(2, ' ', false, Json::error_handler_t::strict);
  out.push_back('\n');
  return out;
}

std::string canonical_serialize(const std::vector<Experiment>& experiments) {
  for (const auto& e : experiments) {
    if (auto problems = check_invariants(e); !problems.empty()) {
      throw ValidationError("refusing to serialize experiment '" + e.experiment_name +
                            "': " + problems.front());
    }
  }
  return canonical_dump(Json(experiments));
}

Json scoring_view(const EpisodeRecord& record) {
  Json j = record;
  for (auto& ev : j["events"]) ev.erase("timestamp");
  return j;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view bytes) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + ": " + ec.message());
}

}  // namespace clem
