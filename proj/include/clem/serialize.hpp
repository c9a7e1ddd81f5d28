#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "clem/core.hpp"

namespace clem {

void to_json(Json& j, const GameSpec& spec);
void from_json(const Json& j, GameSpec& spec);
void to_json(Json& j, const Instance& instance);
void from_json(const Json& j, Instance& instance);
void to_json(Json& j, const Experiment& experiment);
void from_json(const Json& j, Experiment& experiment);
void to_json(Json& j, const Event& event);
void from_json(const Json& j, Event& event);
void to_json(Json& j, const EpisodeRecord& record);
void from_json(const Json& j, EpisodeRecord& record);

// UTF-8 JSON with sorted keys, two-space indentation, LF newlines and a
// single trailing newline.
std::string canonical_dump(const Json& j);

// Refuses (ValidationError) values that break their type invariants.
template <typename T>
std::string canonical_serialize(const T& value) {
  if (auto problems = check_invariants(value); !problems.empty()) {
    std::string msg = "refusing to serialize invalid value: ";
    for (std::size_t i = 0; i < problems.size(); ++i) {
      if (i) msg += "; ";
      msg += problems[i];
    }
    throw ValidationError(msg);
  }
  return canonical_dump(Json(value));
}

std::string canonical_serialize(const std::vector<Experiment>& experiments);

template <typename T>
T deserialize(std::string_view bytes) {
  Json j;
  try {
    j = Json::parse(bytes);
  } catch (const Json::parse_error& e) {
    throw ValidationError(std::string("malformed JSON: ") + e.what());
  }
  try {
    return j.get<T>();
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("bad document shape: ") + e.what());
  }
}

// The record without wall-clock fields; the basis of byte-equality checks.
Json scoring_view(const EpisodeRecord& record);

std::string read_file(const std::filesystem::path& path);
// Writes via a sibling temp file and rename so readers never see a partial
// file.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

}  // namespace clem
