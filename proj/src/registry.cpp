#include "clem/registry.hpp"

#include <algorithm>
#include <map>

#include "clem/serialize.hpp"

namespace fs = std::filesystem;

namespace clem {

std::string_view to_string(BackendKind kind) {
  switch (kind) {
    case BackendKind::openai_compatible: return "openai_compatible";
    case BackendKind::scripted: return "scripted";
    case BackendKind::programmatic: return "programmatic";
  }
  return "?";
}

namespace {

BackendKind backend_from_string(const std::string& name, const std::string& model) {
  for (auto kind : {BackendKind::openai_compatible, BackendKind::scripted, BackendKind::programmatic}) {
    if (to_string(kind) == name) return kind;
  }
  throw ValidationError("model '" + model + "': unsupported backend '" + name +
                        "' (expected openai_compatible, scripted or programmatic)");
}

std::string need_string(const Json& j, const char* key, const std::string& model) {
  if (!j.contains(key) || !j.at(key).is_string() || j.at(key).get<std::string>().empty()) {
    std::string backend = j.value("backend", std::string{});
    throw ValidationError("model '" + model + "': backend '" + backend + "' requires field '" +
                          key + "'");
  }
  return j.at(key).get<std::string>();
}

fs::path resolve_path(const std::string& p, const fs::path& base_dir) {
  fs::path path(p);
  if (path.is_relative() && !base_dir.empty()) return base_dir / path;
  return path;
}

}  // namespace

void to_json(Json& j, const ModelSpec& spec) {
  j = spec.extra;
  j["model_name"] = spec.model_name;
  j["backend"] = std::string(to_string(spec.backend));
  j["temperature"] = spec.temperature;
  j["max_tokens"] = spec.max_tokens;
  switch (spec.backend) {
    case BackendKind::openai_compatible:
      j["base_url"] = spec.base_url;
      j["model_id"] = spec.model_id;
      j["api_key_env"] = spec.api_key_env;
      break;
    case BackendKind::scripted:
      j["script_path"] = spec.script_path.string();
      break;
    case BackendKind::programmatic:
      j["player_kind"] = spec.player_kind;
      if (!spec.word_list.empty()) j["word_list"] = spec.word_list.string();
      break;
  }
}

ModelSpec model_spec_from_json(const Json& j, const fs::path& base_dir) {
  if (!j.is_object()) throw ValidationError("registry entries must be objects");
  if (!j.contains("model_name") || !j["model_name"].is_string() ||
      j["model_name"].get<std::string>().empty()) {
    throw ValidationError("registry entry without model_name: " + j.dump());
  }
  ModelSpec spec;
  spec.model_name = j["model_name"].get<std::string>();
  if (!j.contains("backend") || !j["backend"].is_string()) {
    throw ValidationError("model '" + spec.model_name + "': missing field 'backend'");
  }
  spec.backend = backend_from_string(j["backend"].get<std::string>(), spec.model_name);

  static const std::vector<std::string> kKnown = {
      "model_name", "backend",     "base_url",         "model_id",    "api_key_env",
      "timeout_s",  "script_path", "player_kind",      "word_list",   "temperature",
      "max_tokens", "max_concurrency", "retry_backoff_ms"};
  for (const auto& [key, value] : j.items()) {
    if (std::find(kKnown.begin(), kKnown.end(), key) == kKnown.end()) spec.extra[key] = value;
  }

  try {
    spec.temperature = j.value("temperature", 0.0);
    spec.max_tokens = j.value("max_tokens", 256);
    spec.max_concurrency = j.value("max_concurrency", 4);
    spec.timeout_s = j.value("timeout_s", 120.0);
    spec.retry_backoff_ms = j.value("retry_backoff_ms", 500);
  } catch (const Json::exception& e) {
    throw ValidationError("model '" + spec.model_name + "': " + e.what());
  }
  if (spec.max_tokens <= 0) throw ValidationError("model '" + spec.model_name + "': max_tokens must be positive");
  if (spec.max_concurrency <= 0) {
    throw ValidationError("model '" + spec.model_name + "': max_concurrency must be positive");
  }

  switch (spec.backend) {
    case BackendKind::openai_compatible:
      spec.base_url = need_string(j, "base_url", spec.model_name);
      spec.model_id = need_string(j, "model_id", spec.model_name);
      spec.api_key_env = need_string(j, "api_key_env", spec.model_name);
      break;
    case BackendKind::scripted:
      spec.script_path = resolve_path(need_string(j, "script_path", spec.model_name), base_dir);
      break;
    case BackendKind::programmatic:
      spec.player_kind = need_string(j, "player_kind", spec.model_name);
      if (j.contains("word_list")) {
        spec.word_list = resolve_path(need_string(j, "word_list", spec.model_name), base_dir);
      }
      break;
  }
  return spec;
}

ModelRegistry::ModelRegistry(std::vector<ModelSpec> models) : models_(std::move(models)) {
  std::map<std::string, std::size_t> first;
  for (std::size_t i = 0; i < models_.size(); ++i) {
    auto [it, inserted] = first.emplace(models_[i].model_name, i);
    if (!inserted) {
      throw ValidationError("duplicate model_name '" + models_[i].model_name + "' (entries " +
                            std::to_string(it->second) + " and " + std::to_string(i) + ")");
    }
  }
}

const ModelSpec& ModelRegistry::resolve(std::string_view name) const {
  for (const auto& m : models_) {
    if (m.model_name == name) return m;
  }
  auto known = names();
  std::string msg = "unknown model '" + std::string(name) + "'; known models:";
  for (const auto& n : known) msg += " " + n;
  throw UnknownNameError(msg, std::move(known));
}

std::vector<std::string> ModelRegistry::names() const {
  std::vector<std::string> out;
  out.reserve(models_.size());
  for (const auto& m : models_) out.push_back(m.model_name);
  return out;
}

ModelRegistry parse_registry(const Json& entries, const fs::path& base_dir) {
  if (!entries.is_array()) throw ValidationError("model registry must be a JSON list");
  std::vector<ModelSpec> models;
  for (const auto& e : entries) models.push_back(model_spec_from_json(e, base_dir));
  return ModelRegistry(std::move(models));
}

ModelRegistry load_registry(const fs::path& path) {
  Json j;
  try {
    j = Json::parse(read_file(path));
  } catch (const Json::parse_error& e) {
    throw ValidationError("cannot parse " + path.string() + ": " + e.what());
  }
  return parse_registry(j, path.parent_path());
}

std::vector<std::string> check_chat_context(const ChatContext& ctx) {
  std::vector<std::string> problems;
  if (ctx.empty()) {
    problems.emplace_back("chat context must be non-empty");
    return problems;
  }
  std::size_t i = ctx.front().role == "system" ? 1 : 0;
  for (std::size_t k = i; k < ctx.size(); ++k) {
    const char* expected = (k - i) % 2 == 0 ? "user" : "assistant";
    if (ctx[k].role != expected) {
      problems.push_back("message " + std::to_string(k) + " has role '" + ctx[k].role +
                         "', expected '" + expected + "'");
    }
  }
  return problems;
}

}  // namespace clem
