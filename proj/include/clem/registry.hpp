#pragma once

#include <chrono>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "clem/core.hpp"

namespace clem {

enum class BackendKind { openai_compatible, scripted, programmatic };

std::string_view to_string(BackendKind kind);

// One model registry entry.
struct ModelSpec {
  std::string model_name;
  BackendKind backend = BackendKind::programmatic;

  // openai_compatible
  std::string base_url;
  std::string model_id;
  std::string api_key_env;
  double timeout_s = 120.0;
  int retry_backoff_ms = 500;

  // scripted; relative paths are resolved against the registry file.
  std::filesystem::path script_path;

  // programmatic
  std::string player_kind;
  std::filesystem::path word_list;

  double temperature = 0.0;
  int max_tokens = 256;
  int max_concurrency = 4;

  // Fields the backends do not use (chat templates, EOS tokens, ...) are
  // kept verbatim.
  Json extra = Json::object();
};

void to_json(Json& j, const ModelSpec& spec);
// Validates backend-specific required fields.
ModelSpec model_spec_from_json(const Json& j, const std::filesystem::path& base_dir = {});

class ModelRegistry {
 public:
  ModelRegistry() = default;
  explicit ModelRegistry(std::vector<ModelSpec> models);

  // Exact, case-sensitive lookup. Throws UnknownNameError listing every
  // registered model_name.
  const ModelSpec& resolve(std::string_view name) const;
  std::vector<std::string> names() const;
  const std::vector<ModelSpec>& models() const { return models_; }

 private:
  std::vector<ModelSpec> models_;
};

// Throws ValidationError on duplicate names or missing backend fields.
ModelRegistry load_registry(const std::filesystem::path& path);
ModelRegistry parse_registry(const Json& entries, const std::filesystem::path& base_dir = {});

struct ChatMessage {
  std::string role;  // system | user | assistant
  std::string content;

  friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

using ChatContext = std::vector<ChatMessage>;

std::vector<std::string> check_chat_context(const ChatContext& ctx);

struct RequestStats {
  std::chrono::milliseconds latency{0};
  std::size_t prompt_chars = 0;
  std::size_t completion_chars = 0;
};

struct Completion {
  std::string text;
  std::string finish_reason;
  RequestStats request_stats;
};

// Inference failed after any retries. `status` is the HTTP status or 0 for
// transport/local failures.
class BackendError : public Error {
 public:
  BackendError(const std::string& what, int status = 0) : Error(what), status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

// Identifies whose conversation a call belongs to; scripted backends keep
// one cursor per key.
struct CallKey {
  std::string episode;
  std::string role;

  auto operator<=>(const CallKey&) const = default;
};

class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  // Must not modify ctx. Safe to call concurrently.
  virtual Completion generate(const ChatContext& ctx, const CallKey& key) = 0;
};

std::shared_ptr<ChatBackend> make_backend(const ModelSpec& spec);

// Hands out one shared backend per model, each wrapped so that at most
// spec.max_concurrency requests are in flight at once.
class BackendPool {
 public:
  BackendPool();
  ~BackendPool();
  BackendPool(const BackendPool&) = delete;
  BackendPool& operator=(const BackendPool&) = delete;

  std::shared_ptr<ChatBackend> get(const ModelSpec& spec);
  // Test seam: serve `name` from a caller-provided backend.
  void install(const std::string& name, std::shared_ptr<ChatBackend> backend);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace clem
