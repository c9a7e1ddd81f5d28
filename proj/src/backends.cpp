#include <algorithm>
#include <condition_variable>
#include <cstdlib>
#include <map>
#include <mutex>
#include <regex>
#include <sstream>
#include <thread>

#include "clem/registry.hpp"
#include "clem/serialize.hpp"
#include "clem/wordle.hpp"
#include "httplib.h"

namespace fs = std::filesystem;

namespace clem {

namespace {

constexpr int kMaxRetries = 2;

std::size_t prompt_chars(const ChatContext& ctx) {
  std::size_t n = 0;
  for (const auto& m : ctx) n += m.content.size();
  return n;
}

class OpenAiBackend : public ChatBackend {
 public:
  explicit OpenAiBackend(ModelSpec spec) : spec_(std::move(spec)) {
    static const std::regex kUrl(R"(^(https?://[^/]+)(/.*)?$)");
    std::smatch m;
    if (!std::regex_match(spec_.base_url, m, kUrl)) {
      throw ValidationError("model '" + spec_.model_name + "': malformed base_url '" +
                            spec_.base_url + "'");
    }
    origin_ = m[1].str();
    path_ = m[2].str();
    while (!path_.empty() && path_.back() == '/') path_.pop_back();
    path_ += "/chat/completions";
  }

  Completion generate(const ChatContext& ctx, const CallKey&) override {
    const char* key = std::getenv(spec_.api_key_env.c_str());
    if (key == nullptr) {
      throw BackendError("model '" + spec_.model_name + "': environment variable " +
                         spec_.api_key_env + " is not set");
    }

    Json body = {{"model", spec_.model_id},
                 {"temperature", spec_.temperature},
                 {"max_tokens", spec_.max_tokens},
                 {"messages", Json::array()}};
    for (const auto& msg : ctx) body["messages"].push_back({{"role", msg.role}, {"content", msg.content}});
    const std::string payload = body.dump();

    httplib::Headers headers;
    if (*key != '\0') headers.emplace("Authorization", std::string("Bearer ") + key);

    auto started = std::chrono::steady_clock::now();
    std::string last_error;
    int last_status = 0;
    for (int attempt = 0; attempt <= kMaxRetries; ++attempt) {
      if (attempt > 0) {
        std::this_thread::sleep_for(std::chrono::milliseconds(spec_.retry_backoff_ms) * (1 << (attempt - 1)));
      }
      httplib::Client client(origin_);
      auto timeout = std::chrono::duration<double>(spec_.timeout_s);
      client.set_connection_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
      client.set_read_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
      client.set_write_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));

      auto res = client.Post(path_, headers, payload, "application/json");
      if (!res) {
        last_error = "transport error: " + httplib::to_string(res.error());
        last_status = 0;
        continue;
      }
      last_status = res->status;
      if (res->status == 429 || res->status >= 500) {
        last_error = "HTTP " + std::to_string(res->status);
        continue;
      }
      if (res->status < 200 || res->status >= 300) {
        throw BackendError("model '" + spec_.model_name + "': HTTP " + std::to_string(res->status) +
                               ": " + res->body.substr(0, 200),
                           res->status);
      }
      return parse_response(res->body, ctx, started);
    }
    throw BackendError("model '" + spec_.model_name + "': " + last_error + " after " +
                           std::to_string(kMaxRetries) + " retries",
                       last_status);
  }

 private:
  Completion parse_response(const std::string& body, const ChatContext& ctx,
                            std::chrono::steady_clock::time_point started) const {
    Completion out;
    try {
      auto j = Json::parse(body);
      const auto& choice = j.at("choices").at(0);
      const auto& content = choice.at("message").at("content");
      out.text = content.is_null() ? std::string{} : content.get<std::string>();
      if (choice.contains("finish_reason") && choice["finish_reason"].is_string()) {
        out.finish_reason = choice["finish_reason"].get<std::string>();
      }
    } catch (const Json::exception& e) {
      throw BackendError("model '" + spec_.model_name + "': malformed completion response: " + e.what());
    }
    out.request_stats.latency = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - started);
    out.request_stats.prompt_chars = prompt_chars(ctx);
    out.request_stats.completion_chars = out.text.size();
    return out;
  }

  ModelSpec spec_;
  std::string origin_;
  std::string path_;
};

// One response per line; the two-character sequence \n inside a line stands
// for a newline.
std::vector<std::string> load_script(const fs::path& path) {
  std::istringstream in(read_file(path));
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string decoded;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '\\' && i + 1 < line.size() && line[i + 1] == 'n') {
        decoded.push_back('\n');
        ++i;
      } else {
        decoded.push_back(line[i]);
      }
    }
    lines.push_back(std::move(decoded));
  }
  return lines;
}

class ScriptedBackend : public ChatBackend {
 public:
  explicit ScriptedBackend(const ModelSpec& spec) : name_(spec.model_name), lines_(load_script(spec.script_path)) {}

  Completion generate(const ChatContext& ctx, const CallKey& key) override {
    std::size_t index;
    {
      std::lock_guard lock(mu_);
      index = cursors_[key]++;
    }
    if (index >= lines_.size()) throw BackendError("model '" + name_ + "': script exhausted");
    Completion out{lines_[index], "stop", {}};
    out.request_stats.prompt_chars = prompt_chars(ctx);
    out.request_stats.completion_chars = out.text.size();
    return out;
  }

 private:
  std::string name_;
  std::vector<std::string> lines_;
  std::mutex mu_;
  std::map<CallKey, std::size_t> cursors_;
};

class EchoPlayer : public ChatBackend {
 public:
  Completion generate(const ChatContext& ctx, const CallKey&) override {
    for (auto it = ctx.rbegin(); it != ctx.rend(); ++it) {
      if (it->role == "user") return {it->content, "stop", {}};
    }
    return {"", "stop", {}};
  }
};

std::vector<std::string> load_word_list(const fs::path& path) {
  std::vector<std::string> words;
  std::string bytes = read_file(path);
  if (path.extension() == ".json") {
    auto j = Json::parse(bytes);
    const Json& entries = j.is_object() ? j.at("entries") : j;
    for (const auto& e : entries) words.push_back(e.is_string() ? e.get<std::string>() : e.at("word").get<std::string>());
  } else {
    std::istringstream in(bytes);
    std::string w;
    while (in >> w) words.push_back(w);
  }
  std::erase_if(words, [](const std::string& w) { return !is_wordle_word(w); });
  std::sort(words.begin(), words.end());
  words.erase(std::unique(words.begin(), words.end()), words.end());
  if (words.empty()) throw ValidationError("word list " + path.string() + " has no 5-letter words");
  return words;
}

// Guesses the first listed word (alphabetically) consistent with every
// feedback line seen so far.
class WordleSolver : public ChatBackend {
 public:
  explicit WordleSolver(std::vector<std::string> words) : words_(std::move(words)) {}

  Completion generate(const ChatContext& ctx, const CallKey&) override {
    static const std::regex kFeedback(R"re(Feedback for "([a-z]{5})": ([gy-]{5}))re");
    std::vector<std::pair<std::string, std::string>> seen;
    for (const auto& msg : ctx) {
      if (msg.role != "user") continue;
      for (std::sregex_iterator it(msg.content.begin(), msg.content.end(), kFeedback), end; it != end; ++it) {
        seen.emplace_back((*it)[1].str(), (*it)[2].str());
      }
    }
    for (const auto& w : words_) {
      bool consistent = std::all_of(seen.begin(), seen.end(), [&](const auto& gf) {
        return wordle_feedback(gf.first, w) == gf.second;
      });
      if (consistent) return {"GUESS: " + w, "stop", {}};
    }
    return {"GUESS: " + words_.front(), "stop", {}};
  }

 private:
  std::vector<std::string> words_;
};

// Caps in-flight calls to the wrapped backend.
class ConcurrencyLimited : public ChatBackend {
 public:
  ConcurrencyLimited(std::shared_ptr<ChatBackend> inner, int limit) : inner_(std::move(inner)), limit_(limit) {}

  Completion generate(const ChatContext& ctx, const CallKey& key) override {
    {
      std::unique_lock lock(mu_);
      cv_.wait(lock, [&] { return in_flight_ < limit_; });
      ++in_flight_;
    }
    struct Release {
      ConcurrencyLimited* self;
      ~Release() {
        {
          std::lock_guard lock(self->mu_);
          --self->in_flight_;
        }
        self->cv_.notify_one();
      }
    } release{this};
    return inner_->generate(ctx, key);
  }

 private:
  std::shared_ptr<ChatBackend> inner_;
  int limit_;
  int in_flight_ = 0;
  std::mutex mu_;
  std::condition_variable cv_;
};

}  // namespace

std::shared_ptr<ChatBackend> make_backend(const ModelSpec& spec) {
  switch (spec.backend) {
    case BackendKind::openai_compatible:
      return std::make_shared<OpenAiBackend>(spec);
    case BackendKind::scripted:
      return std::make_shared<ScriptedBackend>(spec);
    case BackendKind::programmatic:
      if (spec.player_kind == "echo") return std::make_shared<EchoPlayer>();
      if (spec.player_kind == "wordle_solver") {
        if (spec.word_list.empty()) {
          throw ValidationError("model '" + spec.model_name + "': wordle_solver requires word_list");
        }
        return std::make_shared<WordleSolver>(load_word_list(spec.word_list));
      }
      throw ValidationError("model '" + spec.model_name + "': unknown player_kind '" +
                            spec.player_kind + "' (expected echo or wordle_solver)");
  }
  throw ValidationError("unreachable backend kind");
}

struct BackendPool::Impl {
  std::mutex mu;
  std::map<std::string, std::shared_ptr<ChatBackend>> installed;
  // Keyed by model name and temperature: a -t override yields a separate
  // backend.
  std::map<std::pair<std::string, double>, std::shared_ptr<ChatBackend>> backends;
};

BackendPool::BackendPool() : impl_(std::make_unique<Impl>()) {}
BackendPool::~BackendPool() = default;

std::shared_ptr<ChatBackend> BackendPool::get(const ModelSpec& spec) {
  std::lock_guard lock(impl_->mu);
  if (auto it = impl_->installed.find(spec.model_name); it != impl_->installed.end()) return it->second;
  auto& slot = impl_->backends[{spec.model_name, spec.temperature}];
  if (!slot) slot = std::make_shared<ConcurrencyLimited>(make_backend(spec), spec.max_concurrency);
  return slot;
}

void BackendPool::install(const std::string& name, std::shared_ptr<ChatBackend> backend) {
  std::lock_guard lock(impl_->mu);
  impl_->installed[name] = std::move(backend);
}

}  // namespace clem
