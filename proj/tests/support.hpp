#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <random>
#include <string>
#include <vector>

#include "clem/engine.hpp"
#include "clem/game.hpp"
#include "clem/registry.hpp"

namespace testing {

namespace fs = std::filesystem;

inline const fs::path kSourceDir = CLEM_SOURCE_DIR;

class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
    path_ = fs::temp_directory_path() /
            ("clem-test-" + std::to_string(stamp) + "-" + std::to_string(counter++));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  fs::path path_;
};

// Small hand-rolled generator for property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  std::uint64_t next() { return rng_(); }
  int range(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }

  std::string string(std::string_view alphabet, int min_len, int max_len) {
    std::string s;
    int n = range(min_len, max_len);
    for (int i = 0; i < n; ++i) s.push_back(alphabet[range(0, static_cast<int>(alphabet.size()) - 1)]);
    return s;
  }

  template <typename T>
  const T& pick(const std::vector<T>& items) {
    return items[range(0, static_cast<int>(items.size()) - 1)];
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

// Answers from a per-role queue; an empty queue raises BackendError.
class QueueBackend : public clem::ChatBackend {
 public:
  explicit QueueBackend(std::vector<std::string> lines) : lines_(std::move(lines)) {}

  clem::Completion generate(const clem::ChatContext& ctx, const clem::CallKey&) override {
    std::lock_guard lock(mu_);
    contexts.push_back(ctx);
    if (next_ >= lines_.size()) throw clem::BackendError("script exhausted");
    return clem::Completion{lines_[next_++], "stop", {}};
  }

  std::vector<clem::ChatContext> contexts;

 private:
  std::mutex mu_;
  std::vector<std::string> lines_;
  std::size_t next_ = 0;
};

class FnBackend : public clem::ChatBackend {
 public:
  using Fn = std::function<std::string(const clem::ChatContext&, const clem::CallKey&)>;
  explicit FnBackend(Fn fn) : fn_(std::move(fn)) {}
  clem::Completion generate(const clem::ChatContext& ctx, const clem::CallKey& key) override {
    return clem::Completion{fn_(ctx, key), "stop", {}};
  }

 private:
  Fn fn_;
};

inline std::map<std::string, clem::Player> players(
    std::initializer_list<std::pair<const std::string, std::shared_ptr<clem::ChatBackend>>> roles) {
  std::map<std::string, clem::Player> out;
  for (const auto& [role, backend] : roles) out[role] = clem::Player{"scripted-" + role, backend};
  return out;
}

inline clem::EngineConfig fixed_clock_config() {
  clem::EngineConfig cfg;
  cfg.clock = [] { return std::string("2000-01-01T00:00:00.000Z"); };
  return cfg;
}

inline const clem::GameCatalog& bundled_games() {
  static const clem::GameCatalog games = clem::GameCatalog::load(kSourceDir / "games");
  return games;
}

inline clem::Instance ugly_instance() {
  return clem::Instance{0, clem::Json{{"target_word", "ugly"},
                                      {"related_words", {"displeasing", "despicable", "unattractive"}}}};
}

}  // namespace testing
