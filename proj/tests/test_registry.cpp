#include <cstdlib>
#include <fstream>
#include <thread>

#include "clem/serialize.hpp"
#include "doctest.h"
#include "httplib.h"
#include "support.hpp"

using namespace clem;
using testing::TempDir;
namespace fs = std::filesystem;

namespace {

const char* kSampleEntry = R"({"model_name":"my-model-8b","backend":"openai_compatible",
  "base_url":"http://localhost:8000/v1","model_id":"my-org/My-Model-8B","api_key_env":"CLEM_API_KEY"})";

std::string unknown_message(const ModelRegistry& reg, std::string_view name) {
  try {
    reg.resolve(name);
  } catch (const UnknownNameError& e) {
    return e.what();
  }
  return "";
}

// Local chat-completions server recording each request.
struct StubServer {
  httplib::Server server;
  std::thread thread;
  int port = 0;
  std::mutex mu;
  std::vector<Json> bodies;
  std::vector<std::string> auth_headers;
  std::function<std::pair<int, std::string>(int attempt, const Json& body)> reply;

  StubServer() {
    server.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      int attempt;
      Json body = Json::parse(req.body);
      {
        std::lock_guard lock(mu);
        bodies.push_back(body);
        auth_headers.push_back(req.get_header_value("Authorization"));
        attempt = static_cast<int>(bodies.size());
      }
      auto [status, text] = reply(attempt, body);
      res.status = status;
      Json out = {{"choices", {{{"message", {{"role", "assistant"}, {"content", text}}}, {"finish_reason", "stop"}}}}};
      res.set_content(status == 200 ? out.dump() : R"({"error":"nope"})", "application/json");
    });
    port = server.bind_to_any_port("127.0.0.1");
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  ~StubServer() {
    server.stop();
    thread.join();
  }

  ModelSpec spec(const std::string& env = "CLEM_TEST_KEY") const {
    ModelSpec s;
    s.model_name = "stub";
    s.backend = BackendKind::openai_compatible;
    s.base_url = "http://127.0.0.1:" + std::to_string(port) + "/v1";
    s.model_id = "org/stub-model";
    s.api_key_env = env;
    s.retry_backoff_ms = 1;
    s.timeout_s = 5;
    return s;
  }
  std::size_t calls() {
    std::lock_guard lock(mu);
    return bodies.size();
  }
};

const ChatContext kCtx = {{"system", "be brief"}, {"user", "hello"}};

}  // namespace

TEST_CASE("sample registry entry loads") {
  auto reg = parse_registry(Json::array({Json::parse(kSampleEntry)}));
  const ModelSpec& m = reg.resolve("my-model-8b");
  CHECK(m.backend == BackendKind::openai_compatible);
  CHECK(m.base_url == "http://localhost:8000/v1");
  CHECK(m.model_id == "my-org/My-Model-8B");
  CHECK(m.api_key_env == "CLEM_API_KEY");
  CHECK(m.temperature == 0.0);
  CHECK(m.max_tokens == 256);
  CHECK(m.max_concurrency == 4);
}

TEST_CASE("registry rejects duplicates and missing backend fields") {
  Json dup = Json::parse(R"([{"model_name":"m","backend":"programmatic","player_kind":"echo"},
                             {"model_name":"m","backend":"programmatic","player_kind":"echo"}])");
  try {
    parse_registry(dup);
    FAIL("expected duplicate error");
  } catch (const ValidationError& e) {
    std::string msg = e.what();
    CHECK(msg.find("'m'") != std::string::npos);
    CHECK(msg.find("0") != std::string::npos);
    CHECK(msg.find("1") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_registry(Json::parse(R"([{"model_name":"s","backend":"scripted"}])")), ValidationError);
  CHECK_THROWS_AS(parse_registry(Json::parse(R"([{"model_name":"o","backend":"openai_compatible",
      "base_url":"http://x","model_id":"y"}])")),
                  ValidationError);
  CHECK_THROWS_AS(parse_registry(Json::parse(R"([{"model_name":"x","backend":"hf_local"}])")), ValidationError);
  CHECK_THROWS_AS(parse_registry(Json::parse(R"({"model_name":"x"})")), ValidationError);
}

TEST_CASE("unused registry fields are kept, not validated") {
  Json entry = Json::parse(kSampleEntry);
  entry["chat_template"] = "{{ messages }}";
  entry["eos_to_cull"] = "<|eot_id|>";
  auto reg = parse_registry(Json::array({entry}));
  CHECK(reg.resolve("my-model-8b").extra.at("eos_to_cull") == "<|eot_id|>");
}

TEST_CASE("resolve is exact and lists known names") {
  auto reg = parse_registry(Json::array({Json::parse(kSampleEntry),
                                         Json::parse(R"({"model_name":"echo","backend":"programmatic",
                                                          "player_kind":"echo"})")}));
  CHECK_THROWS_AS(reg.resolve(""), UnknownNameError);
  std::string msg = unknown_message(reg, "MY-MODEL-8B");
  CHECK(msg.find("my-model-8b") != std::string::npos);
  CHECK(msg.find("echo") != std::string::npos);
  CHECK(reg.names() == std::vector<std::string>{"my-model-8b", "echo"});
}

TEST_CASE("relative script paths resolve against the registry file") {
  TempDir dir;
  fs::create_directories(dir / "scripts");
  std::ofstream(dir / "scripts/g.txt") << "GUESS: Eyesore\nGUESS: Ugly\n";
  std::ofstream(dir / "model_registry.json")
      << R"([{"model_name":"g","backend":"scripted","script_path":"scripts/g.txt"}])";
  auto reg = load_registry(dir / "model_registry.json");
  CHECK(reg.resolve("g").script_path == dir / "scripts/g.txt");
  CHECK_THROWS_AS(load_registry(dir / "nope.json"), IoError);
}

TEST_CASE("scripted backend replays per (episode, role) and runs out") {
  TempDir dir;
  std::ofstream(dir / "s.txt") << "GUESS: Eyesore\nGUESS: Ugly\nCLUE: two\\nlines\n";
  ModelSpec spec;
  spec.model_name = "s";
  spec.backend = BackendKind::scripted;
  spec.script_path = dir / "s.txt";
  auto backend = make_backend(spec);
  ChatContext ctx = kCtx;
  const ChatContext before = ctx;
  CallKey a{"ep1", "guesser"}, b{"ep2", "guesser"};
  CHECK(backend->generate(ctx, a).text == "GUESS: Eyesore");
  CHECK(backend->generate(ctx, a).text == "GUESS: Ugly");
  CHECK(backend->generate(ctx, b).text == "GUESS: Eyesore");
  CHECK(backend->generate(ctx, a).text == "CLUE: two\nlines");
  CHECK(ctx == before);
  try {
    backend->generate(ctx, a);
    FAIL("expected exhaustion");
  } catch (const BackendError& e) {
    CHECK(std::string(e.what()).find("script exhausted") != std::string::npos);
  }
}

TEST_CASE("echo player returns the last user message") {
  ModelSpec spec;
  spec.model_name = "echo";
  spec.player_kind = "echo";
  auto backend = make_backend(spec);
  ChatContext ctx = {{"user", "first"}, {"assistant", "reply"}, {"user", "GUESS: Ugly"}};
  CHECK(backend->generate(ctx, {}).text == "GUESS: Ugly");
  spec.player_kind = "nonsense";
  CHECK_THROWS_AS(make_backend(spec), ValidationError);
  spec.player_kind = "wordle_solver";
  CHECK_THROWS_AS(make_backend(spec), ValidationError);
}

TEST_CASE("wordle solver narrows with feedback") {
  TempDir dir;
  std::ofstream(dir / "words.txt") << "crane\nslate\nabbey\nbabes\n";
  ModelSpec spec;
  spec.model_name = "solver";
  spec.player_kind = "wordle_solver";
  spec.word_list = dir / "words.txt";
  auto backend = make_backend(spec);
  CHECK(backend->generate({{"user", "start"}}, {}).text == "GUESS: abbey");
  ChatContext ctx = {{"user", "start"}, {"assistant", "GUESS: abbey"}, {"user", R"(Feedback for "abbey": yygg-.)"}};
  CHECK(backend->generate(ctx, {}).text == "GUESS: babes");
}

TEST_CASE("chat context shape") {
  CHECK(check_chat_context(kCtx).empty());
  CHECK_FALSE(check_chat_context({}).empty());
  CHECK_FALSE(check_chat_context({{"user", "a"}, {"user", "b"}}).empty());
  CHECK_FALSE(check_chat_context({{"assistant", "a"}}).empty());
  CHECK_FALSE(check_chat_context({{"user", "a"}, {"system", "b"}}).empty());
}

TEST_CASE("openai-compatible client wire format") {
  StubServer stub;
  stub.reply = [](int, const Json&) { return std::pair{200, std::string("CLUE: x")}; };
  ::setenv("CLEM_TEST_KEY", "sk-test", 1);
  auto backend = make_backend(stub.spec());
  Completion c = backend->generate(kCtx, {});
  CHECK(c.text == "CLUE: x");
  CHECK(c.finish_reason == "stop");
  CHECK(c.request_stats.completion_chars == 7);
  REQUIRE(stub.bodies.size() == 1);
  const Json& body = stub.bodies[0];
  CHECK(body.at("model") == "org/stub-model");
  CHECK(body.at("max_tokens") == 256);
  CHECK(body.at("messages").size() == 2);
  CHECK(body.at("messages")[1].at("content") == "hello");
  CHECK(body.at("temperature").is_number_float());
  CHECK(body.at("temperature").get<double>() == 0.0);
  CHECK(body.dump().find("\"temperature\":0.0") != std::string::npos);
  CHECK(stub.auth_headers[0] == "Bearer sk-test");

  SUBCASE("empty key sends no Authorization header") {
    ::setenv("CLEM_TEST_KEY", "", 1);
    backend->generate(kCtx, {});
    CHECK(stub.auth_headers.back().empty());
  }
  SUBCASE("unset key variable is a backend error") {
    ::unsetenv("CLEM_TEST_UNSET");
    auto unset = make_backend(stub.spec("CLEM_TEST_UNSET"));
    CHECK_THROWS_AS(unset->generate(kCtx, {}), BackendError);
  }
}

TEST_CASE("retry policy") {
  ::setenv("CLEM_TEST_KEY", "k", 1);
  StubServer stub;
  auto backend = make_backend(stub.spec());

  SUBCASE("5xx then success") {
    stub.reply = [](int attempt, const Json&) {
      return attempt < 3 ? std::pair{503, std::string()} : std::pair{200, std::string("ok")};
    };
    CHECK(backend->generate(kCtx, {}).text == "ok");
    CHECK(stub.calls() == 3);
  }
  SUBCASE("429 is retried") {
    stub.reply = [](int attempt, const Json&) {
      return attempt < 2 ? std::pair{429, std::string()} : std::pair{200, std::string("ok")};
    };
    CHECK(backend->generate(kCtx, {}).text == "ok");
    CHECK(stub.calls() == 2);
  }
  SUBCASE("persistent 500 gives up after two retries") {
    stub.reply = [](int, const Json&) { return std::pair{500, std::string()}; };
    try {
      backend->generate(kCtx, {});
      FAIL("expected BackendError");
    } catch (const BackendError& e) {
      CHECK(e.status() == 500);
    }
    CHECK(stub.calls() == 3);
  }
  SUBCASE("other 4xx is never retried") {
    for (int status : {400, 401, 404, 422}) {
      stub.reply = [status](int, const Json&) { return std::pair{status, std::string()}; };
      std::size_t before = stub.calls();
      try {
        backend->generate(kCtx, {});
        FAIL("expected BackendError");
      } catch (const BackendError& e) {
        CHECK(e.status() == status);
      }
      CHECK(stub.calls() == before + 1);
    }
  }
  SUBCASE("transport errors are retried and reported") {
    ModelSpec dead = stub.spec();
    dead.base_url = "http://127.0.0.1:1/v1";
    dead.timeout_s = 1;
    try {
      make_backend(dead)->generate(kCtx, {});
      FAIL("expected BackendError");
    } catch (const BackendError& e) {
      CHECK(e.status() == 0);
      CHECK(std::string(e.what()).find("transport") != std::string::npos);
    }
  }
}

TEST_CASE("malformed base_url is rejected up front") {
  ModelSpec s;
  s.model_name = "bad";
  s.backend = BackendKind::openai_compatible;
  s.base_url = "localhost:8000";
  CHECK_THROWS_AS(make_backend(s), ValidationError);
}

TEST_CASE("pool bounds in-flight requests per model") {
  std::atomic<int> in_flight{0}, peak{0};
  StubServer stub;
  stub.reply = [&](int, const Json&) {
    int now = ++in_flight;
    int p = peak.load();
    while (now > p && !peak.compare_exchange_weak(p, now)) {
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(30));
    --in_flight;
    return std::pair{200, std::string("x")};
  };
  ::setenv("CLEM_TEST_KEY", "k", 1);
  ModelSpec http = stub.spec();
  http.max_concurrency = 2;
  BackendPool pool;
  auto backend = pool.get(http);
  CHECK(pool.get(http) == backend);
  ModelSpec warmer = http;
  warmer.temperature = 0.7;
  CHECK(pool.get(warmer) != backend);
  {
    std::vector<std::jthread> threads;
    for (int i = 0; i < 8; ++i) threads.emplace_back([&] { backend->generate(kCtx, {}); });
  }
  CHECK(stub.calls() == 8);
  CHECK(peak.load() == 2);
}

TEST_CASE("installed backends take precedence") {
  BackendPool pool;
  auto fixed = std::make_shared<testing::FnBackend>([](const ChatContext&, const CallKey&) { return std::string("x"); });
  pool.install("echo", fixed);
  ModelSpec spec;
  spec.model_name = "echo";
  spec.player_kind = "echo";
  CHECK(pool.get(spec) == fixed);
}
