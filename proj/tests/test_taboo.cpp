#include "clem/taboo.hpp"

#include "clem/serialize.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace clem;
using testing::Gen;
using testing::QueueBackend;

namespace {

const TabooState kUgly{"ugly", {"displeasing", "despicable", "unattractive"}, 1, 3};

const char* kFirstClue = "Something that is not pleasing to the eye, often making a bad impression.";
const char* kSecondClue = "More about the quality of a person or thing, rather than a nuisance or distraction.";

EpisodeRecord play_ugly(std::vector<std::string> describer, std::vector<std::string> guesser,
                        EngineConfig cfg = testing::fixed_clock_config()) {
  const Game& taboo = testing::bundled_games().get("taboo");
  auto hooks = taboo.start(testing::ugly_instance(), "en");
  return run_episode(*hooks, EpisodeId{"taboo", "0_high_en", 0, "ugly"},
                     testing::players({{"describer", std::make_shared<QueueBackend>(describer)},
                                       {"guesser", std::make_shared<QueueBackend>(guesser)}}),
                     cfg);
}

EpisodeRecord finished(Outcome outcome, int turn) {
  EpisodeRecord r;
  r.outcome = outcome;
  r.final_turn = turn;
  r.player_models = {{"describer", "m"}, {"guesser", "m"}};
  EventKind kind = outcome == Outcome::success ? EventKind::success
                   : outcome == Outcome::lost  ? EventKind::lose
                                               : EventKind::abort;
  r.events = {Event{0, turn, "GM", "GM", kind, Json::object(), ""}};
  return r;
}

}  // namespace

TEST_CASE("clue validation examples") {
  CHECK_FALSE(taboo_validate_clue(kFirstClue, kUgly).has_value());
  CHECK(taboo_validate_clue("An unattractive thing", kUgly) == std::optional<std::string>("unattractive"));
  CHECK(taboo_validate_clue("Something ugly-looking", kUgly) == std::optional<std::string>("ugly"));
  CHECK(taboo_validate_clue("Even UGLIER than that", kUgly) == std::optional<std::string>("ugly"));
  CHECK(taboo_validate_clue("quite Despicable!", kUgly) == std::optional<std::string>("despicable"));
  // Only token prefixes count, not substrings.
  CHECK_FALSE(taboo_validate_clue("smugly smiling", kUgly).has_value());
  CHECK_FALSE(taboo_validate_clue(kSecondClue, kUgly).has_value());
  // The y -> i stem applies after a consonant only.
  TabooState grey{"grey", {"ash", "dull", "slate"}, 1, 3};
  CHECK_FALSE(taboo_validate_clue("greigeish", grey).has_value());
  CHECK(taboo_validate_clue("greyish", grey) == std::optional<std::string>("grey"));
}

TEST_CASE("tokens split on ASCII punctuation and keep UTF-8 letters") {
  CHECK(taboo_tokens("Ugly-looking, isn't it?") == std::vector<std::string>{"ugly", "looking", "isn", "t", "it"});
  CHECK(taboo_tokens("caf\xc3\xa9 au lait") == std::vector<std::string>{"caf\xc3\xa9", "au", "lait"});
  CHECK(taboo_tokens("  ...  ").empty());
}

TEST_CASE("accepted clues contain no taboo prefix (rescan)") {
  Gen g(5);
  const std::vector<std::string> vocab = {"ugly", "Uglier", "ugl", "un", "unattractive", "attractive", "despic",
                                          "DESPICABLE", "pleasing", "displeasing", "eye", "thing", "bad",
                                          "smugly", "x", "caf\xc3\xa9"};
  const std::vector<std::string> seps = {" ", "-", ", ", ".", "'", "\n", "_"};
  for (int i = 0; i < 5000; ++i) {
    std::string clue;
    for (int k = g.range(1, 6); k > 0; --k) clue += g.pick(vocab) + g.pick(seps);
    auto verdict = taboo_validate_clue(clue, kUgly);
    bool hit = false;
    for (const auto& token : taboo_tokens(clue)) {
      for (const auto& w : {kUgly.target_word, kUgly.related_words[0], kUgly.related_words[1], kUgly.related_words[2]}) {
        if (token.rfind(w, 0) == 0) hit = true;
        if (w == "ugly" && token.rfind("ugli", 0) == 0) hit = true;
      }
    }
    CHECK(verdict.has_value() == hit);
  }
}

TEST_CASE("guess checking") {
  CHECK(taboo_check_guess("Ugly", kUgly));
  CHECK_FALSE(taboo_check_guess("Eyesore", kUgly));
  CHECK(taboo_check_guess("ugly.", kUgly));
  CHECK(taboo_check_guess("\"UGLY!\"", kUgly));
  CHECK_FALSE(taboo_check_guess("uglyy", kUgly));
}

TEST_CASE("quality is 100/t") {
  CHECK(taboo_score(finished(Outcome::success, 1)) == 100.0);
  CHECK(taboo_score(finished(Outcome::success, 2)) == 50.0);
  CHECK(taboo_score(finished(Outcome::lost, 3)) == 0.0);
  CHECK_THROWS_AS(taboo_score(finished(Outcome::aborted, 1)), ValidationError);
  double last = 101.0;
  for (int t = 1; t <= 10; ++t) {
    double q = taboo_score(finished(Outcome::success, t));
    CHECK(q <= last);
    CHECK(q >= 0.0);
    last = q;
  }
}

TEST_CASE("state invariants") {
  CHECK(check_invariants(kUgly).empty());
  TabooState bad = kUgly;
  bad.related_words = {"ugly", "a", "b"};
  CHECK_FALSE(check_invariants(bad).empty());
  bad = kUgly;
  bad.related_words.pop_back();
  CHECK_FALSE(check_invariants(bad).empty());
  bad = kUgly;
  bad.target_word = "Ugly";
  CHECK_FALSE(check_invariants(bad).empty());
}

TEST_CASE("instance schema") {
  const Game& taboo = testing::bundled_games().get("taboo");
  CHECK(taboo.check_params(testing::ugly_instance()).empty());
  Instance extra = testing::ugly_instance();
  extra.params["hint"] = "x";
  CHECK_FALSE(taboo.check_params(extra).empty());
  Instance two = testing::ugly_instance();
  two.params["related_words"] = {"a", "b"};
  CHECK_FALSE(taboo.check_params(two).empty());
  Instance none{0, Json{{"related_words", {"a", "b", "c"}}}};
  CHECK_FALSE(taboo.check_params(none).empty());
  CHECK_THROWS_AS(taboo.start(none, "en"), ValidationError);
}

TEST_CASE("describer prompt uses the bundled wording") {
  const Game& taboo = testing::bundled_games().get("taboo");
  auto hooks = taboo.start(testing::ugly_instance(), "en");
  auto prompts = hooks->initial_prompts();
  REQUIRE(prompts.size() == 1);
  CHECK(prompts.at("describer") ==
        "We are playing a collaborative word guessing game. Your task is to describe a concept, without using its "
        "name, and without using some other related terms. The target concept is: ugly; the related words are: "
        "displeasing, despicable, unattractive. Start with \"CLUE: \", and be brief.");
}

TEST_CASE("episode flows") {
  SUBCASE("two-turn success") {
    auto r = play_ugly({std::string("CLUE: ") + kFirstClue, std::string("CLUE: ") + kSecondClue},
                       {"GUESS: Eyesore", "GUESS: Ugly"});
    CHECK(r.outcome == Outcome::success);
    CHECK(r.final_turn == 2);
    CHECK(check_event_log(r).empty());
    // describer: send, get, parse; guesser: send, get, parse; describer relay ...
    const Event& to_guesser = r.events[3];
    CHECK(to_guesser.target == "guesser");
    CHECK(to_guesser.content.get<std::string>().starts_with("We are playing a word guessing game."));
    CHECK(to_guesser.content.get<std::string>().ends_with(std::string("clue: ") + kFirstClue));
    const Event& to_describer = r.events[6];
    CHECK(to_describer.target == "describer");
    CHECK(to_describer.turn == 2);
    CHECK(to_describer.content.get<std::string>().find("\"eyesore\"") != std::string::npos);
    const Event& second_clue = r.events[9];
    CHECK(second_clue.content == std::string("The other player gave the following clue: ") + kSecondClue);
    CHECK(r.events.back().content.at("reason") == "correct_guess");
  }
  SUBCASE("guess without prefix aborts at turn 1") {
    auto r = play_ugly({std::string("CLUE: ") + kFirstClue}, {"eyesore"});
    CHECK(r.outcome == Outcome::aborted);
    CHECK(r.final_turn == 1);
  }
  SUBCASE("taboo word in clue loses") {
    auto r = play_ugly({"CLUE: An unattractive thing"}, {});
    CHECK(r.outcome == Outcome::lost);
    const Event& v = r.events[r.events.size() - 2];
    CHECK(v.kind == EventKind::violation);
    CHECK(v.content.at("reason") == "unattractive");
    // The guesser never saw anything.
    for (const auto& e : r.events) CHECK(e.target != "guesser");
  }
  SUBCASE("three wrong guesses lose") {
    auto r = play_ugly({"CLUE: a", "CLUE: b", "CLUE: c"}, {"GUESS: x", "GUESS: y", "GUESS: z"});
    CHECK(r.outcome == Outcome::lost);
    CHECK(r.final_turn == 3);
    CHECK(r.events.back().content.at("reason") == "out_of_turns");
  }
  SUBCASE("two-word guess is a format violation") {
    auto r = play_ugly({"CLUE: a"}, {"GUESS: an eyesore"});
    CHECK(r.outcome == Outcome::aborted);
  }
}

TEST_CASE("turn limit can be overridden") {
  GameCatalog games = GameCatalog::load(testing::kSourceDir / "games");
  GameOptions opts;
  opts.max_turns = 1;
  games.get_mutable("taboo").set_options(opts);
  auto hooks = games.get("taboo").start(testing::ugly_instance(), "en");
  CHECK(hooks->max_turns() == 1);
  CHECK_THROWS_AS(games.get("taboo").generate_programmatic(1, 1, "en"), UnsupportedOperation);
}
