#include "clem/transcript.hpp"

#include <regex>

#include "clem/serialize.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace clem;
using testing::QueueBackend;

namespace {

EpisodeRecord taboo_run(std::vector<std::string> describer, std::vector<std::string> guesser) {
  const Game& taboo = testing::bundled_games().get("taboo");
  auto hooks = taboo.start(testing::ugly_instance(), "en");
  return run_episode(*hooks, EpisodeId{"taboo", "0_high_en", 0, "ugly"},
                     testing::players({{"describer", std::make_shared<QueueBackend>(describer)},
                                       {"guesser", std::make_shared<QueueBackend>(guesser)}}),
                     testing::fixed_clock_config());
}

EpisodeRecord ugly_episode() {
  return taboo_run({"CLUE: Something that is not pleasing to the eye, often making a bad impression.",
                    "CLUE: More about the quality of a person or thing, rather than a nuisance or distraction."},
                   {"GUESS: Eyesore", "GUESS: Ugly"});
}

std::vector<int> seqs_in_order(const std::string& html) {
  std::vector<int> out;
  std::regex re("data-seq=\"(\\d+)\"");
  for (auto it = std::sregex_iterator(html.begin(), html.end(), re); it != std::sregex_iterator(); ++it) {
    out.push_back(std::stoi((*it)[1]));
  }
  return out;
}

}  // namespace

TEST_CASE("html escaping") {
  CHECK(html_escape("<b>\"Tom\" & 'Jerry'</b>") == "&lt;b&gt;&quot;Tom&quot; &amp; &#39;Jerry&#39;&lt;/b&gt;");
  CHECK(html_escape("caf\xc3\xa9") == "caf\xc3\xa9");
  CHECK(html_escape("") == "");
}

TEST_CASE("ugly episode renders every move") {
  auto record = ugly_episode();
  std::string html = transcribe_html(record);
  CHECK(html.starts_with("<!DOCTYPE html>"));
  CHECK(html.find("GUESS: Eyesore") != std::string::npos);
  CHECK(html.find("GUESS: Ugly") != std::string::npos);
  CHECK(html.find("CLUE: More about the quality of a person or thing") != std::string::npos);
  CHECK(html.find("scripted-describer") != std::string::npos);
  CHECK(html.find("<tr><td>outcome</td><td>success</td></tr>") != std::string::npos);
  CHECK(html.find("Game Master: success (correct_guess)") != std::string::npos);
  CHECK(html.find("<script") == std::string::npos);
  CHECK(html.find("http") == std::string::npos);

  std::vector<int> expected;
  for (const auto& e : record.events) expected.push_back(static_cast<int>(e.seq));
  CHECK(seqs_in_order(html) == expected);
  CHECK(transcribe_html(record) == html);
}

TEST_CASE("hostile content is escaped") {
  auto record = taboo_run({"CLUE: <script>alert('x')</script> & more"}, {"GUESS: <b>"});
  std::string html = transcribe_html(record);
  CHECK(html.find("<script>") == std::string::npos);
  CHECK(html.find("&lt;script&gt;alert(&#39;x&#39;)&lt;/script&gt; &amp; more") != std::string::npos);
  CHECK(html.find("<b>") == std::string::npos);
}

TEST_CASE("abort before any move") {
  const Game& taboo = testing::bundled_games().get("taboo");
  auto hooks = taboo.start(testing::ugly_instance(), "en");
  auto record = run_episode(*hooks, EpisodeId{"taboo", "0_high_en", 0, "ugly"}, {}, testing::fixed_clock_config());
  REQUIRE(record.outcome == Outcome::aborted);
  std::string html = transcribe_html(record);
  CHECK(html.find("Episode aborted: game_error before any player move.") != std::string::npos);
  CHECK(html.find("class=\"msg") == std::string::npos);

  auto format = taboo_run({"no prefix"}, {});
  std::string html2 = transcribe_html(format);
  CHECK(html2.find("Episode aborted: format_violation.") != std::string::npos);
  CHECK(html2.find("format violation: missing_prefix") != std::string::npos);
}

TEST_CASE("malformed logs are refused") {
  auto record = ugly_episode();
  record.events.pop_back();
  CHECK_THROWS_WITH_AS(transcribe_html(record), doctest::Contains("refusing to render transcript"), ValidationError);

  auto twice = ugly_episode();
  twice.events.push_back(twice.events.back());
  twice.events.back().seq = twice.events.size() - 1;
  CHECK_THROWS_AS(transcribe_html(twice), ValidationError);
}

TEST_CASE("rendering survives a persistence round trip") {
  auto record = ugly_episode();
  auto reloaded = Json::parse(canonical_dump(Json(record))).get<EpisodeRecord>();
  CHECK(transcribe_html(reloaded) == transcribe_html(record));
}
