#include "clem/instancegen.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <map>
#include <set>

#include "clem/prng.hpp"
#include "clem/serialize.hpp"
#include "clem/wordle.hpp"

namespace fs = std::filesystem;

namespace clem {

WordResource parse_word_resource(std::string_view bytes) {
  Json j;
  try {
    j = Json::parse(bytes);
  } catch (const Json::parse_error& e) {
    throw ValidationError(std::string("malformed word resource: ") + e.what());
  }
  WordResource res;
  try {
    for (const auto& e : j.at("entries")) {
      WordEntry entry;
      entry.word = e.at("word").get<std::string>();
      entry.related = e.value("related", std::vector<std::string>{});
      entry.stratum = e.at("stratum").get<std::string>();
      entry.lang = e.at("lang").get<std::string>();
      res.entries.push_back(std::move(entry));
    }
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("bad word resource entry: ") + e.what());
  }
  return res;
}

WordResource load_word_resource(const fs::path& path) { return parse_word_resource(read_file(path)); }

std::vector<std::string> check_resource(const WordResource& resource, ResourceKind kind) {
  std::vector<std::string> problems;
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& e : resource.entries) {
    if (!seen.emplace(e.lang, e.word).second) problems.push_back("duplicate word '" + e.word + "' for lang " + e.lang);
    if (std::find(kStrata.begin(), kStrata.end(), e.stratum) == kStrata.end()) {
      problems.push_back("word '" + e.word + "' has unknown stratum '" + e.stratum + "'");
    }
    if (e.lang.empty()) problems.push_back("word '" + e.word + "' has no lang");
    if (kind == ResourceKind::wordle && !is_wordle_word(e.word)) {
      problems.push_back("'" + e.word + "' is not a 5-letter a-z word");
    }
    if (kind == ResourceKind::taboo) {
      if (e.word.empty()) problems.emplace_back("empty taboo word");
      if (e.related.size() < 3) problems.push_back("taboo word '" + e.word + "' has fewer than 3 related words");
    }
  }
  return problems;
}

namespace {

void require_valid(const WordResource& resource, ResourceKind kind) {
  if (auto problems = check_resource(resource, kind); !problems.empty()) {
    std::string msg = "invalid word resource: " + problems.front();
    if (problems.size() > 1) msg += " (and " + std::to_string(problems.size() - 1) + " more)";
    throw ValidationError(msg);
  }
}

template <typename MakeParams>
std::vector<Experiment> sample_strata(const WordResource& resource, int n, std::uint64_t seed,
                                      const std::string& lang, const std::string& game, MakeParams make_params) {
  if (n <= 0) throw ValidationError("n_per_stratum must be positive");
  std::vector<Experiment> out;
  for (std::size_t index = 0; index < kStrata.size(); ++index) {
    std::vector<const WordEntry*> pool;
    for (const auto& e : resource.entries) {
      if (e.lang == lang && e.stratum == kStrata[index]) pool.push_back(&e);
    }
    if (pool.size() < static_cast<std::size_t>(n)) {
      throw ValidationError("stratum '" + std::string(kStrata[index]) + "' (" + lang + ") has " +
                            std::to_string(pool.size()) + " entries, " + std::to_string(n) + " requested");
    }
    Xoshiro256 rng(seed, index);
    rng.shuffle(std::span(pool));
    Experiment exp{std::to_string(index) + "_" + std::string(kStrata[index]) + "_" + lang, game, lang, {}};
    for (int i = 0; i < n; ++i) exp.instances.push_back(Instance{i, make_params(*pool[i], rng)});
    out.push_back(std::move(exp));
  }
  return out;
}

}  // namespace

std::vector<Experiment> generate_taboo(const WordResource& resource, int n_per_stratum, std::uint64_t seed,
                                       const std::string& lang) {
  require_valid(resource, ResourceKind::taboo);
  return sample_strata(resource, n_per_stratum, seed, lang, "taboo", [](const WordEntry& e, Xoshiro256& rng) {
    std::vector<std::string> related = e.related;
    rng.shuffle(std::span(related));
    related.resize(3);
    return Json{{"target_word", e.word}, {"related_words", related}};
  });
}

std::vector<Experiment> generate_wordle(const WordResource& resource, int n_per_stratum, std::uint64_t seed,
                                        const std::string& lang) {
  require_valid(resource, ResourceKind::wordle);
  return sample_strata(resource, n_per_stratum, seed, lang, "wordle",
                       [](const WordEntry& e, Xoshiro256&) { return Json{{"target_word", e.word}}; });
}

std::vector<Experiment> generate_programmatic(const Game& game, int n, std::uint64_t seed, const std::string& lang) {
  if (!game.has_programmatic_generator()) {
    throw UnsupportedOperation("game '" + game.name() + "' is sampling-only; no programmatic generator");
  }
  return game.generate_programmatic(n, seed, lang);
}

std::string serialize_instance_file(const std::vector<Experiment>& experiments, const GenerationInfo& info) {
  for (const auto& e : experiments) {
    if (auto problems = check_invariants(e); !problems.empty()) {
      throw ValidationError("experiment '" + e.experiment_name + "': " + problems.front());
    }
  }
  Json j = {{"experiments", experiments},
            {"generator",
             {{"prng", info.prng},
              {"seed", info.seed},
              {"n", info.n},
              {"method", info.method},
              {"resource_sha256", info.resource_sha256},
              {"tool_version", info.tool_version}}}};
  return canonical_dump(j);
}

std::vector<Experiment> parse_instance_file(std::string_view bytes) {
  Json j;
  try {
    j = Json::parse(bytes);
  } catch (const Json::parse_error& e) {
    throw ValidationError(std::string("malformed instance file: ") + e.what());
  }
  try {
    const Json& list = j.is_object() ? j.at("experiments") : j;
    auto experiments = list.get<std::vector<Experiment>>();
    for (const auto& e : experiments) {
      if (auto problems = check_invariants(e); !problems.empty()) {
        throw ValidationError("experiment '" + e.experiment_name + "': " + problems.front());
      }
    }
    return experiments;
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("bad instance file: ") + e.what());
  }
}

std::vector<Experiment> load_instance_file(const fs::path& path) { return parse_instance_file(read_file(path)); }

fs::path instance_file_path(const fs::path& game_dir, const std::string& lang, const std::string& version) {
  return game_dir / "instances" / lang / ("instances_v" + version + ".json");
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

}  // namespace clem
