#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "clem/core.hpp"
#include "clem/game.hpp"

namespace clem {

// Frequency bands in experiment-index order: 0_high, 1_medium, 2_low.
inline constexpr std::array<std::string_view, 3> kStrata = {"high", "medium", "low"};

struct WordEntry {
  std::string word;
  std::vector<std::string> related;  // Taboo only
  std::string stratum;
  std::string lang;
};

struct WordResource {
  std::vector<WordEntry> entries;
};

enum class ResourceKind { taboo, wordle };

WordResource parse_word_resource(std::string_view bytes);
WordResource load_word_resource(const std::filesystem::path& path);

// Words unique per language, known strata, and the per-kind entry rules
// (Taboo: at least 3 related words; Wordle: 5-letter a-z words).
std::vector<std::string> check_resource(const WordResource& resource, ResourceKind kind);

// One experiment per stratum. Each stratum is shuffled with its own PRNG
// stream and the first n entries taken, so a smaller n always yields a
// prefix of a larger one. Taboo instances keep the first 3 related words
// after a shuffle drawn from the same stream.
std::vector<Experiment> generate_taboo(const WordResource& resource, int n_per_stratum, std::uint64_t seed,
                                       const std::string& lang);
std::vector<Experiment> generate_wordle(const WordResource& resource, int n_per_stratum, std::uint64_t seed,
                                        const std::string& lang);
// Throws UnsupportedOperation when the game has no generator hook.
std::vector<Experiment> generate_programmatic(const Game& game, int n, std::uint64_t seed, const std::string& lang);

struct GenerationInfo {
  std::string prng{"xoshiro256starstar/splitmix64"};
  std::uint64_t seed = 0;
  int n = 0;
  std::string method;  // "sampling" | "programmatic"
  std::string resource_sha256;
  std::string tool_version{kEngineVersion};
};

// Instance file: {"experiments": [...], "generator": {...}} in canonical form.
std::string serialize_instance_file(const std::vector<Experiment>& experiments, const GenerationInfo& info);
std::vector<Experiment> parse_instance_file(std::string_view bytes);
std::vector<Experiment> load_instance_file(const std::filesystem::path& path);

std::filesystem::path instance_file_path(const std::filesystem::path& game_dir, const std::string& lang,
                                         const std::string& version);

std::string sha256_hex(std::string_view bytes);

}  // namespace clem
