#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace clem {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

std::optional<std::string> process_env(const std::string& name);

// "key = value" lines; '#' starts a comment. Throws IoError if unreadable.
std::map<std::string, std::string> parse_config_file(const std::filesystem::path& path);

// Resolves one setting: flag, then CLEM_<KEY> in the environment, then the
// config file, then the default.
std::string resolve_setting(const std::string& key, const std::optional<std::string>& flag, const EnvLookup& env,
                            const std::map<std::string, std::string>& config, const std::string& fallback);

// Runs the command line (args excludes the program name). Exit codes: 0 ok,
// 1 runtime failure (strict mode or fatal error), 2 usage error or unknown
// game/model.
int clem_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
              const EnvLookup& env = process_env);

}  // namespace clem
