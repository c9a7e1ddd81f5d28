#include "clem/game_spec.hpp"

#include <algorithm>
#include <set>

#include "clem/serialize.hpp"

namespace fs = std::filesystem;

namespace clem {

GameSpec load_game_spec(const fs::path& game_dir) {
  auto spec = deserialize<GameSpec>(read_file(game_dir / "clemgame.json"));
  spec.template_root = game_dir / "templates";
  return spec;
}

namespace {

// "initial_guesser.template" -> "guesser"; "" when the file is not a
// role-addressed template.
std::string role_of_template(const std::string& file_name) {
  static constexpr std::string_view kSuffix = ".template";
  for (std::string_view prefix : {"initial_", "relay_"}) {
    if (file_name.starts_with(prefix) && file_name.ends_with(kSuffix) &&
        file_name.size() > prefix.size() + kSuffix.size()) {
      return file_name.substr(prefix.size(), file_name.size() - prefix.size() - kSuffix.size());
    }
  }
  return {};
}

}  // namespace

ValidationReport validate_game_spec(const GameSpec& spec,
                                    const std::vector<std::string>& extra_templates) {
  ValidationReport report;
  report.problems = check_invariants(spec);

  std::error_code ec;
  if (!fs::is_directory(spec.template_root, ec)) {
    throw IoError("template root " + spec.template_root.string() + " is not a readable directory");
  }
  fs::directory_iterator probe(spec.template_root, ec);
  if (ec) throw IoError("cannot read template root " + spec.template_root.string() + ": " + ec.message());

  std::set<std::string> roles(spec.roles.begin(), spec.roles.end());
  for (const auto& lang : spec.languages) {
    fs::path dir = spec.template_root / lang;
    if (!fs::is_directory(dir, ec)) {
      report.problems.push_back("unsupported language '" + lang + "': no template directory " +
                                dir.string());
      continue;
    }
    std::vector<std::string> required;
    for (const auto& role : spec.roles) required.push_back("initial_" + role + ".template");
    required.insert(required.end(), extra_templates.begin(), extra_templates.end());
    for (const auto& name : required) {
      if (!fs::is_regular_file(dir / name, ec)) {
        report.problems.push_back("missing template " + (fs::path(lang) / name).string());
      }
    }
    std::vector<std::string> files;
    for (const auto& entry : fs::directory_iterator(dir, ec)) {
      if (entry.is_regular_file()) files.push_back(entry.path().filename().string());
    }
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
      auto role = role_of_template(file);
      if (!role.empty() && !roles.contains(role)) {
        report.problems.push_back("template " + (fs::path(lang) / file).string() +
                                  " references unknown role '" + role + "'");
      }
    }
  }
  return report;
}

}  // namespace clem
