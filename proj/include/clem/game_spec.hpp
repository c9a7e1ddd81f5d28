#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "clem/core.hpp"

namespace clem {

struct ValidationReport {
  std::vector<std::string> problems;

  bool ok() const { return problems.empty(); }
};

// Reads {game_dir}/clemgame.json and points template_root at
// {game_dir}/templates.
GameSpec load_game_spec(const std::filesystem::path& game_dir);

// Checks the spec against the files under template_root. Every role needs
// initial_{role}.template in every declared language; relay_*/initial_*
// templates naming undeclared roles are reported, as are languages without a
// template directory. `extra_templates` lists game-specific file names that
// must also exist per language.
//
// Throws IoError when template_root itself cannot be read; everything else
// goes into the report.
ValidationReport validate_game_spec(const GameSpec& spec,
                                    const std::vector<std::string>& extra_templates = {});

}  // namespace clem
