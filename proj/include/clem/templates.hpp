#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "clem/core.hpp"

namespace clem {

class TemplateError : public Error {
 public:
  using Error::Error;
};

// A placeholder value; lists render comma-separated.
using TemplateValue = std::variant<std::string, std::vector<std::string>>;
using TemplateVars = std::map<std::string, TemplateValue>;

// Replaces every ${name}. A placeholder without a value or an unterminated
// "${" is a TemplateError; "$$" produces a literal '$'.
std::string render_template(std::string_view text, const TemplateVars& vars);

// The *.template files of one language directory, keyed by file stem.
class TemplateSet {
 public:
  TemplateSet() = default;
  static TemplateSet load(const std::filesystem::path& dir);

  const std::string& get(const std::string& name) const;
  bool contains(const std::string& name) const { return texts_.contains(name); }
  std::string render(const std::string& name, const TemplateVars& vars) const;

  void set(const std::string& name, std::string text) { texts_[name] = std::move(text); }

 private:
  std::map<std::string, std::string> texts_;
};

}  // namespace clem
