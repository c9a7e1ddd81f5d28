#include "clem/templates.hpp"

#include "clem/serialize.hpp"

namespace fs = std::filesystem;

namespace clem {

std::string render_template(std::string_view text, const TemplateVars& vars) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c != '$' || i + 1 >= text.size()) {
      out.push_back(c);
      continue;
    }
    if (text[i + 1] == '$') {
      out.push_back('$');
      ++i;
      continue;
    }
    if (text[i + 1] != '{') {
      out.push_back(c);
      continue;
    }
    auto close = text.find('}', i + 2);
    if (close == std::string_view::npos) {
      throw TemplateError("unterminated placeholder at offset " + std::to_string(i));
    }
    std::string name(text.substr(i + 2, close - i - 2));
    auto it = vars.find(name);
    if (it == vars.end()) throw TemplateError("no value for placeholder ${" + name + "}");
    if (const auto* s = std::get_if<std::string>(&it->second)) {
      out += *s;
    } else {
      const auto& list = std::get<std::vector<std::string>>(it->second);
      for (std::size_t k = 0; k < list.size(); ++k) {
        if (k) out += ", ";
        out += list[k];
      }
    }
    i = close;
  }
  return out;
}

TemplateSet TemplateSet::load(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw IoError("template directory " + dir.string() + " not found");
  TemplateSet set;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".template") continue;
    std::string text = read_file(entry.path());
    while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
    set.texts_[entry.path().stem().string()] = std::move(text);
  }
  return set;
}

const std::string& TemplateSet::get(const std::string& name) const {
  auto it = texts_.find(name);
  if (it == texts_.end()) throw TemplateError("missing template '" + name + ".template'");
  return it->second;
}

std::string TemplateSet::render(const std::string& name, const TemplateVars& vars) const {
  try {
    return render_template(get(name), vars);
  } catch (const TemplateError& e) {
    throw TemplateError(name + ".template: " + e.what());
  }
}

}  // namespace clem
