#include "lang.hpp"

namespace distilc {

std::optional<Language> language_from_name(std::string_view name) {
  if (name == "cpp" || name == "c++" || name == "cxx") return Language::Cpp;
  if (name == "java") return Language::Java;
  if (name == "csharp" || name == "cs" || name == "c#") return Language::CSharp;
  if (name == "python" || name == "py") return Language::Python;
  return std::nullopt;
}

std::optional<Language> language_for_path(std::string_view path) {
  auto dot = path.rfind('.');
  if (dot == std::string_view::npos) return std::nullopt;
  std::string_view ext = path.substr(dot + 1);
  if (ext == "py") return Language::Python;
  if (ext == "java") return Language::Java;
  if (ext == "cs") return Language::CSharp;
  if (ext == "cpp" || ext == "cc" || ext == "cxx" || ext == "hpp" || ext == "h")
    return Language::Cpp;
  return std::nullopt;
}

std::string language_switch_token(Language lang) {
  return "<" + std::string(to_string(lang)) + ">";
}

}  // namespace distilc
