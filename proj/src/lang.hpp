#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace distilc {

// The four supported source languages. Closed set: every API taking a
// Language rejects anything else at the parsing boundary.
enum class Language {
  Cpp,
  Java,
  CSharp,
  Python,
};

constexpr const char* kLanguageNames[] = {"cpp", "java", "csharp", "python"};

inline std::string_view to_string(Language lang) {
  return kLanguageNames[static_cast<int>(lang)];
}

std::optional<Language> language_from_name(std::string_view name);

// Infers the language from a file extension (.py/.java/.cs/.cpp/.cc/.cxx/.hpp/.h).
std::optional<Language> language_for_path(std::string_view path);

// Decoder-side language switch token, e.g. "<java>".
std::string language_switch_token(Language lang);

}  // namespace distilc
