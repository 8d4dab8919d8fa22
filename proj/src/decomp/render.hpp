#pragma once

#include <stdexcept>
#include <string>

#include "distill/distilled.hpp"
#include "morph/registry.hpp"
#include "syntax/frontend.hpp"

namespace distilc::decomp {

// A morpheme in the distilled code has no surface form in the target
// language (deque<> in C#, char in Python).
struct UnrenderableMorpheme : std::runtime_error {
  UnrenderableMorpheme(const std::string& morpheme_text, Language target);
  std::string morpheme;
};

// The distilled token stream does not follow the template grammar.
struct MalformedDistilled : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Per-target rendering knobs. Name bags join in camelCase for java/csharp
// and snake_case for cpp/python; indent is one nesting level.
struct RenderContext {
  Language target = Language::Cpp;
  bool camel_names = false;
  std::string indent = "    ";

  static RenderContext for_target(Language target);
};

// Joins canonical (sorted) bag words into one identifier. Deterministic; a
// leading digit gains an underscore prefix, reserved words a suffix.
std::string render_name(const std::vector<std::string>& words,
                        const RenderContext& ctx);

// Parses a distilled token stream back into the unified tree (the exact
// inverse of reassemble). Throws MalformedDistilled.
syntax::SyntaxTree parse_distilled(const distill::DistilledCode& code);

// Renders distilled code as one compilable source unit in the target
// language: the function plus the minimal wrapper the target needs (class
// for java/csharp, includes/imports elsewhere).
std::string decompile(const distill::DistilledCode& code, Language target,
                      const morph::MorphemeRegistry& registry);

struct RoundTripReport {
  bool pass = false;
  bool fuzzy = false;     // scaffold carries best-effort fuzzy calls
  std::string cause;      // empty when pass
  std::string scaffold;   // decompiled text
  std::string before;     // canonical distilled form of the input
  std::string after;      // same, re-distilled from the scaffold
};

// distill -> decompile -> re-distill; passes when both canonical distilled
// forms are identical.
RoundTripReport round_trip_check(const syntax::SourceFunction& fn,
                                 Language target,
                                 const morph::MorphemeRegistry& registry);

}  // namespace distilc::decomp
