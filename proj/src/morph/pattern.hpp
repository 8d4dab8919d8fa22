#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace distilc::morph {

// Slot bindings: lowercase slot letter -> replacement text.
using SlotBindings = std::map<char, std::string>;

// A morpheme pattern, e.g. "Math.pow(a,b)" or "HashMap<> a". Tokenized so
// that instantiation can substitute slots while reproducing the original
// spacing, and so that shape keys are whitespace-insensitive.
struct Pattern {
  struct Tok {
    enum Kind { Slot, Word, Sym } kind;
    std::string text;
    bool space_before = false;
  };

  std::vector<Tok> toks;

  // Canonical lookup key: tokens joined back-to-back, with a single space
  // only between adjacent word-like tokens ("a and b" stays distinct from
  // a single word).
  std::string shape() const;

  std::set<char> slots() const;

  // Substitutes slot letters with their bindings, preserving recorded
  // spacing. Throws std::invalid_argument when a slot has no binding.
  std::string instantiate(const SlotBindings& args) const;

  bool empty() const { return toks.empty(); }
};

Pattern parse_pattern(std::string_view text);

// shape() of the parse, as a convenience for callers holding raw text.
std::string normalize_shape(std::string_view text);

}  // namespace distilc::morph
