#include "pattern.hpp"

#include <cctype>
#include <stdexcept>

namespace distilc::morph {
namespace {

bool word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

bool word_like(const Pattern::Tok& t) {
  return t.kind != Pattern::Tok::Sym;
}

}  // namespace

Pattern parse_pattern(std::string_view text) {
  Pattern p;
  bool pending_space = false;
  size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = true;
      ++i;
      continue;
    }
    Pattern::Tok tok;
    tok.space_before = pending_space && !p.toks.empty();
    pending_space = false;
    if (word_char(c)) {
      size_t j = i;
      while (j < text.size() && word_char(text[j])) ++j;
      tok.text = std::string(text.substr(i, j - i));
      tok.kind = (tok.text.size() == 1 && tok.text[0] >= 'a' &&
                  tok.text[0] <= 'c')
                     ? Pattern::Tok::Slot
                     : Pattern::Tok::Word;
      i = j;
    } else {
      tok.kind = Pattern::Tok::Sym;
      tok.text = std::string(1, c);
      ++i;
    }
    p.toks.push_back(std::move(tok));
  }
  return p;
}

std::string Pattern::shape() const {
  std::string out;
  const Tok* prev = nullptr;
  for (const auto& t : toks) {
    if (prev && word_like(*prev) && word_like(t)) out.push_back(' ');
    out += t.text;
    prev = &t;
  }
  return out;
}

std::set<char> Pattern::slots() const {
  std::set<char> out;
  for (const auto& t : toks)
    if (t.kind == Tok::Slot) out.insert(t.text[0]);
  return out;
}

std::string Pattern::instantiate(const SlotBindings& args) const {
  std::string out;
  for (const auto& t : toks) {
    if (t.space_before) out.push_back(' ');
    if (t.kind == Tok::Slot) {
      auto it = args.find(t.text[0]);
      if (it == args.end())
        throw std::invalid_argument("unbound slot '" + t.text + "'");
      out += it->second;
    } else {
      out += t.text;
    }
  }
  return out;
}

std::string normalize_shape(std::string_view text) {
  return parse_pattern(text).shape();
}

}  // namespace distilc::morph
