#pragma once

#include <memory>
#include <string>
#include <vector>

#include "morph/pattern.hpp"

namespace distilc::distill {

// Structural form of a morpheme pattern cell, e.g. "rand()%(b-a)+a".
// Parens group only; they carry no node of their own.
struct PExpr {
  enum Kind {
    Slot,   // slot letter in `slot`
    Name,   // identifier; text
    Lit,    // literal; text ('' compiles to empty text)
    BinOp,  // text = op; kids = {lhs, rhs}
    UnOp,   // text = op; kids = {operand}
    Call,   // kids = {callee, args...}
    Member, // text = member name; kids = {object}
    KwArg,  // text = argument name; kids = {value}
  };

  Kind kind = Name;
  char slot = 0;
  std::string text;
  std::vector<PExpr> kids;
};

struct PatternCompileError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Compiles an operator/builtin pattern to its expression form.
PExpr compile_pattern(const morph::Pattern& pattern);

// Token count of the source pattern; used to try specific rules before
// general ones (e.g. "cout<<a<<endl" before "cout<<a", "rand()%(b-a)+a"
// before "a+b").
int pattern_size(const morph::Pattern& pattern);

}  // namespace distilc::distill
