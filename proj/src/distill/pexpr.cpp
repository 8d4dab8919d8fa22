#include "pexpr.hpp"

namespace distilc::distill {
namespace {

using morph::Pattern;

struct Parser {
  const std::vector<Pattern::Tok>& toks;
  size_t pos = 0;

  bool done() const { return pos >= toks.size(); }

  const Pattern::Tok* peek(size_t ahead = 0) const {
    return pos + ahead < toks.size() ? &toks[pos + ahead] : nullptr;
  }

  [[noreturn]] void fail(const std::string& why) {
    throw PatternCompileError("pattern: " + why + " at token " +
                              std::to_string(pos));
  }

  bool is_sym(const char* s, size_t ahead = 0) const {
    const auto* t = peek(ahead);
    return t && t->kind == Pattern::Tok::Sym && t->text == s;
  }

  bool is_word(const char* s) const {
    const auto* t = peek();
    return t && t->kind == Pattern::Tok::Word && t->text == s;
  }

  // Two-symbol operators are adjacent Sym tokens with no space between.
  bool take_op(const char* op) {
    size_t n = std::char_traits<char>::length(op);
    if (n == 1) {
      if (!is_sym(op)) return false;
      ++pos;
      return true;
    }
    char first[2] = {op[0], 0}, second[2] = {op[1], 0};
    if (!is_sym(first, 0) || !is_sym(second, 1)) return false;
    if (toks[pos + 1].space_before) return false;
    pos += 2;
    return true;
  }

  PExpr expr() { return or_level(); }

  PExpr binop(std::string op, PExpr lhs, PExpr rhs) {
    PExpr e;
    e.kind = PExpr::BinOp;
    e.text = std::move(op);
    e.kids.push_back(std::move(lhs));
    e.kids.push_back(std::move(rhs));
    return e;
  }

  PExpr or_level() {
    PExpr lhs = and_level();
    while (true) {
      if (take_op("||")) lhs = binop("||", std::move(lhs), and_level());
      else if (is_word("or")) { ++pos; lhs = binop("or", std::move(lhs), and_level()); }
      else return lhs;
    }
  }

  PExpr and_level() {
    PExpr lhs = cmp_level();
    while (true) {
      if (take_op("&&")) lhs = binop("&&", std::move(lhs), cmp_level());
      else if (is_word("and")) { ++pos; lhs = binop("and", std::move(lhs), cmp_level()); }
      else return lhs;
    }
  }

  PExpr cmp_level() {
    PExpr lhs = shift_level();
    while (true) {
      if (take_op("==")) lhs = binop("==", std::move(lhs), shift_level());
      else if (take_op("!=")) lhs = binop("!=", std::move(lhs), shift_level());
      else if (take_op("<=")) lhs = binop("<=", std::move(lhs), shift_level());
      else if (take_op(">=")) lhs = binop(">=", std::move(lhs), shift_level());
      else return lhs;
    }
  }

  PExpr shift_level() {
    PExpr lhs = add_level();
    while (take_op("<<")) lhs = binop("<<", std::move(lhs), add_level());
    return lhs;
  }

  PExpr add_level() {
    PExpr lhs = mul_level();
    while (true) {
      if (is_sym("+")) { ++pos; lhs = binop("+", std::move(lhs), mul_level()); }
      else if (is_sym("-")) { ++pos; lhs = binop("-", std::move(lhs), mul_level()); }
      else return lhs;
    }
  }

  PExpr mul_level() {
    PExpr lhs = unary_level();
    while (true) {
      if (take_op("**")) lhs = binop("**", std::move(lhs), unary_level());
      else if (take_op("//")) lhs = binop("//", std::move(lhs), unary_level());
      else if (is_sym("*")) { ++pos; lhs = binop("*", std::move(lhs), unary_level()); }
      else if (is_sym("/")) { ++pos; lhs = binop("/", std::move(lhs), unary_level()); }
      else if (is_sym("%")) { ++pos; lhs = binop("%", std::move(lhs), unary_level()); }
      else return lhs;
    }
  }

  PExpr unary_level() {
    if (is_sym("!") || is_word("not")) {
      std::string op = toks[pos].text;
      ++pos;
      PExpr e;
      e.kind = PExpr::UnOp;
      e.text = std::move(op);
      e.kids.push_back(unary_level());
      return e;
    }
    return postfix_level();
  }

  PExpr postfix_level() {
    PExpr e = primary();
    while (true) {
      if (is_sym("(")) {
        ++pos;
        PExpr call;
        call.kind = PExpr::Call;
        call.kids.push_back(std::move(e));
        if (!is_sym(")")) {
          while (true) {
            call.kids.push_back(argument());
            if (is_sym(",")) { ++pos; continue; }
            break;
          }
        }
        if (!is_sym(")")) fail("expected ')'");
        ++pos;
        e = std::move(call);
      } else if (is_sym(".")) {
        ++pos;
        const auto* t = peek();
        if (!t || t->kind == Pattern::Tok::Sym) fail("expected member name");
        PExpr m;
        m.kind = PExpr::Member;
        m.text = t->text;
        ++pos;
        m.kids.push_back(std::move(e));
        e = std::move(m);
      } else {
        return e;
      }
    }
  }

  // An argument may be a keyword argument: name '=' value.
  PExpr argument() {
    const auto* t = peek();
    if (t && t->kind == Pattern::Tok::Word && is_sym("=", 1) &&
        !is_sym("=", 2)) {
      PExpr kw;
      kw.kind = PExpr::KwArg;
      kw.text = t->text;
      pos += 2;
      kw.kids.push_back(expr());
      return kw;
    }
    return expr();
  }

  PExpr primary() {
    const auto* t = peek();
    if (!t) fail("unexpected end");
    if (t->kind == Pattern::Tok::Slot) {
      PExpr e;
      e.kind = PExpr::Slot;
      e.slot = t->text[0];
      ++pos;
      return e;
    }
    if (t->kind == Pattern::Tok::Word) {
      PExpr e;
      e.kind = PExpr::Name;
      e.text = t->text;
      ++pos;
      return e;
    }
    if (is_sym("(")) {
      ++pos;
      PExpr e = expr();
      if (!is_sym(")")) fail("expected ')'");
      ++pos;
      return e;
    }
    // '' is an empty string literal
    if (is_sym("'") && is_sym("'", 1)) {
      pos += 2;
      PExpr e;
      e.kind = PExpr::Lit;
      return e;
    }
    fail("unexpected token '" + t->text + "'");
  }
};

}  // namespace

PExpr compile_pattern(const morph::Pattern& pattern) {
  Parser p{pattern.toks};
  PExpr e = p.expr();
  if (!p.done()) p.fail("trailing tokens");
  return e;
}

int pattern_size(const morph::Pattern& pattern) {
  return static_cast<int>(pattern.toks.size());
}

}  // namespace distilc::distill
