#include "render.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>

#include "distill/lower.hpp"
#include "distill/pexpr.hpp"
#include "syntax/parser.hpp"

namespace distilc::decomp {

using distill::binop_power;
using distill::DistilledCode;
using distill::DToken;
using distill::kAtomPower;
using distill::kTernaryPower;
using distill::kUnaryPower;
using distill::PExpr;
using distill::TokKind;
using morph::MorphemeRegistry;
using morph::MorphemeRule;
using syntax::SyntaxNode;
using syntax::SyntaxTree;

UnrenderableMorpheme::UnrenderableMorpheme(const std::string& morpheme_text,
                                           Language target)
    : std::runtime_error("morpheme '" + morpheme_text + "' has no " +
                         std::string(to_string(target)) + " surface form"),
      morpheme(morpheme_text) {}

RenderContext RenderContext::for_target(Language target) {
  RenderContext ctx;
  ctx.target = target;
  ctx.camel_names = target == Language::Java || target == Language::CSharp;
  return ctx;
}

std::string render_name(const std::vector<std::string>& words,
                        const RenderContext& ctx) {
  std::string out;
  for (const auto& w : words) {
    if (w.empty()) continue;
    if (!ctx.camel_names) {
      if (!out.empty()) out.push_back('_');
      out += w;
    } else if (out.empty()) {
      out += w;
    } else {
      out.push_back(
          static_cast<char>(std::toupper(static_cast<unsigned char>(w[0]))));
      out += w.substr(1);
    }
  }
  if (out.empty()) out = "_";
  if (std::isdigit(static_cast<unsigned char>(out[0]))) out.insert(0, "_");
  if (syntax::is_reserved_keyword(ctx.target, out)) out.push_back('_');
  return out;
}

namespace {

SyntaxNode mk(std::string kind, std::string text = "",
              std::vector<SyntaxNode> children = {}) {
  SyntaxNode n;
  n.kind = std::move(kind);
  n.text = std::move(text);
  n.is_named = true;
  n.children = std::move(children);
  return n;
}

// -- distilled token parser (inverse of reassemble) --

class DParser {
 public:
  explicit DParser(const std::vector<DToken>& toks) : toks_(toks) {}

  SyntaxNode parse() {
    SyntaxNode fn = function();
    if (pos_ != toks_.size()) fail("trailing tokens after function");
    return fn;
  }

 private:
  const std::vector<DToken>& toks_;
  size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& why) {
    throw MalformedDistilled("distilled token " + std::to_string(pos_) + ": " +
                             why);
  }

  const DToken& cur() {
    if (pos_ >= toks_.size()) fail("unexpected end of stream");
    return toks_[pos_];
  }
  bool done() const { return pos_ >= toks_.size(); }
  bool at_kw(std::string_view w) {
    return !done() && toks_[pos_].kind == TokKind::Keyword &&
           toks_[pos_].text == w;
  }
  void expect_kw(std::string_view w) {
    if (!at_kw(w)) fail("expected '" + std::string(w) + "'");
    ++pos_;
  }
  bool eat_kw(std::string_view w) {
    if (!at_kw(w)) return false;
    ++pos_;
    return true;
  }

  SyntaxNode bag() {
    if (cur().kind != TokKind::Bag) fail("expected a name bag");
    std::string joined;
    for (const auto& w : toks_[pos_].words) {
      if (!joined.empty()) joined.push_back(' ');
      joined += w;
    }
    ++pos_;
    return mk("u_bag", joined);
  }

  SyntaxNode type() {
    if (cur().kind == TokKind::TypeRef) {
      SyntaxNode t = mk("u_type", toks_[pos_].text);
      ++pos_;
      return t;
    }
    if (cur().kind == TokKind::Bag) return mk("u_type", "", {bag()});
    fail("expected a type");
  }

  SyntaxNode function() {
    expect_kw("func");
    std::vector<SyntaxNode> kids{bag()};
    expect_kw("(");
    bool first = true;
    while (!at_kw(")")) {
      if (!first) expect_kw(",");
      first = false;
      expect_kw("param");
      SyntaxNode t = type();
      SyntaxNode n = bag();
      kids.push_back(mk("u_param", "", {std::move(t), std::move(n)}));
    }
    expect_kw(")");
    kids.push_back(block());
    return mk("u_func", "", std::move(kids));
  }

  SyntaxNode block() {
    if (cur().kind != TokKind::Open) fail("expected '{'");
    ++pos_;
    std::vector<SyntaxNode> stmts;
    while (cur().kind != TokKind::Close) stmts.push_back(stmt());
    ++pos_;
    return mk("u_block", "", std::move(stmts));
  }

  void expect_sep() {
    if (cur().kind != TokKind::Sep) fail("expected ';'");
    ++pos_;
  }

  SyntaxNode stmt() {
    if (cur().kind == TokKind::Open) return block();
    if (cur().kind != TokKind::Keyword) fail("expected a statement keyword");
    const std::string& k = cur().text;
    if (k == "func") return function();
    if (k == "decl") {
      ++pos_;
      std::vector<SyntaxNode> kids{type(), bag()};
      if (eat_kw("=")) kids.push_back(expr(0));
      expect_sep();
      return mk("u_decl", "", std::move(kids));
    }
    if (k == "assign") {
      ++pos_;
      SyntaxNode lhs = expr(kTernaryPower + 1);
      static const char* kOps[] = {"=", "+=", "-=", "*=", "/=", "%="};
      std::string op;
      for (const char* o : kOps)
        if (at_kw(o)) op = o;
      if (op.empty()) fail("expected an assignment operator");
      ++pos_;
      SyntaxNode rhs = expr(0);
      expect_sep();
      return mk("u_assign", op, {std::move(lhs), std::move(rhs)});
    }
    if (k == "call") {
      ++pos_;
      SyntaxNode e = expr(0);
      expect_sep();
      return mk("u_callstmt", "", {std::move(e)});
    }
    if (k == "if") {
      ++pos_;
      std::vector<SyntaxNode> kids;
      expect_kw("(");
      kids.push_back(expr(0));
      expect_kw(")");
      kids.push_back(block());
      while (eat_kw("elif")) {
        expect_kw("(");
        kids.push_back(expr(0));
        expect_kw(")");
        kids.push_back(block());
      }
      if (eat_kw("else")) kids.push_back(block());
      return mk("u_if", "", std::move(kids));
    }
    if (k == "while") {
      ++pos_;
      expect_kw("(");
      SyntaxNode c = expr(0);
      expect_kw(")");
      SyntaxNode b = block();
      return mk("u_while", "", {std::move(c), std::move(b)});
    }
    if (k == "for") {
      ++pos_;
      expect_kw("(");
      SyntaxNode t = type();
      SyntaxNode v = bag();
      expect_kw(":");
      SyntaxNode it = expr(0);
      expect_kw(")");
      SyntaxNode b = block();
      return mk("u_foreach", "",
                {std::move(t), std::move(v), std::move(it), std::move(b)});
    }
    if (k == "return") {
      ++pos_;
      if (cur().kind == TokKind::Sep) {
        ++pos_;
        return mk("u_return");
      }
      SyntaxNode e = expr(0);
      expect_sep();
      return mk("u_return", "", {std::move(e)});
    }
    if (k == "break") {
      ++pos_;
      expect_sep();
      return mk("u_break");
    }
    if (k == "continue") {
      ++pos_;
      expect_sep();
      return mk("u_continue");
    }
    fail("unexpected keyword '" + k + "' in statement position");
  }

  SyntaxNode expr(int min_power) {
    SyntaxNode lhs = unary();
    while (!done() && cur().kind == TokKind::Keyword) {
      const std::string& op = cur().text;
      if (op == "?" && kTernaryPower >= min_power) {
        ++pos_;
        SyntaxNode cons = expr(0);
        expect_kw(":");
        SyntaxNode alt = expr(kTernaryPower);
        lhs = mk("u_ternary", "",
                 {std::move(lhs), std::move(cons), std::move(alt)});
        continue;
      }
      int power = binop_power(op);
      if (power < 0 || power < min_power) break;
      ++pos_;
      // '=' nests to the right, everything else to the left
      SyntaxNode rhs = expr(op == "=" ? power : power + 1);
      lhs = mk("u_binop", op, {std::move(lhs), std::move(rhs)});
    }
    return lhs;
  }

  SyntaxNode unary() {
    if (cur().kind == TokKind::Keyword) {
      const std::string& op = cur().text;
      if (op == "!" || op == "-" || op == "+" || op == "~") {
        ++pos_;
        return mk("u_unop", op, {unary()});
      }
    }
    SyntaxNode e = primary();
    while (!done() && cur().kind == TokKind::Keyword) {
      if (cur().text == "[") {
        ++pos_;
        std::vector<SyntaxNode> kids{std::move(e)};
        kids.push_back(expr(0));
        while (eat_kw(",")) kids.push_back(expr(0));
        expect_kw("]");
        e = mk("u_index", "", std::move(kids));
      } else if (cur().text == "(") {
        ++pos_;
        std::vector<SyntaxNode> kids{std::move(e)};
        if (!at_kw(")")) {
          kids.push_back(expr(0));
          while (eat_kw(",")) kids.push_back(expr(0));
        }
        expect_kw(")");
        e = mk("u_fuzzycall", "", std::move(kids));
      } else {
        break;
      }
    }
    return e;
  }

  SyntaxNode primary() {
    if (cur().kind == TokKind::Lit) {
      SyntaxNode n = mk("u_lit", cur().text);
      ++pos_;
      return n;
    }
    if (cur().kind == TokKind::Bag) return bag();
    if (cur().kind == TokKind::Keyword) {
      const std::string& w = cur().text;
      if (w == "(") {
        ++pos_;
        std::vector<SyntaxNode> kids;
        if (!at_kw(")")) {
          kids.push_back(expr(0));
          while (eat_kw(",")) kids.push_back(expr(0));
        }
        expect_kw(")");
        return mk("u_paren", "", std::move(kids));
      }
      if (distill::is_unified_builtin(w)) {
        std::string callee = w;
        ++pos_;
        expect_kw("(");
        std::vector<SyntaxNode> args;
        if (!at_kw(")")) {
          args.push_back(expr(0));
          while (eat_kw(",")) args.push_back(expr(0));
        }
        expect_kw(")");
        return mk("u_call", callee, std::move(args));
      }
    }
    fail("expected an expression");
  }
};

// -- target rendering --

std::string pattern_type_text(const morph::Pattern& p) {
  std::string out;
  for (const auto& t : p.toks) {
    if (t.kind == morph::Pattern::Tok::Slot) continue;
    if (t.space_before && !out.empty()) out.push_back(' ');
    out += t.text;
  }
  return out;
}

bool is_container(const std::string& unified) {
  return unified.size() > 2 && unified.substr(unified.size() - 2) == "<>";
}

int surface_unop_power(const std::string& op, Language target) {
  // python's `not` sits between the boolean connectives and comparisons
  if (op == "not" && target == Language::Python) return 7;
  return kUnaryPower;
}

int surface_root_power(const PExpr& p, Language target) {
  switch (p.kind) {
    case PExpr::BinOp: {
      std::string op =
          p.text == "and" ? "&&" : p.text == "or" ? "||" : p.text;
      int power = binop_power(op);
      return power < 0 ? kTernaryPower : power;
    }
    case PExpr::UnOp:
      return surface_unop_power(p.text, target);
    default:
      return kAtomPower;
  }
}

// Minimum binding power each slot's rendering must reach to drop into the
// surface pattern without parentheses.
void surface_slot_contexts(const PExpr& p, int ctx, Language target,
                           std::map<char, int>& out) {
  switch (p.kind) {
    case PExpr::Slot: {
      auto it = out.find(p.slot);
      if (it == out.end() || it->second < ctx) out[p.slot] = ctx;
      return;
    }
    case PExpr::BinOp: {
      std::string op =
          p.text == "and" ? "&&" : p.text == "or" ? "||" : p.text;
      int power = binop_power(op);
      if (power < 0) power = kTernaryPower;
      surface_slot_contexts(p.kids[0], power, target, out);
      surface_slot_contexts(p.kids[1], power + 1, target, out);
      return;
    }
    case PExpr::UnOp:
      surface_slot_contexts(p.kids[0], surface_unop_power(p.text, target),
                            target, out);
      return;
    case PExpr::Call: {
      surface_slot_contexts(p.kids[0], kAtomPower, target, out);
      for (size_t i = 1; i < p.kids.size(); ++i)
        surface_slot_contexts(p.kids[i], 0, target, out);
      return;
    }
    case PExpr::Member:
      surface_slot_contexts(p.kids[0], kAtomPower, target, out);
      return;
    case PExpr::KwArg:
      surface_slot_contexts(p.kids[0], 0, target, out);
      return;
    case PExpr::Name:
    case PExpr::Lit:
      return;
  }
}

struct RRule {
  const MorphemeRule* row;
  PExpr unified;
  int result_power;
  std::map<char, int> slot_ctx;
  int size;
};

struct Rendered {
  std::string text;
  int power = kAtomPower;
};

class Renderer {
 public:
  Renderer(Language target, const MorphemeRegistry& reg)
      : ctx_(RenderContext::for_target(target)), reg_(reg) {
    for (const auto* r : reg.rules_for(target)) {
      if (r->category != morph::Category::Operator &&
          r->category != morph::Category::Builtin)
        continue;
      try {
        PExpr unified = distill::compile_pattern(r->unified);
        PExpr surface = distill::compile_pattern(r->surface);
        // identity operator rows render structurally, with minimal parens
        if ((unified.kind == PExpr::BinOp || unified.kind == PExpr::UnOp) &&
            r->surface_shape() == r->unified_shape())
          continue;
        RRule rule{r, std::move(unified),
                   surface_root_power(surface, target),
                   {},
                   distill::pattern_size(r->unified)};
        surface_slot_contexts(surface, 0, target, rule.slot_ctx);
        rules_.push_back(std::move(rule));
      } catch (const distill::PatternCompileError&) {
      }
    }
    std::stable_sort(rules_.begin(), rules_.end(),
                     [](const RRule& a, const RRule& b) {
                       return a.size > b.size;
                     });
  }

  std::string unit(const SyntaxNode& fn) {
    std::string text = func_text(fn, brace_class() ? 1 : 0);
    std::string out;
    switch (ctx_.target) {
      case Language::Cpp:
        out = "#include <bits/stdc++.h>\nusing namespace std;\n\n" + text;
        break;
      case Language::Java: {
        out = "import java.util.*;\n\npublic class Scaffold {\n";
        if (text.find("rand.") != std::string::npos)
          out += ctx_.indent + "static Random rand = new Random();\n\n";
        out += text + "}\n";
        break;
      }
      case Language::CSharp: {
        out =
            "using System;\nusing System.Collections.Generic;\n\n"
            "public class Scaffold {\n";
        if (text.find("rand.") != std::string::npos)
          out += ctx_.indent + "static Random rand = new Random();\n\n";
        out += text + "}\n";
        break;
      }
      case Language::Python: {
        std::string imports;
        if (text.find("math.") != std::string::npos) imports += "import math\n";
        if (text.find("random.") != std::string::npos)
          imports += "import random\n";
        if (text.find("queue.Queue") != std::string::npos)
          imports += "import queue\n";
        if (text.find("deque") != std::string::npos)
          imports += "from collections import deque\n";
        if (!imports.empty()) imports += "\n";
        out = imports + text;
        break;
      }
    }
    return out;
  }

 private:
  RenderContext ctx_;
  const MorphemeRegistry& reg_;
  std::vector<RRule> rules_;

  bool python() const { return ctx_.target == Language::Python; }
  bool brace_class() const {
    return ctx_.target == Language::Java || ctx_.target == Language::CSharp;
  }
  std::string ind(int depth) const {
    std::string out;
    for (int i = 0; i < depth; ++i) out += ctx_.indent;
    return out;
  }

  [[noreturn]] void malformed(const std::string& why) {
    throw MalformedDistilled(why);
  }

  // -- names, literals, types --

  static std::vector<std::string> bag_words(const SyntaxNode& bag) {
    std::vector<std::string> words;
    std::string cur;
    for (char c : bag.text) {
      if (c == ' ') {
        if (!cur.empty()) words.push_back(cur);
        cur.clear();
      } else {
        cur.push_back(c);
      }
    }
    if (!cur.empty()) words.push_back(cur);
    return words;
  }

  std::string name(const SyntaxNode& bag) {
    return render_name(bag_words(bag), ctx_);
  }

  std::string lit_text(const std::string& t) const {
    if (t == "true") return python() ? "True" : "true";
    if (t == "false") return python() ? "False" : "false";
    if (t == "null") {
      if (python()) return "None";
      return ctx_.target == Language::Cpp ? "nullptr" : "null";
    }
    return t;
  }

  const MorphemeRule* type_row(const std::string& unified) {
    const MorphemeRule* row =
        reg_.find_reverse(unified + " a", ctx_.target);
    if (!row) throw UnrenderableMorpheme(unified, ctx_.target);
    return row;
  }

  std::string concretize(std::string type_text,
                         const std::string& unified) const {
    std::string fill = ctx_.target == Language::Java ? "Integer" : "int";
    std::string args =
        unified == "map<>" ? "<" + fill + ", " + fill + ">" : "<" + fill + ">";
    size_t at = type_text.find("<>");
    if (at != std::string::npos) type_text.replace(at, 2, args);
    return type_text;
  }

  struct CType {
    std::string text;
    bool container = false;
  };

  // c-family type text for params and declarations
  CType c_type(const SyntaxNode& type_node) {
    if (type_node.text.empty()) {
      if (type_node.children.empty()) return {"var", false};
      return {name(type_node.children[0]), false};
    }
    const std::string& u = type_node.text;
    if (u == "var")
      return {ctx_.target == Language::Cpp ? "auto" : "var", false};
    const MorphemeRule* row = type_row(u);
    std::string text = pattern_type_text(row->surface);
    if (is_container(u)) return {concretize(std::move(text), u), true};
    return {std::move(text), false};
  }

  // python annotation word; empty when the binding should stay bare
  std::string py_annotation(const SyntaxNode& type_node) {
    if (type_node.text.empty()) {
      if (type_node.children.empty()) return "";
      return name(type_node.children[0]);
    }
    const std::string& u = type_node.text;
    if (u == "var") return "";
    type_row(u);  // char has no python row; throws
    static const std::map<std::string, std::string> kWords = {
        {"vector<>", "list"},
        {"map<>", "dict"},
        {"set<>", "set"},
        {"deque<>", "deque"},
        {"queue<>", "queue.Queue"}};
    if (auto it = kWords.find(u); it != kWords.end()) return it->second;
    return pattern_type_text(type_row(u)->surface);
  }

  std::string py_container_init(const std::string& unified) const {
    static const std::map<std::string, std::string> kInits = {
        {"vector<>", "[]"},
        {"map<>", "{}"},
        {"set<>", "set()"},
        {"deque<>", "deque()"},
        {"queue<>", "queue.Queue()"}};
    auto it = kInits.find(unified);
    return it == kInits.end() ? "None" : it->second;
  }

  // -- expressions --

  std::string expr(const SyntaxNode& n, int min_power) {
    Rendered r = rexpr(n);
    if (r.power < min_power) return "(" + r.text + ")";
    return r.text;
  }

  bool match_u(const PExpr& p, const SyntaxNode& n,
               std::map<char, const SyntaxNode*>& binds) {
    switch (p.kind) {
      case PExpr::Slot: {
        auto it = binds.find(p.slot);
        if (it != binds.end()) return it->second == &n;
        binds[p.slot] = &n;
        return true;
      }
      case PExpr::Lit: {
        std::string want = p.text.empty() ? "\"\"" : p.text;
        return n.kind == "u_lit" && n.text == want;
      }
      case PExpr::BinOp:
        return n.kind == "u_binop" && n.text == p.text &&
               n.children.size() == 2 &&
               match_u(p.kids[0], n.children[0], binds) &&
               match_u(p.kids[1], n.children[1], binds);
      case PExpr::UnOp:
        return n.kind == "u_unop" &&
               n.text == (p.text == "not" ? "!" : p.text) &&
               n.children.size() == 1 &&
               match_u(p.kids[0], n.children[0], binds);
      case PExpr::Call: {
        if (n.kind != "u_call") return false;
        const PExpr& callee = p.kids[0];
        if (callee.kind != PExpr::Name || n.text != callee.text) return false;
        if (n.children.size() != p.kids.size() - 1) return false;
        for (size_t i = 0; i + 1 < p.kids.size(); ++i)
          if (!match_u(p.kids[i + 1], n.children[i], binds)) return false;
        return true;
      }
      case PExpr::Name:
      case PExpr::Member:
      case PExpr::KwArg:
        return false;
    }
    return false;
  }

  std::optional<Rendered> try_rules(const SyntaxNode& n) {
    for (const auto& rule : rules_) {
      std::map<char, const SyntaxNode*> binds;
      if (!match_u(rule.unified, n, binds)) continue;
      morph::SlotBindings args;
      for (const auto& [slot, node] : binds) {
        auto it = rule.slot_ctx.find(slot);
        int ctx = it == rule.slot_ctx.end() ? 0 : it->second;
        args[slot] = expr(*node, ctx);
      }
      return Rendered{rule.row->surface.instantiate(args), rule.result_power};
    }
    return std::nullopt;
  }

  Rendered rexpr(const SyntaxNode& n) {
    if (n.kind == "u_bag") return {name(n), kAtomPower};
    if (n.kind == "u_lit") return {lit_text(n.text), kAtomPower};
    if (n.kind == "u_paren") {
      if (n.children.size() == 1)
        return {"(" + expr(n.children[0], 0) + ")", kAtomPower};
      // element sequence from a collection literal
      std::string inner;
      for (size_t i = 0; i < n.children.size(); ++i) {
        if (i) inner += ", ";
        inner += expr(n.children[i], 0);
      }
      if (python()) return {"[" + inner + "]", kAtomPower};
      return {"{" + inner + "}", kAtomPower};
    }
    if (n.kind == "u_index") {
      std::string out = expr(n.children[0], kAtomPower) + "[";
      for (size_t i = 1; i < n.children.size(); ++i) {
        if (i > 1) out += ", ";
        out += expr(n.children[i], 0);
      }
      return {out + "]", kAtomPower};
    }
    if (n.kind == "u_fuzzycall") {
      std::string out = expr(n.children[0], kAtomPower) + "(";
      for (size_t i = 1; i < n.children.size(); ++i) {
        if (i > 1) out += ", ";
        out += expr(n.children[i], 0);
      }
      return {out + ")", kAtomPower};
    }
    if (n.kind == "u_call") {
      // int(a / b) only parses as a cast in java and C#
      if (n.text == "int" && brace_class() && n.children.size() == 1 &&
          n.children[0].kind == "u_binop" && n.children[0].text == "/")
        return {"(int)(" + expr(n.children[0], 0) + ")", kUnaryPower};
      if (auto r = try_rules(n)) return *r;
      malformed("no " + std::string(to_string(ctx_.target)) +
                " morpheme for builtin call '" + n.text + "' with " +
                std::to_string(n.children.size()) + " arguments");
    }
    if (n.kind == "u_binop") {
      if (auto r = try_rules(n)) return *r;
      int power = binop_power(n.text);
      if (power < 0) power = kTernaryPower;
      std::string out = expr(n.children[0], power) + " " + n.text + " " +
                        expr(n.children[1], power + 1);
      return {out, power};
    }
    if (n.kind == "u_unop") {
      if (auto r = try_rules(n)) return *r;
      std::string operand = expr(n.children[0], kUnaryPower);
      std::string out = n.text;
      // avoid fusing into -- or ++
      if ((out == "-" || out == "+") && !operand.empty() &&
          operand[0] == out[0])
        out.push_back(' ');
      return {out + operand, kUnaryPower};
    }
    if (n.kind == "u_ternary") {
      if (python()) {
        std::string out = expr(n.children[1], 7) + " if " +
                          expr(n.children[0], 7) + " else " +
                          expr(n.children[2], kTernaryPower);
        return {out, kTernaryPower};
      }
      std::string out = expr(n.children[0], kTernaryPower + 1) + " ? " +
                        expr(n.children[1], kTernaryPower + 1) + " : " +
                        expr(n.children[2], kTernaryPower);
      return {out, kTernaryPower};
    }
    malformed("unexpected node kind '" + n.kind + "' in expression position");
  }

  // -- statements --

  std::string init_text(const std::string& unified_type,
                        const SyntaxNode& init) {
    if (!python() && unified_type == "char" && init.kind == "u_lit" &&
        init.text.size() == 3 && init.text.front() == '"' &&
        init.text.back() == '"')
      return "'" + init.text.substr(1, 1) + "'";
    return expr(init, 0);
  }

  void decl_stmt(const SyntaxNode& n, int depth, std::string& out) {
    const SyntaxNode& type_node = n.children[0];
    std::string nm = name(n.children[1]);
    const SyntaxNode* init = n.children.size() > 2 ? &n.children[2] : nullptr;
    if (python()) {
      const std::string& u = type_node.text;
      std::string ann = py_annotation(type_node);
      std::string line;
      if (!init && is_container(u)) {
        line = nm + " = " + py_container_init(u);
      } else if (ann.empty()) {
        line = init ? nm + " = " + expr(*init, 0) : nm + " = None";
      } else if (init) {
        line = nm + ": " + ann + " = " + expr(*init, 0);
      } else {
        line = nm + ": " + ann;
      }
      out += ind(depth) + line + "\n";
      return;
    }
    CType t = c_type(type_node);
    std::string line = t.text + " " + nm;
    if (init) {
      line += " = " + init_text(type_node.text, *init);
    } else if (t.container && ctx_.target != Language::Cpp) {
      line += " = new " + t.text + "()";
    }
    out += ind(depth) + line + ";\n";
  }

  void block_body(const SyntaxNode& blk, int depth, std::string& out) {
    if (python() && blk.children.empty()) {
      out += ind(depth) + "pass\n";
      return;
    }
    for (const auto& s : blk.children) stmt(s, depth, out);
    if (python() && out.empty()) out += ind(depth) + "pass\n";
  }

  void braced(const std::string& header, const SyntaxNode& blk, int depth,
              std::string& out) {
    out += ind(depth) + header + " {\n";
    block_body(blk, depth + 1, out);
    out += ind(depth) + "}\n";
  }

  void stmt(const SyntaxNode& n, int depth, std::string& out) {
    const std::string& k = n.kind;
    std::string term = python() ? "\n" : ";\n";
    if (k == "u_decl") {
      decl_stmt(n, depth, out);
    } else if (k == "u_assign") {
      out += ind(depth) + expr(n.children[0], 0) + " " + n.text + " " +
             expr(n.children[1], 0) + term;
    } else if (k == "u_callstmt") {
      out += ind(depth) + expr(n.children[0], 0) + term;
    } else if (k == "u_return") {
      out += ind(depth) + "return" +
             (n.children.empty() ? "" : " " + expr(n.children[0], 0)) + term;
    } else if (k == "u_break") {
      out += ind(depth) + "break" + term;
    } else if (k == "u_continue") {
      out += ind(depth) + "continue" + term;
    } else if (k == "u_if") {
      if (python()) {
        size_t i = 0;
        bool first = true;
        while (i + 1 < n.children.size()) {
          out += ind(depth) + (first ? "if " : "elif ") +
                 expr(n.children[i], 0) + ":\n";
          block_body(n.children[i + 1], depth + 1, out);
          first = false;
          i += 2;
        }
        if (i < n.children.size()) {
          out += ind(depth) + "else:\n";
          block_body(n.children[i], depth + 1, out);
        }
        return;
      }
      size_t i = 0;
      bool first = true;
      while (i + 1 < n.children.size()) {
        out += (first ? ind(depth) + "if ("
                      : ind(depth) + "} else if (") +
               expr(n.children[i], 0) + ") {\n";
        block_body(n.children[i + 1], depth + 1, out);
        first = false;
        i += 2;
      }
      if (i < n.children.size()) {
        out += ind(depth) + "} else {\n";
        block_body(n.children[i], depth + 1, out);
      }
      out += ind(depth) + "}\n";
    } else if (k == "u_while") {
      if (python()) {
        out += ind(depth) + "while " + expr(n.children[0], 0) + ":\n";
        block_body(n.children[1], depth + 1, out);
      } else {
        braced("while (" + expr(n.children[0], 0) + ")", n.children[1], depth,
               out);
      }
    } else if (k == "u_foreach") {
      std::string var = name(n.children[1]);
      std::string iter = expr(n.children[2], 0);
      if (python()) {
        out += ind(depth) + "for " + var + " in " + iter + ":\n";
        block_body(n.children[3], depth + 1, out);
      } else if (ctx_.target == Language::CSharp) {
        braced("foreach (" + c_type(n.children[0]).text + " " + var + " in " +
                   iter + ")",
               n.children[3], depth, out);
      } else {
        braced("for (" + c_type(n.children[0]).text + " " + var + " : " +
                   iter + ")",
               n.children[3], depth, out);
      }
    } else if (k == "u_block") {
      if (python()) {
        if (n.children.empty()) out += ind(depth) + "pass\n";
        for (const auto& s : n.children) stmt(s, depth, out);
      } else {
        braced("", n, depth, out);
      }
    } else if (k == "u_func") {
      out += nested_func(n, depth);
    } else {
      malformed("unexpected node kind '" + k + "' in statement position");
    }
  }

  std::string nested_func(const SyntaxNode& f, int depth) {
    switch (ctx_.target) {
      case Language::Python:
        return func_text(f, depth);
      case Language::CSharp: {
        // local function
        std::string out;
        braced(return_type(f) + " " + name(f.children[0]) + "(" +
                   param_list(f) + ")",
               f.children.back(), depth, out);
        return out;
      }
      case Language::Cpp: {
        std::string out = ind(depth) + "auto " + name(f.children[0]) +
                          " = [&](" + param_list(f) + ") {\n";
        block_body(f.children.back(), depth + 1, out);
        out += ind(depth) + "};\n";
        return out;
      }
      case Language::Java:
        throw UnrenderableMorpheme("nested function", ctx_.target);
    }
    return "";
  }

  std::string param_list(const SyntaxNode& f) {
    std::string out;
    for (size_t i = 1; i + 1 < f.children.size(); ++i) {
      const SyntaxNode& p = f.children[i];
      if (!out.empty()) out += ", ";
      std::string nm = name(p.children[1]);
      if (python()) {
        std::string ann = py_annotation(p.children[0]);
        out += ann.empty() ? nm : nm + ": " + ann;
      } else {
        out += c_type(p.children[0]).text + " " + nm;
      }
    }
    return out;
  }

  std::string return_type(const SyntaxNode& f) const {
    bool with_value = false;
    syntax::walk(f.children.back(), [&](const SyntaxNode& d) {
      if (d.kind == "u_return" && !d.children.empty()) with_value = true;
      return true;
    });
    return with_value ? "int" : "void";
  }

  std::string func_text(const SyntaxNode& f, int depth) {
    std::string nm = name(f.children[0]);
    std::string params = param_list(f);
    std::string out;
    switch (ctx_.target) {
      case Language::Python:
        out = ind(depth) + "def " + nm + "(" + params + "):\n";
        block_body(f.children.back(), depth + 1, out);
        break;
      case Language::Cpp:
        braced("auto " + nm + "(" + params + ")", f.children.back(), depth,
               out);
        break;
      case Language::Java:
      case Language::CSharp:
        braced("public static " + return_type(f) + " " + nm + "(" + params +
                   ")",
               f.children.back(), depth, out);
        break;
    }
    return out;
  }
};

bool has_fuzzy(const SyntaxNode& root) {
  bool found = false;
  syntax::walk(root, [&](const SyntaxNode& n) {
    if (n.kind == "u_fuzzycall" ||
        (n.kind == "u_type" && n.text.empty() && !n.children.empty()))
      found = true;
    return !found;
  });
  return found;
}

}  // namespace

SyntaxTree parse_distilled(const DistilledCode& code) {
  SyntaxTree tree;
  tree.language = code.source_language;
  tree.source = distill::serialize(code);
  tree.has_error = false;
  tree.root = DParser(code.tokens).parse();
  return tree;
}

std::string decompile(const DistilledCode& code, Language target,
                      const MorphemeRegistry& registry) {
  DistilledCode canon = distill::canonicalize(code);
  std::string why;
  if (!distill::well_formed(canon, &why)) throw MalformedDistilled(why);
  SyntaxTree tree = parse_distilled(canon);
  Renderer renderer(target, registry);
  return renderer.unit(tree.root);
}

RoundTripReport round_trip_check(const syntax::SourceFunction& fn,
                                 Language target,
                                 const MorphemeRegistry& registry) {
  RoundTripReport report;
  try {
    DistilledCode before =
        distill::canonicalize(distill::distill(fn, registry));
    report.before = distill::serialize(before);
    report.fuzzy = has_fuzzy(parse_distilled(before).root);
    report.scaffold = decompile(before, target, registry);
    SyntaxTree reparsed = syntax::parse(report.scaffold, target);
    if (reparsed.has_error) {
      report.cause = "scaffold does not reparse cleanly";
      return report;
    }
    auto functions = syntax::extract_functions(reparsed);
    if (functions.size() != 1) {
      report.cause = "scaffold does not hold exactly one function";
      return report;
    }
    DistilledCode after =
        distill::canonicalize(distill::distill(functions[0], registry));
    report.after = distill::serialize(after);
    if (report.after == report.before) {
      report.pass = true;
    } else {
      report.cause = "re-distilled form differs";
    }
  } catch (const std::exception& e) {
    report.cause = e.what();
  }
  return report;
}

}  // namespace distilc::decomp
