#include "lower.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "distill/pexpr.hpp"
#include "syntax/parser.hpp"

namespace distilc::distill {

using syntax::SyntaxNode;
using syntax::SyntaxTree;

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

SyntaxNode ident(std::string text) { return mk("identifier", std::move(text)); }

const SyntaxNode* first_named(const SyntaxNode& n) {
  for (const auto& c : n.children)
    if (c.is_named) return &c;
  return nullptr;
}

std::string join_leaf_tokens(const SyntaxNode& n) {
  std::string out;
  syntax::walk(n, [&](const SyntaxNode& d) {
    if (d.is_leaf() && !d.text.empty()) {
      if (!out.empty()) out.push_back(' ');
      out += d.text;
    }
    return true;
  });
  return out;
}

// --- prune ----------------------------------------------------------------

const std::unordered_set<std::string_view> kDropAll = {
    "comment", "line_comment", "block_comment"};

const std::unordered_set<std::string_view> kDropCpp = {
    "storage_class_specifier", "type_qualifier", "attribute_specifier",
    "attribute_declaration", "explicit_function_specifier", "virtual",
    "virtual_specifier", "noexcept", "access_specifier", "using_declaration",
    "ms_call_modifier", "ref_qualifier"};

const std::unordered_set<std::string_view> kDropJava = {
    "modifiers", "annotation", "marker_annotation", "type_parameters",
    "throws", "import_declaration", "package_declaration"};

const std::unordered_set<std::string_view> kDropCSharp = {
    "modifier", "attribute_list", "using_directive", "type_parameter_list"};

const std::unordered_set<std::string_view> kDropPython = {
    "decorator", "async", "import_statement", "import_from_statement",
    "future_import_statement", "global_statement", "nonlocal_statement"};

bool should_drop(Language lang, const SyntaxNode& n) {
  if (kDropAll.count(n.kind)) return true;
  switch (lang) {
    case Language::Cpp: return kDropCpp.count(n.kind) > 0;
    case Language::Java: return kDropJava.count(n.kind) > 0;
    case Language::CSharp: return kDropCSharp.count(n.kind) > 0;
    case Language::Python: return kDropPython.count(n.kind) > 0;
  }
  return false;
}

void prune_into(Language lang, const SyntaxNode& n,
                std::vector<SyntaxNode>& out);

std::vector<SyntaxNode> prune_children(Language lang, const SyntaxNode& n) {
  std::vector<SyntaxNode> out;
  for (const auto& c : n.children) prune_into(lang, c, out);
  return out;
}

void prune_into(Language lang, const SyntaxNode& n,
                std::vector<SyntaxNode>& out) {
  if (should_drop(lang, n)) return;

  // splices keep the field the removed wrapper occupied
  auto splice = [&](auto&& recurse) {
    size_t before = out.size();
    recurse();
    for (size_t i = before; i < out.size(); ++i) out[i].field = n.field;
  };

  if (lang == Language::Cpp) {
    if (n.kind == "qualified_identifier") {
      if (const auto* name = n.child_by_field("name")) {
        splice([&] { prune_into(lang, *name, out); });
        return;
      }
    }
    if (n.kind == "reference_declarator" || n.kind == "pointer_declarator" ||
        n.kind == "abstract_reference_declarator" ||
        n.kind == "abstract_pointer_declarator") {
      splice([&] {
        for (const auto& c : n.children)
          if (c.is_named) prune_into(lang, c, out);
      });
      return;
    }
    if (n.kind == "field_expression") {
      const auto* obj = n.child_by_field("argument");
      const auto* field = n.child_by_field("field");
      if (obj && field && obj->kind == "this") {
        splice([&] { prune_into(lang, *field, out); });
        return;
      }
    }
  }
  if (lang == Language::Java && n.kind == "field_access") {
    const auto* obj = n.child_by_field("object");
    const auto* field = n.child_by_field("field");
    if (obj && field && obj->kind == "this") {
      splice([&] { prune_into(lang, *field, out); });
      return;
    }
  }
  if (lang == Language::Python) {
    if (n.kind == "decorated_definition") {
      if (const auto* def = n.child_by_field("definition"))
        splice([&] { prune_into(lang, *def, out); });
      return;
    }
    if (n.kind == "attribute") {
      const auto* obj = n.child_by_field("object");
      const auto* attr = n.child_by_field("attribute");
      if (obj && attr && obj->kind == "identifier" &&
          (obj->text == "self" || obj->text == "cls")) {
        splice([&] { prune_into(lang, *attr, out); });
        return;
      }
    }
  }

  SyntaxNode copy = n;
  copy.children = prune_children(lang, n);
  out.push_back(std::move(copy));
}

// --- literal normalization --------------------------------------------------

std::string escape_into_double_quotes(std::string_view content) {
  std::string out = "\"";
  for (size_t i = 0; i < content.size(); ++i) {
    char c = content[i];
    if (c == '\\' && i + 1 < content.size()) {
      char next = content[i + 1];
      if (next == '\'') {
        out.push_back('\'');  // \' no longer needs escaping
        ++i;
        continue;
      }
      out.push_back('\\');
      out.push_back(next);
      ++i;
      continue;
    }
    if (c == '"') {
      out += "\\\"";
    } else if (c == '\n') {
      out += "\\n";
    } else {
      out.push_back(c);
    }
  }
  out.push_back('"');
  return out;
}

std::string normalize_string_literal(std::string_view text) {
  size_t q = text.find_first_of("'\"");
  if (q == std::string_view::npos) return escape_into_double_quotes(text);
  std::string_view body = text.substr(q);
  char quote = body[0];
  size_t qlen = 1;
  if (body.size() >= 6 && body[1] == quote && body[2] == quote) qlen = 3;
  if (body.size() < 2 * qlen) return escape_into_double_quotes("");
  std::string_view inner = body.substr(qlen, body.size() - 2 * qlen);
  if (quote == '"' && qlen == 1) return std::string(body);
  return escape_into_double_quotes(inner);
}

std::string normalize_number(std::string_view text) {
  if (text.size() > 1 && text[0] == '0' &&
      std::isalpha(static_cast<unsigned char>(text[1])))
    return std::string(text);  // hex/octal/binary
  // strip width suffixes (10L, 1.5f, 7u, 3m)
  static const std::string_view suffixes = "uUlLfFdDmM";
  size_t end = text.size();
  while (end > 1 && suffixes.find(text[end - 1]) != std::string_view::npos)
    --end;
  return std::string(text.substr(0, end));
}

const std::unordered_set<std::string_view> kStringKinds = {
    "string_literal", "string", "raw_string_literal", "char_literal",
    "character_literal", "text_block", "concatenated_string",
    "verbatim_string_literal"};
const std::unordered_set<std::string_view> kNumberKinds = {
    "number_literal", "integer", "float", "decimal_integer_literal",
    "hex_integer_literal", "octal_integer_literal", "binary_integer_literal",
    "decimal_floating_point_literal", "hex_floating_point_literal",
    "integer_literal", "real_literal"};

bool is_literal_kind(const SyntaxNode& n) {
  return kStringKinds.count(n.kind) || kNumberKinds.count(n.kind) ||
         n.kind == "true" || n.kind == "false" || n.kind == "True" ||
         n.kind == "False" || n.kind == "null_literal" ||
         n.kind == "nullptr" || n.kind == "none" ||
         n.kind == "boolean_literal" || n.kind == "user_defined_literal";
}

SyntaxNode lower_literal(const SyntaxNode& n) {
  if (n.kind == "true" || n.kind == "True" ||
      (n.kind == "boolean_literal" && (n.text == "true" || n.text == "True")))
    return mk("u_lit", "true");
  if (n.kind == "false" || n.kind == "False" ||
      (n.kind == "boolean_literal" && (n.text == "false" || n.text == "False")))
    return mk("u_lit", "false");
  if (n.kind == "null_literal" || n.kind == "nullptr" || n.kind == "none")
    return mk("u_lit", "null");
  if (kStringKinds.count(n.kind))
    return mk("u_lit", normalize_string_literal(n.text));
  std::string num = normalize_number(n.text);
  // cpp folds the sign into the literal; keep signs as unary nodes everywhere
  if (num.size() > 1 && (num[0] == '-' || num[0] == '+'))
    return mk("u_unop", std::string(1, num[0]), {mk("u_lit", num.substr(1))});
  return mk("u_lit", num);
}

// --- expression views -------------------------------------------------------

bool is_name_kind(const SyntaxNode& n) {
  return n.kind == "identifier" || n.kind == "field_identifier" ||
         n.kind == "type_identifier" || n.kind == "property_identifier" ||
         n.kind == "primitive_type" || n.kind == "predefined_type";
}

const SyntaxNode* see_through(const SyntaxNode* n) {
  while (n) {
    if (n->kind == "parenthesized_expression" || n->kind == "condition_clause") {
      const SyntaxNode* inner = n->child_by_field("value");
      if (!inner) inner = first_named(*n);
      if (!inner) return n;
      n = inner;
      continue;
    }
    return n;
  }
  return n;
}

struct CallView {
  const SyntaxNode* callee_obj = nullptr;  // null for plain f(...)
  std::string callee_name;                 // "" when callee is complex
  const SyntaxNode* callee_complex = nullptr;
  std::vector<const SyntaxNode*> args;     // argument expressions
  bool valid = false;
};

struct MemberView {
  const SyntaxNode* object = nullptr;
  std::string name;
  bool valid = false;
};

struct BinView {
  const SyntaxNode* lhs = nullptr;
  const SyntaxNode* rhs = nullptr;
  std::string op;
  bool valid = false;
};

struct UnView {
  const SyntaxNode* operand = nullptr;
  std::string op;
  bool valid = false;
};

std::string op_text(const SyntaxNode& n) {
  if (const auto* op = n.child_by_field("operator")) return op->text;
  for (const auto& c : n.children)
    if (!c.is_named && c.text != "(" && c.text != ")") return c.text;
  return "";
}

BinView view_binop(const SyntaxNode& n) {
  BinView v;
  if (n.kind == "binary_expression" || n.kind == "binary_operator" ||
      n.kind == "boolean_operator") {
    v.lhs = n.child_by_field("left");
    v.rhs = n.child_by_field("right");
    v.op = op_text(n);
    v.valid = v.lhs && v.rhs && !v.op.empty();
    return v;
  }
  if (n.kind == "comparison_operator") {
    std::vector<const SyntaxNode*> operands;
    std::vector<std::string> ops;
    for (const auto& c : n.children) {
      if (c.is_named) operands.push_back(&c);
      else ops.push_back(c.text);
    }
    if (operands.size() == 2 && ops.size() == 1) {
      v.lhs = operands[0];
      v.rhs = operands[1];
      v.op = ops[0];
      v.valid = true;
    }
  }
  return v;
}

UnView view_unop(const SyntaxNode& n) {
  UnView v;
  if (n.kind == "unary_expression" || n.kind == "unary_operator" ||
      n.kind == "prefix_unary_expression") {
    v.op = op_text(n);
    if (const auto* a = n.child_by_field("argument")) v.operand = a;
    else if (const auto* a2 = n.child_by_field("operand")) v.operand = a2;
    else v.operand = first_named(n);
    v.valid = v.operand && !v.op.empty();
    return v;
  }
  if (n.kind == "not_operator") {
    v.op = "not";
    v.operand = n.child_by_field("argument");
    if (!v.operand) v.operand = first_named(n);
    v.valid = v.operand != nullptr;
  }
  return v;
}

MemberView view_member(const SyntaxNode& n) {
  MemberView v;
  const SyntaxNode* obj = nullptr;
  const SyntaxNode* name = nullptr;
  if (n.kind == "field_expression") {
    obj = n.child_by_field("argument");
    name = n.child_by_field("field");
  } else if (n.kind == "field_access") {
    obj = n.child_by_field("object");
    name = n.child_by_field("field");
  } else if (n.kind == "member_access_expression") {
    obj = n.child_by_field("expression");
    name = n.child_by_field("name");
  } else if (n.kind == "attribute") {
    obj = n.child_by_field("object");
    name = n.child_by_field("attribute");
  } else {
    return v;
  }
  if (!name) return v;
  v.object = obj;  // may be null (implicit this in C#)
  v.name = name->text;
  v.valid = true;
  return v;
}

std::vector<const SyntaxNode*> argument_nodes(const SyntaxNode& arglist) {
  std::vector<const SyntaxNode*> out;
  for (const auto& c : arglist.children) {
    if (!c.is_named) continue;
    if (c.kind == "argument") {  // C# wraps each argument
      if (const auto* inner = first_named(c)) out.push_back(inner);
    } else {
      out.push_back(&c);
    }
  }
  return out;
}

CallView view_call(const SyntaxNode& n) {
  CallView v;
  const SyntaxNode* fn = nullptr;
  const SyntaxNode* args = nullptr;
  if (n.kind == "call_expression" || n.kind == "invocation_expression" ||
      n.kind == "call") {
    fn = n.child_by_field("function");
    args = n.child_by_field("arguments");
  } else if (n.kind == "method_invocation") {
    v.callee_obj = n.child_by_field("object");
    if (const auto* name = n.child_by_field("name")) v.callee_name = name->text;
    args = n.child_by_field("arguments");
    if (v.callee_name.empty() || !args) return v;
    v.args = argument_nodes(*args);
    v.valid = true;
    return v;
  } else {
    return v;
  }
  if (!fn || !args) return v;
  if (is_name_kind(*fn)) {
    v.callee_name = fn->text;
  } else {
    MemberView m = view_member(*fn);
    if (m.valid) {
      v.callee_obj = m.object;
      v.callee_name = m.name;
    } else {
      v.callee_complex = fn;
    }
  }
  v.args = argument_nodes(*args);
  v.valid = true;
  return v;
}

bool is_empty_string_literal(const SyntaxNode& n) {
  if (n.kind == "string") {  // python: string_start + string_end, no content
    for (const auto& c : n.children)
      if (c.kind == "string_content") return false;
    return true;
  }
  if (kStringKinds.count(n.kind)) {
    return n.text == "\"\"" || n.text == "''" || n.text == "@\"\"";
  }
  return false;
}

// --- declared-type resolution ------------------------------------------------

struct TypeInfo {
  std::string unified;  // "" when unknown
  std::string raw;      // base words for the fallback bag
};

const std::unordered_map<std::string_view, std::string_view> kCppPrim = {
    {"double", "float"}, {"long double", "float"}, {"float", "float"},
    {"int", "int"},      {"long", "int"},          {"long long", "int"},
    {"short", "int"},    {"unsigned", "int"},      {"unsigned int", "int"},
    {"unsigned long", "int"}, {"unsigned long long", "int"},
    {"signed", "int"},   {"size_t", "int"},        {"int64_t", "int"},
    {"int32_t", "int"},  {"uint64_t", "int"},      {"uint32_t", "int"},
    {"bool", "bool"},    {"char", "char"},         {"string", "string"},
    {"auto", "var"}};

const std::unordered_map<std::string_view, std::string_view> kJavaPrim = {
    {"int", "int"},     {"long", "int"},    {"short", "int"},
    {"byte", "int"},    {"float", "float"}, {"double", "float"},
    {"boolean", "boolean"}, {"char", "char"},
    {"Integer", "int"}, {"Long", "int"},    {"Short", "int"},
    {"Float", "float"}, {"Double", "float"}, {"Boolean", "boolean"},
    {"Character", "char"}, {"var", "var"}};

const std::unordered_map<std::string_view, std::string_view> kCSharpPrim = {
    {"int", "int"},    {"long", "int"},     {"short", "int"},
    {"byte", "int"},   {"uint", "int"},     {"ulong", "int"},
    {"float", "float"}, {"double", "float"}, {"decimal", "float"},
    {"bool", "bool"},  {"char", "char"},    {"string", "string"}};

std::string_view map_primitive(Language lang, std::string_view text) {
  const auto* table = lang == Language::Cpp     ? &kCppPrim
                      : lang == Language::Java  ? &kJavaPrim
                      : lang == Language::CSharp ? &kCSharpPrim
                                                 : nullptr;
  if (!table) return text;
  auto it = table->find(text);
  return it == table->end() ? text : it->second;
}

std::string unified_type_text(const morph::MorphemeRule& rule) {
  std::string out;
  for (const auto& t : rule.unified.toks) {
    if (t.kind == morph::Pattern::Tok::Slot) continue;
    out += t.text;
  }
  return out;
}

}  // namespace

// --- the lowering ------------------------------------------------------------

namespace {

struct CompiledRule {
  const morph::MorphemeRule* rule;
  PExpr surface;
  PExpr unified;
  int size;
};

class Lowerer {
 public:
  Lowerer(Language lang, const morph::MorphemeRegistry& reg)
      : lang_(lang), reg_(reg) {
    for (const auto* r : reg.rules_for(lang)) {
      if (r->category != morph::Category::Operator &&
          r->category != morph::Category::Builtin)
        continue;
      try {
        CompiledRule c{r, compile_pattern(r->surface),
                       compile_pattern(r->unified), pattern_size(r->surface)};
        rules_.push_back(std::move(c));
      } catch (const PatternCompileError&) {
        // non-expression rule (extension rows); shape lookups still see it
      }
    }
    std::stable_sort(rules_.begin(), rules_.end(),
                     [](const CompiledRule& a, const CompiledRule& b) {
                       return a.size > b.size;
                     });
  }

  SyntaxNode lower_function(const SyntaxNode& fn);

 private:
  using Bindings = std::map<char, const SyntaxNode*>;

  Language lang_;
  const morph::MorphemeRegistry& reg_;
  std::vector<CompiledRule> rules_;
  std::set<std::string> declared_;

  // -- type handling --

  TypeInfo resolve_type(const SyntaxNode* type) {
    TypeInfo info;
    if (!type) {
      info.unified = "var";
      return info;
    }
    const SyntaxNode* t = type;
    if (t->kind == "type" && first_named(*t)) t = first_named(*t);  // python

    if (lang_ == Language::Python) {
      std::string ann;
      syntax::walk(*t, [&](const SyntaxNode& d) {
        if (d.is_leaf()) ann += d.text;
        return true;
      });
      static const std::unordered_map<std::string, std::string> kPyContainers =
          {{"list", "vector<>"},
           {"dict", "map<>"},
           {"set", "set<>"},
           {"deque", "deque<>"},
           {"queue.Queue", "queue<>"}};
      if (auto it = kPyContainers.find(ann); it != kPyContainers.end()) {
        info.unified = it->second;
        return info;
      }
    }

    std::string base;
    bool generic = false;
    if (t->kind == "template_type" || t->kind == "generic_type" ||
        t->kind == "generic_name") {
      const SyntaxNode* name = t->child_by_field("name");
      if (!name) name = first_named(*t);
      if (name) base = name->text;
      generic = true;
    } else if (t->kind == "placeholder_type_specifier" ||
               t->kind == "implicit_type") {
      info.unified = "var";
      return info;
    } else if (t->kind == "array_type") {
      info.unified = "vector<>";
      return info;
    } else if (is_name_kind(*t) || t->kind == "sized_type_specifier" ||
               t->kind == "integral_type" || t->kind == "floating_point_type" ||
               t->kind == "boolean_type" || t->kind == "void_type") {
      base = t->text;
    } else {
      info.raw = join_leaf_tokens(*t);
      return info;
    }

    std::string surface(map_primitive(lang_, base));
    if (surface == "var") {
      info.unified = "var";
      return info;
    }
    if (generic) surface += "<>";
    if (const auto* rule = reg_.find_forward(lang_, morph::Category::DataType,
                                             surface + " a")) {
      info.unified = unified_type_text(*rule);
      return info;
    }
    info.raw = base;
    return info;
  }

  SyntaxNode make_type_node(const TypeInfo& info) {
    if (!info.unified.empty()) return mk("u_type", info.unified);
    return mk("u_type", "", {ident(info.raw.empty() ? "_" : info.raw)});
  }

  // -- pattern matching --

  bool match_name(const PExpr& p, const SyntaxNode& node) {
    const SyntaxNode* n = see_through(&node);
    return is_name_kind(*n) && n->text == p.text;
  }

  bool match(const PExpr& p, const SyntaxNode& raw, Bindings& binds) {
    const SyntaxNode& node = *see_through(&raw);
    switch (p.kind) {
      case PExpr::Slot: {
        auto it = binds.find(p.slot);
        if (it == binds.end()) {
          binds[p.slot] = &node;
          return true;
        }
        return join_leaf_tokens(*it->second) == join_leaf_tokens(node);
      }
      case PExpr::Name:
        return match_name(p, node);
      case PExpr::Lit:
        return is_empty_string_literal(node);
      case PExpr::BinOp: {
        BinView v = view_binop(node);
        return v.valid && v.op == p.text && match(p.kids[0], *v.lhs, binds) &&
               match(p.kids[1], *v.rhs, binds);
      }
      case PExpr::UnOp: {
        UnView v = view_unop(node);
        return v.valid && v.op == p.text && match(p.kids[0], *v.operand, binds);
      }
      case PExpr::Member: {
        MemberView v = view_member(node);
        if (v.valid && v.name == p.text && v.object)
          return match(p.kids[0], *v.object, binds);
        // zero-arg call on the same name counts (s.Length vs s.Length())
        CallView c = view_call(node);
        return c.valid && c.args.empty() && c.callee_obj &&
               c.callee_name == p.text && match(p.kids[0], *c.callee_obj, binds);
      }
      case PExpr::KwArg: {
        if (node.kind != "keyword_argument") return false;
        const auto* name = node.child_by_field("name");
        const auto* value = node.child_by_field("value");
        return name && value && name->text == p.text &&
               match(p.kids[0], *value, binds);
      }
      case PExpr::Call: {
        CallView v = view_call(node);
        if (!v.valid) {
          // bare member counts as a zero-arg call (nums.length)
          if (p.kids.size() != 1 || p.kids[0].kind != PExpr::Member)
            return false;
          MemberView m = view_member(node);
          return m.valid && m.object && m.name == p.kids[0].text &&
                 match(p.kids[0].kids[0], *m.object, binds);
        }
        const PExpr& callee = p.kids[0];
        if (callee.kind == PExpr::Name) {
          if (v.callee_obj || v.callee_complex || v.callee_name != callee.text)
            return false;
        } else if (callee.kind == PExpr::Member) {
          if (!v.callee_obj || v.callee_name != callee.text) return false;
          if (!match(callee.kids[0], *v.callee_obj, binds)) return false;
        } else {
          return false;
        }
        if (v.args.size() != p.kids.size() - 1) return false;
        for (size_t i = 0; i < v.args.size(); ++i)
          if (!match(p.kids[i + 1], *v.args[i], binds)) return false;
        return true;
      }
    }
    return false;
  }

  // Distilled expression tokens carry no grouping beyond explicit u_paren
  // nodes, so a slot-bound subtree looser than the operator it lands under
  // must gain one ("not a == b" -> ! ( {a} == {b} )).
  static int node_power(const SyntaxNode& n) {
    if (n.kind == "u_binop") return binop_power(n.text);
    if (n.kind == "u_unop") return kUnaryPower;
    if (n.kind == "u_ternary") return kTernaryPower;
    return kAtomPower;
  }
  static SyntaxNode wrap_loose(SyntaxNode kid, int min_power) {
    if (node_power(kid) < min_power)
      return mk("u_paren", "", {std::move(kid)});
    return kid;
  }

  SyntaxNode floordiv_node(const SyntaxNode& lhs, const SyntaxNode& rhs) {
    int power = binop_power("/");
    return mk("u_call", "int",
              {mk("u_binop", "/",
                  {wrap_loose(lower_expr(lhs), power),
                   wrap_loose(lower_expr(rhs), power + 1)})});
  }

  SyntaxNode build_unified(const PExpr& p, const Bindings& binds) {
    switch (p.kind) {
      case PExpr::Slot:
        return lower_expr(*binds.at(p.slot));
      case PExpr::Name:
        return ident(p.text);
      case PExpr::Lit:
        return mk("u_lit", p.text.empty() ? "\"\"" : p.text);
      case PExpr::BinOp: {
        int power = binop_power(p.text);
        return mk("u_binop", p.text,
                  {wrap_loose(build_unified(p.kids[0], binds), power),
                   wrap_loose(build_unified(p.kids[1], binds), power + 1)});
      }
      case PExpr::UnOp:
        return mk("u_unop", p.text == "not" ? "!" : p.text,
                  {wrap_loose(build_unified(p.kids[0], binds), kUnaryPower)});
      case PExpr::Call: {
        std::vector<SyntaxNode> args;
        for (size_t i = 1; i < p.kids.size(); ++i)
          args.push_back(build_unified(p.kids[i], binds));
        std::string name =
            p.kids[0].kind == PExpr::Name ? p.kids[0].text : "call";
        return mk("u_call", name, std::move(args));
      }
      case PExpr::Member:
      case PExpr::KwArg:
        return build_unified(p.kids.back(), binds);
    }
    return mk("u_lit", "null");
  }

  // -- expressions --

  // Gathers identifier-ish leaf words for fallback bags.
  void collect_words(const SyntaxNode& n, std::string& out) {
    syntax::walk(n, [&](const SyntaxNode& d) {
      if (is_name_kind(d) || d.kind == "this" || d.kind == "self") {
        if (!out.empty()) out.push_back(' ');
        out += d.text;
      }
      return true;
    });
  }

  SyntaxNode fallback_callee_bag(const SyntaxNode* obj,
                                 const std::string& name) {
    std::string words;
    if (obj) collect_words(*obj, words);
    if (!name.empty()) {
      if (!words.empty()) words.push_back(' ');
      words += name;
    }
    return ident(words.empty() ? "_" : words);
  }

  // conditions drop their syntactic parens so `while (x < 3)` and
  // `while x < 3:` lower identically
  SyntaxNode lower_cond(const SyntaxNode& n) {
    return lower_expr(*see_through(&n));
  }

  SyntaxNode lower_expr(const SyntaxNode& raw) {
    const SyntaxNode& n0 = raw;

    if (is_literal_kind(n0)) return lower_literal(n0);
    if (is_name_kind(n0) || n0.kind == "this" || n0.kind == "self")
      return ident(n0.text);

    // registry morphemes, most specific first
    for (const auto& cr : rules_) {
      Bindings binds;
      if (match(cr.surface, n0, binds)) return build_unified(cr.unified, binds);
    }

    if (n0.kind == "parenthesized_expression" || n0.kind == "condition_clause") {
      const SyntaxNode* inner = n0.child_by_field("value");
      if (!inner) inner = first_named(n0);
      if (!inner) return mk("u_lit", "null");
      if (n0.kind == "condition_clause") return lower_expr(*inner);
      SyntaxNode in = lower_expr(*inner);
      // parens around atoms are redundant in distilled syntax; dropping them
      // keeps equivalent sources byte-identical across languages
      if (node_power(in) == kAtomPower) return in;
      return mk("u_paren", "", {std::move(in)});
    }

    // python comparison chains: a<b<c -> (a<b) && (b<c)
    if (n0.kind == "comparison_operator") {
      std::vector<const SyntaxNode*> operands;
      std::vector<std::string> ops;
      for (const auto& c : n0.children) {
        if (c.is_named) operands.push_back(&c);
        else ops.push_back(c.text);
      }
      if (operands.size() >= 2 && ops.size() == operands.size() - 1) {
        auto leg = [&](size_t i) {
          int power = binop_power(ops[i]);
          return mk("u_binop", ops[i],
                    {wrap_loose(lower_expr(*operands[i]), power),
                     wrap_loose(lower_expr(*operands[i + 1]), power + 1)});
        };
        SyntaxNode acc = leg(0);
        for (size_t i = 1; i < ops.size(); ++i)
          acc = mk("u_binop", "&&", {std::move(acc), leg(i)});
        return acc;
      }
    }

    if (BinView v = view_binop(n0); v.valid) {
      std::string op = v.op == "and" ? "&&" : v.op == "or" ? "||" : v.op;
      int power = binop_power(op);
      return mk("u_binop", op,
                {wrap_loose(lower_expr(*v.lhs), power),
                 wrap_loose(lower_expr(*v.rhs), power + 1)});
    }
    if (UnView v = view_unop(n0); v.valid) {
      // statement-level ++/-- is handled by the callers; in value position
      // the operand stands in for the whole expression
      if (v.op == "++" || v.op == "--") return lower_expr(*v.operand);
      return mk("u_unop", v.op == "not" ? "!" : v.op,
                {wrap_loose(lower_expr(*v.operand), kUnaryPower)});
    }
    if (n0.kind == "update_expression" ||
        n0.kind == "postfix_unary_expression") {
      if (const auto* a = first_named(n0)) return lower_expr(*a);
    }

    if (CallView v = view_call(n0); v.valid) {
      // int(a / b) spells floor division in python sources
      if (!v.callee_obj && !v.callee_complex && v.callee_name == "int" &&
          v.args.size() == 1) {
        const SyntaxNode* arg = see_through(v.args[0]);
        BinView bv = view_binop(*arg);
        if (bv.valid && bv.op == "/") return floordiv_node(*bv.lhs, *bv.rhs);
      }
      std::vector<SyntaxNode> kids;
      const SyntaxNode* obj =
          v.callee_complex ? v.callee_complex : v.callee_obj;
      kids.push_back(fallback_callee_bag(obj, v.callee_name));
      for (const auto* a : v.args) {
        if (a->kind == "keyword_argument") {
          if (const auto* value = a->child_by_field("value"))
            kids.push_back(lower_expr(*value));
          continue;
        }
        kids.push_back(lower_expr(*a));
      }
      return mk("u_fuzzycall", "", std::move(kids));
    }

    if (MemberView v = view_member(n0); v.valid) {
      return fallback_callee_bag(v.object, v.name);
    }

    // indexing
    if (n0.kind == "subscript_expression" || n0.kind == "array_access" ||
        n0.kind == "element_access_expression" || n0.kind == "subscript") {
      const SyntaxNode* base = n0.child_by_field("argument");
      if (!base) base = n0.child_by_field("array");
      if (!base) base = n0.child_by_field("expression");
      if (!base) base = n0.child_by_field("value");
      if (!base) base = first_named(n0);
      std::vector<SyntaxNode> kids{wrap_loose(lower_expr(*base), kAtomPower)};
      const SyntaxNode* subs = n0.child_by_field("subscript");
      if (const auto* idx = n0.child_by_field("index")) {
        kids.push_back(lower_expr(*idx));
      } else if (subs && (subs->kind == "bracketed_argument_list" ||
                          subs->kind == "subscript_argument_list")) {
        for (const auto* a : argument_nodes(*subs))
          kids.push_back(lower_expr(*a));
      } else if (subs) {
        kids.push_back(lower_expr(*subs));
      } else {
        bool skipped_base = false;
        for (const auto& c : n0.children) {
          if (!c.is_named) continue;
          if (!skipped_base && &c == base) {
            skipped_base = true;
            continue;
          }
          if (c.kind == "bracketed_argument_list" ||
              c.kind == "subscript_argument_list") {
            for (const auto* a : argument_nodes(c)) kids.push_back(lower_expr(*a));
          } else {
            kids.push_back(lower_expr(c));
          }
        }
      }
      return mk("u_index", "", std::move(kids));
    }

    // ternaries
    if (n0.kind == "conditional_expression" || n0.kind == "ternary_expression") {
      const SyntaxNode* cond = n0.child_by_field("condition");
      const SyntaxNode* cons = n0.child_by_field("consequence");
      const SyntaxNode* alt = n0.child_by_field("alternative");
      if (!cond) {  // python: consequence if condition else alternative
        std::vector<const SyntaxNode*> named;
        for (const auto& c : n0.children)
          if (c.is_named) named.push_back(&c);
        if (named.size() == 3) {
          cons = named[0];
          cond = named[1];
          alt = named[2];
        }
      }
      if (cond && cons && alt)
        return mk("u_ternary", "",
                  {wrap_loose(lower_expr(*cond), kTernaryPower + 1),
                   wrap_loose(lower_expr(*cons), kTernaryPower + 1),
                   wrap_loose(lower_expr(*alt), kTernaryPower)});
    }

    // object construction falls back to a fuzzy call on the type words
    if (n0.kind == "object_creation_expression" || n0.kind == "new_expression") {
      const SyntaxNode* type = n0.child_by_field("type");
      std::vector<SyntaxNode> kids;
      kids.push_back(fallback_callee_bag(type, ""));
      if (const auto* args = n0.child_by_field("arguments"))
        for (const auto* a : argument_nodes(*args)) kids.push_back(lower_expr(*a));
      return mk("u_fuzzycall", "", std::move(kids));
    }

    // assignment in value position
    if (n0.kind == "assignment_expression" || n0.kind == "assignment") {
      const SyntaxNode* l = n0.child_by_field("left");
      const SyntaxNode* r = n0.child_by_field("right");
      if (l && r)
        return mk("u_binop", "=", {lower_expr(*l), lower_expr(*r)});
    }

    if (n0.kind == "cast_expression") {
      const SyntaxNode* value = n0.child_by_field("value");
      if (!value) value = n0.child_by_field("expression");
      if (value) {
        // (int)(a / b) is the floor-division idiom in java and C#, where a
        // bare int(a / b) call does not parse.
        const SyntaxNode* type = n0.child_by_field("type");
        std::string tname = type ? join_leaf_tokens(*type) : "";
        const SyntaxNode* inner = see_through(value);
        if ((tname == "int" || tname == "long") && inner) {
          BinView bv = view_binop(*inner);
          if (bv.valid && bv.op == "/") return floordiv_node(*bv.lhs, *bv.rhs);
        }
        return lower_expr(*value);
      }
    }

    // initializer lists render as parenthesized element sequences
    if (n0.kind == "initializer_list" || n0.kind == "array_initializer" ||
        n0.kind == "list" || n0.kind == "tuple" || n0.kind == "set" ||
        n0.kind == "collection_initializer") {
      std::vector<SyntaxNode> kids;
      for (const auto& c : n0.children)
        if (c.is_named) kids.push_back(lower_expr(c));
      return mk("u_paren", "", std::move(kids));
    }

    // total fallback: identifier words become a bag; expression children
    // become arguments
    std::vector<const SyntaxNode*> exprish;
    for (const auto& c : n0.children)
      if (c.is_named && !is_name_kind(c)) exprish.push_back(&c);
    std::string words;
    collect_words(n0, words);
    if (exprish.empty()) {
      if (!words.empty()) return ident(words);
      return mk("u_lit", "null");
    }
    std::vector<SyntaxNode> kids;
    kids.push_back(ident(words.empty() ? "_" : words));
    for (const auto* e : exprish) kids.push_back(lower_expr(*e));
    return mk("u_fuzzycall", "", std::move(kids));
  }

  // -- statements --

  std::vector<SyntaxNode> lower_block_children(const SyntaxNode& block) {
    std::vector<SyntaxNode> out;
    for (const auto& c : block.children) {
      if (!c.is_named) continue;
      auto stmts = lower_stmt(c);
      for (auto& s : stmts) out.push_back(std::move(s));
    }
    return out;
  }

  SyntaxNode lower_block(const SyntaxNode* block) {
    if (!block) return mk("u_block");
    if (block->kind == "compound_statement" || block->kind == "block")
      return mk("u_block", "", lower_block_children(*block));
    // single-statement body without braces
    return mk("u_block", "", lower_stmt(*block));
  }

  SyntaxNode clone(const SyntaxNode& n) { return n; }

  void flatten_if(const SyntaxNode& n, std::vector<SyntaxNode>& parts) {
    const SyntaxNode* cond = n.child_by_field("condition");
    const SyntaxNode* cons = n.child_by_field("consequence");
    if (!cond || !cons) return;
    parts.push_back(lower_cond(*cond));
    parts.push_back(lower_block(cons));
    // python hangs every elif/else clause off the same alternative field
    const SyntaxNode* alt = nullptr;
    for (const auto& c : n.children) {
      if (c.kind == "elif_clause") {
        const SyntaxNode* econd = c.child_by_field("condition");
        const SyntaxNode* econs = c.child_by_field("consequence");
        if (econd && econs) {
          parts.push_back(lower_cond(*econd));
          parts.push_back(lower_block(econs));
        }
      } else if (c.kind == "else_clause" || c.field == "alternative") {
        alt = &c;
      }
    }
    if (!alt) return;
    const SyntaxNode* alt_body = alt;
    if (alt->kind == "else_clause") {
      alt_body = alt->child_by_field("body");
      if (!alt_body) alt_body = first_named(*alt);
    }
    if (!alt_body) return;
    if (alt_body->kind == "if_statement") {
      flatten_if(*alt_body, parts);
      return;
    }
    parts.push_back(lower_block(alt_body));
  }

  std::vector<SyntaxNode> lower_decl_cpp(const SyntaxNode& n) {
    std::vector<SyntaxNode> out;
    TypeInfo type = resolve_type(n.child_by_field("type"));
    for (const auto& c : n.children) {
      if (c.field != "declarator") continue;
      const SyntaxNode* name = &c;
      const SyntaxNode* init = nullptr;
      if (c.kind == "init_declarator") {
        name = c.child_by_field("declarator");
        init = c.child_by_field("value");
      }
      if (!name) continue;
      if (init && init->kind == "lambda_expression" &&
          name->kind == "identifier") {
        out.push_back(lower_lambda_func(name->text, *init));
        continue;
      }
      out.push_back(make_decl(type, name->text, init));
    }
    if (out.empty()) out.push_back(make_decl(type, "_", nullptr));
    return out;
  }

  // a named lambda is the closest thing C++ has to a nested function
  SyntaxNode lower_lambda_func(const std::string& name,
                               const SyntaxNode& lambda) {
    std::vector<SyntaxNode> kids{ident(name)};
    declared_.insert(name);
    const SyntaxNode* decl = lambda.child_by_field("declarator");
    const SyntaxNode* params =
        decl ? decl->child_by_field("parameters") : nullptr;
    if (params) {
      for (const auto& p : params->children) {
        if (!p.is_named) continue;
        SyntaxNode up = lower_param(p);
        if (up.children.size() == 2) declared_.insert(up.children[1].text);
        kids.push_back(std::move(up));
      }
    }
    kids.push_back(lower_block(lambda.child_by_field("body")));
    return mk("u_func", "", std::move(kids));
  }

  bool is_empty_construction(const SyntaxNode& init, const TypeInfo& type) {
    bool container = type.unified.size() > 2 &&
                     type.unified.substr(type.unified.size() - 2) == "<>";
    if (!container) return false;
    if (init.kind == "object_creation_expression") {
      const SyntaxNode* args = init.child_by_field("arguments");
      bool no_args = !args || argument_nodes(*args).empty();
      const SyntaxNode* initializer = init.child_by_field("initializer");
      return no_args && !initializer;
    }
    if (init.kind == "initializer_list" || init.kind == "array_initializer")
      return first_named(init) == nullptr;
    if (lang_ == Language::Python) return python_init_idiom(init) != nullptr;
    return false;
  }

  SyntaxNode make_decl(const TypeInfo& type, const std::string& name,
                       const SyntaxNode* init) {
    std::vector<SyntaxNode> kids{make_type_node(type), ident(name)};
    if (init && !is_empty_construction(*init, type))
      kids.push_back(lower_expr(*init));
    declared_.insert(name);
    return mk("u_decl", "", std::move(kids));
  }

  // python: x = [] / {} / set() / queue.Queue() / deque()
  const morph::MorphemeRule* python_init_idiom(const SyntaxNode& rhs) {
    std::string shape;
    if (rhs.kind == "list" && !first_named(rhs)) {
      shape = "a=[]";
    } else if (rhs.kind == "dictionary" && !first_named(rhs)) {
      shape = "a={}";
    } else if (CallView v = view_call(rhs); v.valid && v.args.empty()) {
      std::string path;
      if (v.callee_obj) {
        if (!is_name_kind(*v.callee_obj)) return nullptr;
        path = v.callee_obj->text + "." + v.callee_name;
      } else if (!v.callee_name.empty()) {
        path = v.callee_name;
      } else {
        return nullptr;
      }
      shape = "a=" + path + "()";
    } else {
      return nullptr;
    }
    return reg_.find_forward(lang_, morph::Category::DataType, shape);
  }

  std::vector<SyntaxNode> lower_exprlike_stmt(const SyntaxNode& e) {
    // assignments
    if (e.kind == "assignment_expression" || e.kind == "assignment" ||
        e.kind == "augmented_assignment") {
      const SyntaxNode* l = e.child_by_field("left");
      const SyntaxNode* r = e.child_by_field("right");
      const SyntaxNode* annotated = e.child_by_field("type");
      if (l && lang_ == Language::Python && l->kind == "identifier") {
        if (annotated && e.kind == "assignment") {
          TypeInfo t = resolve_type(annotated);
          return {make_decl(t, l->text, r)};
        }
        if (e.kind == "assignment" && !declared_.count(l->text)) {
          if (r) {
            if (const auto* rule = python_init_idiom(*r)) {
              TypeInfo t{unified_type_text(*rule), ""};
              declared_.insert(l->text);
              return {mk("u_decl", "", {make_type_node(t), ident(l->text)})};
            }
          }
          TypeInfo t{"var", ""};
          return {make_decl(t, l->text, r)};
        }
      }
      if (l && r) {
        std::string op = op_text(e);
        if (op.empty()) op = "=";
        // only = += -= *= /= %= are in the distilled vocabulary; rarer
        // compound assignments unfold into their underlying operation
        static const std::set<std::string> kAssignOps = {"=",  "+=", "-=",
                                                         "*=", "/=", "%="};
        if (!kAssignOps.count(op)) {
          std::string binop = op.substr(0, op.size() - 1);
          SyntaxNode value;
          if (binop == "**") {
            value = mk("u_call", "pow", {lower_expr(*l), lower_expr(*r)});
          } else if (binop == "//") {
            value = floordiv_node(*l, *r);
          } else {
            int power = binop_power(binop);
            if (power < 0) power = kTernaryPower;
            value = mk("u_binop", binop,
                       {wrap_loose(lower_expr(*l), power),
                        wrap_loose(lower_expr(*r), power + 1)});
          }
          return {mk("u_assign", "=", {lower_expr(*l), std::move(value)})};
        }
        return {mk("u_assign", op, {lower_expr(*l), lower_expr(*r)})};
      }
    }
    // i++ / i-- / ++i / --i as statements
    if (e.kind == "update_expression" || e.kind == "postfix_unary_expression" ||
        (e.kind == "prefix_unary_expression" &&
         (op_text(e) == "++" || op_text(e) == "--"))) {
      std::string op = "+=";
      for (const auto& c : e.children)
        if (!c.is_named && c.text == "--") op = "-=";
      if (op_text(e) == "--") op = "-=";
      const SyntaxNode* target = first_named(e);
      if (target)
        return {mk("u_assign", op,
                   {lower_expr(*target), mk("u_lit", "1")})};
    }
    return {mk("u_callstmt", "", {lower_expr(e)})};
  }

  std::vector<SyntaxNode> lower_switch(const SyntaxNode& n) {
    const SyntaxNode* subject = n.child_by_field("condition");
    if (!subject) subject = n.child_by_field("value");
    const SyntaxNode* body = n.child_by_field("body");
    if (!subject || !body) return {};
    SyntaxNode subj = lower_cond(*subject);

    std::vector<SyntaxNode> parts;  // cond, block, cond, block...
    SyntaxNode else_block = mk("");
    bool has_else = false;

    std::vector<SyntaxNode> pending_conds;
    bool pending_default = false;

    auto process_group = [&](const std::vector<const SyntaxNode*>& values,
                             bool is_default,
                             std::vector<const SyntaxNode*> stmts) {
      while (!stmts.empty() && stmts.back()->kind == "break_statement")
        stmts.pop_back();
      std::vector<SyntaxNode> conds = std::move(pending_conds);
      pending_conds.clear();
      for (const auto* v : values)
        conds.push_back(mk("u_binop", "==", {clone(subj), lower_expr(*v)}));
      bool any_default = is_default || pending_default;
      pending_default = false;
      if (stmts.empty() && conds.empty() && !any_default) return;
      if (stmts.empty()) {  // fall-through group: carry guards forward
        pending_conds = std::move(conds);
        pending_default = any_default;
        return;
      }
      std::vector<SyntaxNode> lowered;
      for (const auto* s : stmts)
        for (auto& x : lower_stmt(*s)) lowered.push_back(std::move(x));
      if (any_default) {
        else_block = mk("u_block", "", std::move(lowered));
        has_else = true;
        return;
      }
      SyntaxNode cond = std::move(conds[0]);
      for (size_t i = 1; i < conds.size(); ++i)
        cond = mk("u_binop", "||", {std::move(cond), std::move(conds[i])});
      parts.push_back(std::move(cond));
      parts.push_back(mk("u_block", "", std::move(lowered)));
    };

    for (const auto& group : body->children) {
      if (!group.is_named) continue;
      if (group.kind == "switch_block_statement_group") {  // java
        std::vector<const SyntaxNode*> values;
        bool is_default = false;
        std::vector<const SyntaxNode*> stmts;
        for (const auto& c : group.children) {
          if (!c.is_named) continue;
          if (c.kind == "switch_label") {
            if (const auto* v = first_named(c)) values.push_back(v);
            else is_default = true;
          } else {
            stmts.push_back(&c);
          }
        }
        process_group(values, is_default, std::move(stmts));
      } else if (group.kind == "switch_section") {  // csharp
        std::vector<const SyntaxNode*> values;
        bool is_default = true;
        std::vector<const SyntaxNode*> stmts;
        for (const auto& c : group.children) {
          if (!c.is_named) continue;
          if (c.kind == "constant_pattern" || c.kind == "case_switch_label") {
            const SyntaxNode* v = first_named(c);
            values.push_back(v ? v : &c);
            is_default = false;
          } else if (c.kind == "default_switch_label") {
            // explicit default
          } else {
            stmts.push_back(&c);
          }
        }
        process_group(values, is_default && values.empty(), std::move(stmts));
      }
    }

    if (parts.empty()) {
      if (has_else) {
        std::vector<SyntaxNode> inline_stmts;
        for (auto& c : else_block.children) inline_stmts.push_back(std::move(c));
        return inline_stmts;
      }
      return {};
    }
    if (has_else) parts.push_back(std::move(else_block));
    return {mk("u_if", "", std::move(parts))};
  }

  std::vector<SyntaxNode> lower_c_for(const SyntaxNode& n) {
    std::vector<SyntaxNode> out;
    const SyntaxNode* init = n.child_by_field("initializer");
    if (!init) init = n.child_by_field("init");
    const SyntaxNode* cond = n.child_by_field("condition");
    const SyntaxNode* update = n.child_by_field("update");
    const SyntaxNode* body = n.child_by_field("body");

    if (init) {
      auto stmts = lower_stmt(*init);
      if (stmts.empty()) stmts = lower_exprlike_stmt(*init);
      for (auto& s : stmts) out.push_back(std::move(s));
    }
    SyntaxNode cond_node = cond ? lower_cond(*cond) : mk("u_lit", "true");
    SyntaxNode block = lower_block(body);
    if (update)
      for (auto& s : lower_exprlike_stmt(*update))
        block.children.push_back(std::move(s));
    out.push_back(mk("u_while", "", {std::move(cond_node), std::move(block)}));
    return out;
  }

  std::vector<SyntaxNode> lower_stmt(const SyntaxNode& n) {
    const std::string& k = n.kind;

    if (k == "expression_statement") {
      const SyntaxNode* e = first_named(n);
      if (!e) return {};
      return lower_exprlike_stmt(*e);
    }
    if (k == "assignment" || k == "augmented_assignment" ||
        k == "assignment_expression" || k == "update_expression" ||
        k == "postfix_unary_expression" || k == "prefix_unary_expression")
      return lower_exprlike_stmt(n);

    if (k == "declaration" && lang_ == Language::Cpp) return lower_decl_cpp(n);
    if (k == "local_variable_declaration" && lang_ == Language::Java) {
      TypeInfo type = resolve_type(n.child_by_field("type"));
      std::vector<SyntaxNode> out;
      for (const auto& c : n.children) {
        if (c.kind != "variable_declarator") continue;
        const SyntaxNode* name = c.child_by_field("name");
        const SyntaxNode* value = c.child_by_field("value");
        if (name) out.push_back(make_decl(type, name->text, value));
      }
      return out;
    }
    if (k == "local_declaration_statement" && lang_ == Language::CSharp) {
      const SyntaxNode* vd = first_named(n);
      if (vd && vd->kind == "variable_declaration") {
        TypeInfo type = resolve_type(vd->child_by_field("type"));
        std::vector<SyntaxNode> out;
        for (const auto& c : vd->children) {
          if (c.kind != "variable_declarator") continue;
          const SyntaxNode* name = c.child_by_field("name");
          if (!name) name = first_named(c);
          const SyntaxNode* init = nullptr;
          for (const auto& cc : c.children) {
            if (!cc.is_named || &cc == name) continue;
            init = cc.kind == "equals_value_clause" ? first_named(cc) : &cc;
          }
          if (name) out.push_back(make_decl(type, name->text, init));
        }
        return out;
      }
    }

    if (k == "if_statement") {
      std::vector<SyntaxNode> parts;
      flatten_if(n, parts);
      if (parts.empty()) return {};
      return {mk("u_if", "", std::move(parts))};
    }
    if (k == "while_statement") {
      const SyntaxNode* cond = n.child_by_field("condition");
      const SyntaxNode* body = n.child_by_field("body");
      if (!cond) return {};
      return {mk("u_while", "", {lower_cond(*cond), lower_block(body)})};
    }
    if (k == "do_statement") {
      const SyntaxNode* cond = n.child_by_field("condition");
      const SyntaxNode* body = n.child_by_field("body");
      SyntaxNode block = lower_block(body);
      if (cond) {
        SyntaxNode guard =
            mk("u_if", "",
               {mk("u_unop", "!", {mk("u_paren", "", {lower_cond(*cond)})}),
                mk("u_block", "", {mk("u_break")})});
        block.children.push_back(std::move(guard));
      }
      return {mk("u_while", "", {mk("u_lit", "true"), std::move(block)})};
    }
    if (k == "for_statement") {
      if (lang_ == Language::Python) {
        const SyntaxNode* left = n.child_by_field("left");
        const SyntaxNode* right = n.child_by_field("right");
        const SyntaxNode* body = n.child_by_field("body");
        if (!left || !right) return {};
        std::string name = left->kind == "identifier"
                               ? left->text
                               : join_leaf_tokens(*left);
        declared_.insert(name);
        return {mk("u_foreach", "",
                   {mk("u_type", "var"), ident(name), lower_expr(*right),
                    lower_block(body)})};
      }
      return lower_c_for(n);
    }
    // Loop variables keep no declared type: python cannot spell one, so the
    // pivot would diverge per source language.
    if (k == "for_range_loop") {
      const SyntaxNode* decl = n.child_by_field("declarator");
      const SyntaxNode* right = n.child_by_field("right");
      const SyntaxNode* body = n.child_by_field("body");
      if (!decl || !right) return {};
      return {mk("u_foreach", "",
                 {mk("u_type", "var"), ident(decl->text), lower_expr(*right),
                  lower_block(body)})};
    }
    if (k == "enhanced_for_statement") {
      const SyntaxNode* name = n.child_by_field("name");
      const SyntaxNode* value = n.child_by_field("value");
      const SyntaxNode* body = n.child_by_field("body");
      if (!name || !value) return {};
      return {mk("u_foreach", "",
                 {mk("u_type", "var"), ident(name->text), lower_expr(*value),
                  lower_block(body)})};
    }
    if (k == "foreach_statement") {
      const SyntaxNode* left = n.child_by_field("left");
      const SyntaxNode* right = n.child_by_field("right");
      const SyntaxNode* body = n.child_by_field("body");
      if (!left || !right) return {};
      return {mk("u_foreach", "",
                 {mk("u_type", "var"), ident(left->text), lower_expr(*right),
                  lower_block(body)})};
    }
    if (k == "return_statement") {
      const SyntaxNode* e = first_named(n);
      if (!e) return {mk("u_return")};
      return {mk("u_return", "", {lower_expr(*e)})};
    }
    if (k == "break_statement") return {mk("u_break")};
    if (k == "continue_statement") return {mk("u_continue")};
    if (k == "pass_statement") return {};
    if (k == "empty_statement") return {};
    if (k == "switch_expression" || k == "switch_statement")
      return lower_switch(n);
    if (k == "compound_statement" || k == "block")
      return {lower_block(&n)};
    if (k == "function_definition" || k == "local_function_statement" ||
        k == "method_declaration")
      return {lower_function(n)};

    // total fallback: blocks inline, expressions become call statements
    std::vector<SyntaxNode> out;
    for (const auto& c : n.children) {
      if (!c.is_named) continue;
      if (c.kind == "block" || c.kind == "compound_statement") {
        for (auto& s : lower_block_children(c)) out.push_back(std::move(s));
      } else if (c.kind.find("statement") != std::string::npos ||
                 c.kind.find("clause") != std::string::npos) {
        for (auto& s : lower_stmt(c)) out.push_back(std::move(s));
      } else if (!is_name_kind(c) && !is_literal_kind(c)) {
        out.push_back(mk("u_callstmt", "", {lower_expr(c)}));
      }
    }
    return out;
  }

 public:
  // -- functions --

  SyntaxNode lower_param(const SyntaxNode& p) {
    if (lang_ == Language::Python) {
      if (p.kind == "identifier")
        return mk("u_param", "", {mk("u_type", "var"), ident(p.text)});
      const SyntaxNode* name = p.child_by_field("name");
      if (!name)
        for (const auto& c : p.children)
          if (c.kind == "identifier") {
            name = &c;
            break;
          }
      TypeInfo type = p.child_by_field("type")
                          ? resolve_type(p.child_by_field("type"))
                          : TypeInfo{"var", ""};
      return mk("u_param", "",
                {make_type_node(type), ident(name ? name->text : "_")});
    }
    TypeInfo type = resolve_type(p.child_by_field("type"));
    const SyntaxNode* name = p.child_by_field("name");
    if (!name) name = p.child_by_field("declarator");
    std::string nm = name ? (name->is_leaf() ? name->text
                                             : join_leaf_tokens(*name))
                          : "_";
    return mk("u_param", "", {make_type_node(type), ident(nm)});
  }
};

SyntaxNode Lowerer::lower_function(const SyntaxNode& fn) {
  const SyntaxNode* name = nullptr;
  const SyntaxNode* params = nullptr;
  const SyntaxNode* body = nullptr;

  if (lang_ == Language::Cpp) {
    const SyntaxNode* decl = fn.child_by_field("declarator");
    while (decl && decl->kind != "function_declarator")
      decl = decl->child_by_field("declarator");
    if (decl) {
      name = decl->child_by_field("declarator");
      params = decl->child_by_field("parameters");
    }
    body = fn.child_by_field("body");
  } else {
    name = fn.child_by_field("name");
    params = fn.child_by_field("parameters");
    body = fn.child_by_field("body");
  }

  std::string fname = name ? (name->is_leaf() ? name->text
                                              : join_leaf_tokens(*name))
                           : "_";
  std::vector<SyntaxNode> kids{ident(fname)};
  declared_.insert(fname);

  if (params) {
    bool first = true;
    for (const auto& p : params->children) {
      if (!p.is_named) continue;
      if (lang_ == Language::Python && first && p.kind == "identifier" &&
          (p.text == "self" || p.text == "cls")) {
        first = false;
        continue;
      }
      first = false;
      SyntaxNode up = lower_param(p);
      if (up.children.size() == 2) declared_.insert(up.children[1].text);
      kids.push_back(std::move(up));
    }
  }

  kids.push_back(lower_block(body));
  return mk("u_func", "", std::move(kids));
}

bool is_function_node(Language lang, const SyntaxNode& n) {
  switch (lang) {
    case Language::Python: return n.kind == "function_definition";
    case Language::Java:
      return (n.kind == "method_declaration" ||
              n.kind == "constructor_declaration") &&
             n.child_by_field("body");
    case Language::CSharp:
      return n.kind == "local_function_statement" ||
             ((n.kind == "method_declaration" ||
               n.kind == "constructor_declaration") &&
              n.child_by_field("body"));
    case Language::Cpp:
      return n.kind == "function_definition" && n.child_by_field("body");
  }
  return false;
}

const SyntaxNode* find_function(Language lang, const SyntaxNode& n) {
  if (is_function_node(lang, n)) return &n;
  for (const auto& c : n.children)
    if (const auto* f = find_function(lang, c)) return f;
  return nullptr;
}

}  // namespace

SyntaxTree prune(const SyntaxTree& tree, Language lang) {
  SyntaxTree out;
  out.language = lang;
  out.source = tree.source;
  out.has_error = tree.has_error;
  SyntaxNode root = tree.root;
  root.children = prune_children(lang, tree.root);
  out.root = std::move(root);
  return out;
}

SyntaxTree unify(const SyntaxTree& pruned, Language lang,
                 const morph::MorphemeRegistry& registry) {
  const SyntaxNode* fn = find_function(lang, pruned.root);
  if (!fn) throw UntemplatedNode("no function definition found");
  Lowerer lowerer(lang, registry);
  SyntaxTree out;
  out.language = lang;
  out.root = lowerer.lower_function(*fn);
  return out;
}

namespace {

std::vector<std::string> identifier_words(const std::string& text) {
  std::vector<std::string> words;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t space = text.find(' ', pos);
    std::string piece = text.substr(pos, space - pos);
    if (!piece.empty())
      for (auto& w : split_subwords(piece)) words.push_back(std::move(w));
    if (space == std::string::npos) break;
    pos = space + 1;
  }
  if (words.empty()) words.push_back("_");
  return words;
}

SyntaxNode fuzz_node(const SyntaxNode& n) {
  if (n.kind == "identifier") {
    auto words = identifier_words(n.text);
    std::string joined;
    for (const auto& w : words) {
      if (!joined.empty()) joined.push_back(' ');
      joined += w;
    }
    return mk("u_bag", joined);
  }
  SyntaxNode copy = n;
  copy.children.clear();
  for (const auto& c : n.children) copy.children.push_back(fuzz_node(c));
  return copy;
}

}  // namespace

SyntaxTree fuzz_names(const SyntaxTree& unified) {
  SyntaxTree out;
  out.language = unified.language;
  out.root = fuzz_node(unified.root);
  return out;
}

// --- reassemble ---------------------------------------------------------------

namespace {

struct Emitter {
  std::vector<DToken> out;

  [[noreturn]] void unknown(const SyntaxNode& n) {
    throw UntemplatedNode("no template for node kind '" + n.kind + "'");
  }

  void kw(std::string t) { out.push_back(keyword(std::move(t))); }

  void emit_bag(const SyntaxNode& n) {
    std::vector<std::string> words;
    size_t pos = 0;
    const std::string& t = n.text;
    while (pos <= t.size()) {
      size_t space = t.find(' ', pos);
      std::string piece = t.substr(pos, space - pos);
      if (!piece.empty()) words.push_back(piece);
      if (space == std::string::npos) break;
      pos = space + 1;
    }
    if (words.empty()) words.push_back("_");
    out.push_back(bag(std::move(words)));
  }

  void emit_type(const SyntaxNode& n) {
    if (!n.text.empty()) {
      out.push_back(type_ref(n.text));
    } else if (!n.children.empty()) {
      emit_bag(n.children[0]);
    } else {
      out.push_back(type_ref("var"));
    }
  }

  void emit_expr(const SyntaxNode& n) {
    if (n.kind == "u_bag") {
      emit_bag(n);
    } else if (n.kind == "u_lit") {
      out.push_back(lit(n.text));
    } else if (n.kind == "u_binop") {
      emit_expr(n.children[0]);
      kw(n.text);
      emit_expr(n.children[1]);
    } else if (n.kind == "u_unop") {
      kw(n.text);
      emit_expr(n.children[0]);
    } else if (n.kind == "u_paren") {
      kw("(");
      for (size_t i = 0; i < n.children.size(); ++i) {
        if (i) kw(",");
        emit_expr(n.children[i]);
      }
      kw(")");
    } else if (n.kind == "u_index") {
      emit_expr(n.children[0]);
      kw("[");
      for (size_t i = 1; i < n.children.size(); ++i) {
        if (i > 1) kw(",");
        emit_expr(n.children[i]);
      }
      kw("]");
    } else if (n.kind == "u_ternary") {
      emit_expr(n.children[0]);
      kw("?");
      emit_expr(n.children[1]);
      kw(":");
      emit_expr(n.children[2]);
    } else if (n.kind == "u_call") {
      kw(n.text);
      kw("(");
      for (size_t i = 0; i < n.children.size(); ++i) {
        if (i) kw(",");
        emit_expr(n.children[i]);
      }
      kw(")");
    } else if (n.kind == "u_fuzzycall") {
      emit_expr(n.children[0]);
      kw("(");
      for (size_t i = 1; i < n.children.size(); ++i) {
        if (i > 1) kw(",");
        emit_expr(n.children[i]);
      }
      kw(")");
    } else {
      unknown(n);
    }
  }

  void emit_block(const SyntaxNode& n) {
    out.push_back(open());
    for (const auto& c : n.children) emit_stmt(c);
    out.push_back(close());
  }

  void emit_stmt(const SyntaxNode& n) {
    if (n.kind == "u_decl") {
      kw("decl");
      emit_type(n.children[0]);
      emit_expr(n.children[1]);
      if (n.children.size() > 2) {
        kw("=");
        emit_expr(n.children[2]);
      }
      out.push_back(sep());
    } else if (n.kind == "u_assign") {
      kw("assign");
      emit_expr(n.children[0]);
      kw(n.text);
      emit_expr(n.children[1]);
      out.push_back(sep());
    } else if (n.kind == "u_callstmt") {
      kw("call");
      emit_expr(n.children[0]);
      out.push_back(sep());
    } else if (n.kind == "u_if") {
      size_t i = 0;
      bool first = true;
      while (i + 1 < n.children.size()) {
        kw(first ? "if" : "elif");
        first = false;
        kw("(");
        emit_expr(n.children[i]);
        kw(")");
        emit_block(n.children[i + 1]);
        i += 2;
      }
      if (i < n.children.size()) {
        kw("else");
        emit_block(n.children[i]);
      }
    } else if (n.kind == "u_while") {
      kw("while");
      kw("(");
      emit_expr(n.children[0]);
      kw(")");
      emit_block(n.children[1]);
    } else if (n.kind == "u_foreach") {
      kw("for");
      kw("(");
      emit_type(n.children[0]);
      emit_expr(n.children[1]);
      kw(":");
      emit_expr(n.children[2]);
      kw(")");
      emit_block(n.children[3]);
    } else if (n.kind == "u_return") {
      kw("return");
      if (!n.children.empty()) emit_expr(n.children[0]);
      out.push_back(sep());
    } else if (n.kind == "u_break") {
      kw("break");
      out.push_back(sep());
    } else if (n.kind == "u_continue") {
      kw("continue");
      out.push_back(sep());
    } else if (n.kind == "u_block") {
      emit_block(n);
    } else if (n.kind == "u_func") {
      emit_func(n);
    } else {
      unknown(n);
    }
  }

  void emit_func(const SyntaxNode& n) {
    kw("func");
    emit_expr(n.children[0]);
    kw("(");
    for (size_t i = 1; i + 1 < n.children.size(); ++i) {
      if (i > 1) kw(",");
      const SyntaxNode& p = n.children[i];
      kw("param");
      emit_type(p.children[0]);
      emit_expr(p.children[1]);
    }
    kw(")");
    emit_block(n.children.back());
  }
};

}  // namespace

DistilledCode reassemble(const SyntaxTree& tree) {
  Emitter e;
  if (tree.root.kind != "u_func")
    throw UntemplatedNode("reassemble expects a unified function root");
  e.emit_func(tree.root);
  DistilledCode code;
  code.tokens = std::move(e.out);
  code.source_language = tree.language;
  return code;
}

DistilledCode distill(const syntax::SourceFunction& fn,
                      const morph::MorphemeRegistry& registry) {
  syntax::SourceFunction clean = syntax::strip_noncode(fn);
  SyntaxTree tree = syntax::parse(clean.body, clean.language);
  if (tree.has_error)
    throw syntax::ParseFailure("function does not parse cleanly");
  SyntaxTree pruned = prune(tree, clean.language);
  SyntaxTree unified = unify(pruned, clean.language, registry);
  SyntaxTree fuzzed = fuzz_names(unified);
  return reassemble(fuzzed);
}

std::string dump_tree(const SyntaxNode& node) {
  std::string out = "(" + node.kind;
  if (!node.text.empty() && node.children.empty()) out += " '" + node.text + "'";
  else if (!node.text.empty()) out += " '" + node.text + "'";
  for (const auto& c : node.children) {
    out += " ";
    out += dump_tree(c);
  }
  out += ")";
  return out;
}

}  // namespace distilc::distill
