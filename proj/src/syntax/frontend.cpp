#include "frontend.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <map>
#include <unordered_set>

namespace distilc::syntax {
namespace {

using KeywordSet = std::unordered_set<std::string_view>;

const KeywordSet kCppKeywords = {
    "alignas", "alignof", "and", "and_eq", "asm", "auto", "bitand", "bitor",
    "bool", "break", "case", "catch", "char", "char16_t", "char32_t",
    "char8_t", "class", "co_await", "co_return", "co_yield", "compl",
    "concept", "const", "const_cast", "consteval", "constexpr", "constinit",
    "continue", "decltype", "default", "delete", "do", "double",
    "dynamic_cast", "else", "enum", "explicit", "export", "extern", "final",
    "float", "for", "friend", "goto", "if", "inline", "int", "long",
    "mutable", "namespace", "new", "noexcept", "not", "not_eq", "operator",
    "or", "or_eq", "override", "private", "protected", "public", "register",
    "reinterpret_cast", "requires", "return", "short", "signed", "sizeof",
    "static", "static_assert", "static_cast", "struct", "switch", "template",
    "this", "thread_local", "throw", "try", "typedef", "typeid", "typename",
    "union", "unsigned", "using", "virtual", "void", "volatile", "wchar_t",
    "while", "xor", "xor_eq"};

const KeywordSet kJavaKeywords = {
    "abstract", "assert", "boolean", "break", "byte", "case", "catch",
    "char", "class", "const", "continue", "default", "do", "double", "else",
    "enum", "extends", "final", "finally", "float", "for", "goto", "if",
    "implements", "import", "instanceof", "int", "interface", "long",
    "native", "new", "package", "private", "protected", "public", "record",
    "return", "sealed", "short", "static", "strictfp", "super", "switch",
    "synchronized", "this", "throw", "throws", "transient", "try", "var",
    "void", "volatile", "while", "yield"};

const KeywordSet kCSharpKeywords = {
    "abstract", "as", "async", "await", "base", "bool", "break", "byte",
    "case", "catch", "char", "checked", "class", "const", "continue",
    "decimal", "default", "delegate", "do", "double", "else", "enum",
    "event", "explicit", "extern", "finally", "fixed", "float", "for",
    "foreach", "get", "goto", "if", "implicit", "in", "int", "interface",
    "internal", "is", "lock", "long", "nameof", "namespace", "new", "object",
    "operator", "out", "override", "params", "private", "protected",
    "public", "readonly", "ref", "return", "sbyte", "sealed", "set", "short",
    "sizeof", "stackalloc", "static", "string", "struct", "switch", "this",
    "throw", "try", "typeof", "uint", "ulong", "unchecked", "unsafe",
    "ushort", "using", "var", "virtual", "void", "volatile", "when", "while",
    "yield"};

const KeywordSet kPythonKeywords = {
    "and",    "as",     "assert", "async",  "await",    "break", "class",
    "continue", "def",  "del",    "elif",   "else",     "except", "finally",
    "for",    "from",   "global", "if",     "import",   "in",    "is",
    "lambda", "nonlocal", "not",  "or",     "pass",     "raise", "return",
    "try",    "while",  "with",   "yield"};

const KeywordSet& keywords_for(Language lang) {
  switch (lang) {
    case Language::Cpp: return kCppKeywords;
    case Language::Java: return kJavaKeywords;
    case Language::CSharp: return kCSharpKeywords;
    case Language::Python: return kPythonKeywords;
  }
  return kCppKeywords;
}

// Node kinds treated as one atomic Literal token.
const KeywordSet kCppLiteralKinds = {
    "number_literal", "string_literal", "char_literal", "raw_string_literal",
    "concatenated_string", "true", "false", "nullptr", "user_defined_literal"};
const KeywordSet kJavaLiteralKinds = {
    "decimal_integer_literal", "hex_integer_literal", "octal_integer_literal",
    "binary_integer_literal", "decimal_floating_point_literal",
    "hex_floating_point_literal", "string_literal", "character_literal",
    "text_block", "true", "false", "null_literal"};
const KeywordSet kCSharpLiteralKinds = {
    "integer_literal", "real_literal", "string_literal",
    "raw_string_literal", "verbatim_string_literal", "character_literal",
    "boolean_literal", "null_literal"};
const KeywordSet kPythonLiteralKinds = {"integer", "float", "string",
                                        "concatenated_string", "true",
                                        "false", "none", "ellipsis"};

const KeywordSet& literal_kinds_for(Language lang) {
  switch (lang) {
    case Language::Cpp: return kCppLiteralKinds;
    case Language::Java: return kJavaLiteralKinds;
    case Language::CSharp: return kCSharpLiteralKinds;
    case Language::Python: return kPythonLiteralKinds;
  }
  return kCppLiteralKinds;
}

const KeywordSet kIdentifierKinds = {
    "identifier", "type_identifier", "field_identifier",
    "namespace_identifier", "statement_identifier", "property_identifier"};

// Preprocessor directive lines kept as opaque tokens.
const KeywordSet kAtomicOtherKinds = {"preproc_include", "preproc_def",
                                      "preproc_function_def", "preproc_call"};

const KeywordSet kCommentKinds = {"comment", "line_comment", "block_comment"};

bool is_alpha_word(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isalpha(static_cast<unsigned char>(c)) && c != '_') return false;
  return true;
}

TokenKind classify_leaf(Language lang, const SyntaxNode& node) {
  if (kIdentifierKinds.count(node.kind)) return TokenKind::Identifier;
  if (literal_kinds_for(lang).count(node.kind)) return TokenKind::Literal;
  if (is_alpha_word(node.text) && keywords_for(lang).count(node.text))
    return TokenKind::Keyword;
  if (!node.text.empty() &&
      !std::isalnum(static_cast<unsigned char>(node.text[0])) &&
      node.text[0] != '_')
    return TokenKind::Symbol;
  return TokenKind::Other;
}

void collect_tokens(Language lang, const SyntaxNode& node,
                    std::vector<Token>& out) {
  if (kCommentKinds.count(node.kind)) {
    out.push_back({node.text, TokenKind::Other, node.start, node.end});
    return;
  }
  if (literal_kinds_for(lang).count(node.kind) ||
      kAtomicOtherKinds.count(node.kind)) {
    TokenKind k = kAtomicOtherKinds.count(node.kind) ? TokenKind::Other
                                                     : TokenKind::Literal;
    out.push_back({node.text, k, node.start, node.end});
    return;
  }
  if (node.is_leaf()) {
    if (node.start == node.end) return;  // zero-width MISSING node
    out.push_back({node.text, classify_leaf(lang, node), node.start, node.end});
    return;
  }
  for (const auto& c : node.children) collect_tokens(lang, c, out);
}

// --- function extraction -------------------------------------------------

bool is_function_kind(Language lang, const SyntaxNode& n) {
  switch (lang) {
    case Language::Python:
      return n.kind == "function_definition";
    case Language::Java:
      return (n.kind == "method_declaration" ||
              n.kind == "constructor_declaration") &&
             n.child_by_field("body") != nullptr;
    case Language::CSharp:
      if (n.kind == "local_function_statement") return true;
      return (n.kind == "method_declaration" ||
              n.kind == "constructor_declaration") &&
             (n.child_by_field("body") != nullptr ||
              n.first_child_of_kind("arrow_expression_clause") != nullptr);
    case Language::Cpp:
      return n.kind == "function_definition" &&
             n.child_by_field("body") != nullptr;
  }
  return false;
}

// Innermost declared name of a C++ declarator chain.
std::string cpp_declarator_name(const SyntaxNode& declarator) {
  const SyntaxNode* cur = &declarator;
  while (true) {
    if (cur->kind == "identifier" || cur->kind == "field_identifier" ||
        cur->kind == "destructor_name" || cur->kind == "operator_name")
      return cur->text;
    if (cur->kind == "qualified_identifier") {
      if (const auto* name = cur->child_by_field("name")) {
        cur = name;
        continue;
      }
    }
    if (const auto* inner = cur->child_by_field("declarator")) {
      cur = inner;
      continue;
    }
    return cur->text;
  }
}

std::string function_name(Language lang, const SyntaxNode& n) {
  if (lang == Language::Cpp) {
    if (const auto* d = n.child_by_field("declarator"))
      return cpp_declarator_name(*d);
    return "";
  }
  if (const auto* name = n.child_by_field("name")) return name->text;
  return "";
}

void find_functions(const SyntaxTree& tree, const SyntaxNode& node,
                    bool inside_function, std::vector<SourceFunction>& out) {
  bool here = is_function_kind(tree.language, node);
  if (here && !inside_function) {
    bool has_error = false;
    walk(node, [&](const SyntaxNode& d) {
      if (d.kind == "ERROR" || (d.start == d.end && d.is_leaf()))
        has_error = true;
      return !has_error;
    });
    if (!has_error) {
      SourceFunction fn;
      fn.language = tree.language;
      fn.name = function_name(tree.language, node);
      fn.body = node.text;
      fn.origin_start = node.start;
      fn.origin_end = node.end;
      std::vector<Token> toks;
      collect_tokens(tree.language, node, toks);
      fn.tokens = std::move(toks);
      out.push_back(std::move(fn));
    }
  }
  for (const auto& c : node.children)
    find_functions(tree, c, inside_function || here, out);
}

// --- strip_noncode --------------------------------------------------------

struct Edit {
  uint32_t start, end;
  std::string replacement;
};

bool is_jump_kind(const std::string& kind) {
  return kind == "return_statement" || kind == "break_statement" ||
         kind == "continue_statement" || kind == "throw_statement" ||
         kind == "raise_statement";
}

bool is_block_kind(Language lang, const std::string& kind) {
  switch (lang) {
    case Language::Cpp: return kind == "compound_statement";
    case Language::Java:
      return kind == "block" || kind == "switch_block_statement_group";
    case Language::CSharp:
      return kind == "block" || kind == "switch_section";
    case Language::Python: return kind == "block";
  }
  return false;
}

bool is_statement_like(const SyntaxNode& n) {
  return n.is_named && n.kind != "comment" && n.kind != "line_comment" &&
         n.kind != "block_comment" && n.kind != "switch_label";
}

// Literal false / 0, seen through parens and condition clauses.
bool is_false_literal(const SyntaxNode& n) {
  const SyntaxNode* cur = &n;
  while ((cur->kind == "parenthesized_expression" ||
          cur->kind == "condition_clause") &&
         !cur->children.empty()) {
    const SyntaxNode* inner = nullptr;
    for (const auto& c : cur->children)
      if (c.is_named) inner = &c;
    if (!inner) break;
    cur = inner;
  }
  if (cur->kind == "false") return true;
  if (cur->kind == "boolean_literal" && cur->text == "false") return true;
  return (cur->kind == "number_literal" || cur->kind == "integer" ||
          cur->kind == "integer_literal" ||
          cur->kind == "decimal_integer_literal") &&
         cur->text == "0";
}

// Replaces the body of a dead branch with an empty-but-parseable stub.
void empty_out_branch(Language lang, const SyntaxNode& body,
                      std::vector<Edit>& edits) {
  if (lang == Language::Python) {
    edits.push_back({body.start, body.end, "pass"});
  } else if (is_block_kind(lang, body.kind)) {
    edits.push_back({body.start, body.end, "{}"});
  } else {
    edits.push_back({body.start, body.end, ";"});
  }
}

void collect_strip_edits(Language lang, const SyntaxNode& node,
                         std::vector<Edit>& edits) {
  if (kCommentKinds.count(node.kind)) {
    edits.push_back({node.start, node.end, ""});
    return;
  }

  // Dead branch bodies: if (false) ... / while (false) ...
  if (node.kind == "if_statement") {
    const auto* cond = node.child_by_field("condition");
    const auto* cons = node.child_by_field("consequence");
    if (cond && cons && is_false_literal(*cond)) {
      empty_out_branch(lang, *cons, edits);
      for (const auto& c : node.children)
        if (&c != cons) collect_strip_edits(lang, c, edits);
      return;
    }
  }
  if (node.kind == "while_statement") {
    const auto* cond = node.child_by_field("condition");
    const auto* body = node.child_by_field("body");
    if (cond && body && is_false_literal(*cond)) {
      empty_out_branch(lang, *body, edits);
      return;
    }
  }

  if (is_block_kind(lang, node.kind)) {
    bool dead = false;
    std::vector<const SyntaxNode*> alive;
    for (const auto& c : node.children) {
      if (kCommentKinds.count(c.kind)) {
        edits.push_back({c.start, c.end, ""});
        continue;
      }
      if (!is_statement_like(c)) continue;
      if (dead) {
        edits.push_back({c.start, c.end, ""});
        continue;
      }
      alive.push_back(&c);
      if (is_jump_kind(c.kind)) dead = true;
    }
    // A Python block cannot be emptied: a comment-only block collapses to
    // a bare pass.
    if (lang == Language::Python && alive.empty()) {
      edits.push_back({node.start, node.end, "pass"});
      return;
    }
    for (const auto* a : alive) collect_strip_edits(lang, *a, edits);
    return;
  }

  for (const auto& c : node.children) collect_strip_edits(lang, c, edits);
}

// Python docstrings: a string expression-statement that is the first
// statement of a function or class body block.
void collect_docstring_edits(Language lang, const SyntaxNode& node,
                             std::vector<Edit>& edits) {
  if (lang != Language::Python) return;
  walk(node, [&](const SyntaxNode& n) {
    if (n.kind != "function_definition" && n.kind != "class_definition")
      return true;
    const auto* body = n.child_by_field("body");
    if (!body) return true;
    const SyntaxNode* first = nullptr;
    size_t stmt_count = 0;
    for (const auto& c : body->children) {
      if (!is_statement_like(c)) continue;
      ++stmt_count;
      if (!first) first = &c;
    }
    if (first && first->kind == "expression_statement" &&
        first->children.size() == 1 && first->children[0].kind == "string") {
      if (stmt_count == 1)
        edits.push_back({first->start, first->end, "pass"});
      else
        edits.push_back({first->start, first->end, ""});
    }
    return true;
  });
}

std::string apply_edits(const std::string& text, std::vector<Edit> edits) {
  std::sort(edits.begin(), edits.end(), [](const Edit& a, const Edit& b) {
    return a.start < b.start || (a.start == b.start && a.end > b.end);
  });
  // Drop edits nested inside an earlier, wider edit.
  std::vector<Edit> flat;
  for (const auto& e : edits) {
    if (!flat.empty() && e.start < flat.back().end) {
      if (e.end <= flat.back().end) continue;
    }
    flat.push_back(e);
  }
  std::string out;
  out.reserve(text.size());
  uint32_t pos = 0;
  for (const auto& e : flat) {
    out.append(text, pos, e.start - pos);
    // Pure deletions that leave a line blank take the whole line with them.
    if (e.replacement.empty()) {
      size_t line_begin = out.find_last_of('\n');
      line_begin = (line_begin == std::string::npos) ? 0 : line_begin + 1;
      bool only_ws_before =
          out.find_first_not_of(" \t", line_begin) == std::string::npos;
      uint32_t after = e.end;
      bool only_ws_after = true;
      while (after < text.size() && text[after] != '\n') {
        if (text[after] != ' ' && text[after] != '\t') {
          only_ws_after = false;
          break;
        }
        ++after;
      }
      if (only_ws_before && only_ws_after && after < text.size()) {
        out.erase(line_begin);
        pos = after + 1;
        continue;
      }
      out.append(" ");
    } else {
      out.append(e.replacement);
    }
    pos = e.end;
  }
  out.append(text, pos, text.size() - pos);
  return out;
}

}  // namespace

std::vector<SourceFunction> extract_functions(const SyntaxTree& tree) {
  std::vector<SourceFunction> out;
  find_functions(tree, tree.root, false, out);
  return out;
}

std::vector<Token> tokenize(const SyntaxTree& tree) {
  std::vector<Token> out;
  collect_tokens(tree.language, tree.root, out);
  return out;
}

std::vector<Token> tokenize(const SourceFunction& fn) {
  return tokenize(parse_function(fn));
}

SyntaxTree parse_function(const SourceFunction& fn) {
  return parse(fn.body, fn.language);
}

bool is_reserved_keyword(Language lang, std::string_view word) {
  return keywords_for(lang).count(word) > 0;
}

SourceFunction strip_noncode(const SourceFunction& fn) {
  SourceFunction cur = fn;
  // Stripping can expose new dead shapes (a comment hiding behind a return);
  // iterate to the fixed point, which in practice is 1-2 rounds.
  for (int round = 0; round < 4; ++round) {
    SyntaxTree tree = parse(cur.body, cur.language);
    if (tree.has_error)
      throw ReparseFailure("strip_noncode produced unparseable text");
    std::vector<Edit> edits;
    collect_docstring_edits(cur.language, tree.root, edits);
    collect_strip_edits(cur.language, tree.root, edits);
    if (edits.empty()) break;
    std::string next = apply_edits(cur.body, std::move(edits));
    if (next == cur.body) break;
    cur.body = std::move(next);
  }
  SyntaxTree check = parse(cur.body, cur.language);
  if (check.has_error)
    throw ReparseFailure("strip_noncode produced unparseable text");
  cur.tokens = tokenize(check);
  return cur;
}

std::string join_tokens(const std::vector<Token>& tokens, Language lang,
                        std::string_view original_body) {
  if (lang != Language::Python) {
    std::string out;
    for (const auto& t : tokens) {
      if (!out.empty()) out.push_back(' ');
      out += t.text;
    }
    return out;
  }
  // Python: keep the original line/column layout so indentation survives.
  std::vector<uint32_t> line_starts = {0};
  for (uint32_t i = 0; i < original_body.size(); ++i)
    if (original_body[i] == '\n') line_starts.push_back(i + 1);
  auto line_of = [&](uint32_t off) {
    auto it = std::upper_bound(line_starts.begin(), line_starts.end(), off);
    return static_cast<size_t>(it - line_starts.begin()) - 1;
  };
  std::string out;
  size_t prev_line = SIZE_MAX;
  for (const auto& t : tokens) {
    size_t line = line_of(t.start);
    if (line != prev_line) {
      if (prev_line != SIZE_MAX) {
        // Multi-line tokens (strings) advance the current line.
        out.push_back('\n');
      }
      uint32_t col = t.start - line_starts[line];
      out.append(col, ' ');
    } else if (!out.empty() && out.back() != ' ') {
      out.push_back(' ');
    }
    out += t.text;
    prev_line = line_of(t.end == t.start ? t.start : t.end - 1);
  }
  out.push_back('\n');
  return out;
}

}  // namespace distilc::syntax
