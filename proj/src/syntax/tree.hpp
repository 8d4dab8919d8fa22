#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "../lang.hpp"

namespace distilc::syntax {

// One node of a parsed (or transformed) syntax tree. `kind` is the grammar's
// node-kind name for parse output; distillation passes introduce synthetic
// kinds prefixed "u_". Child spans are contained in the parent span and are
// pairwise non-overlapping in order.
struct SyntaxNode {
  std::string kind;
  std::string field;  // grammar field label under the parent ("" if none)
  uint32_t start = 0;  // byte offset into the parsed source
  uint32_t end = 0;
  std::string text;  // exact source slice (or synthesized text on u_ nodes)
  bool is_named = false;
  std::vector<SyntaxNode> children;

  bool is_leaf() const { return children.empty(); }

  const SyntaxNode* child_by_field(std::string_view name) const {
    for (const auto& c : children)
      if (c.field == name) return &c;
    return nullptr;
  }

  const SyntaxNode* first_child_of_kind(std::string_view k) const {
    for (const auto& c : children)
      if (c.kind == k) return &c;
    return nullptr;
  }
};

// Depth-first pre-order walk; visit returns false to skip a node's children.
template <typename Fn>
void walk(const SyntaxNode& node, Fn&& visit) {
  if (!visit(node)) return;
  for (const auto& c : node.children) walk(c, visit);
}

struct SyntaxTree {
  Language language = Language::Cpp;
  std::string source;
  SyntaxNode root;
  bool has_error = false;
};

enum class TokenKind { Identifier, Keyword, Symbol, Literal, Other };

struct Token {
  std::string text;
  TokenKind kind = TokenKind::Other;
  uint32_t start = 0;
  uint32_t end = 0;
};

// A single extracted function: the unit every downstream transform works on.
struct SourceFunction {
  Language language = Language::Cpp;
  std::string name;
  std::string body;         // full function source, parseable on its own
  std::string origin_path;  // file it came from ("" for raw text input)
  uint32_t origin_start = 0;
  uint32_t origin_end = 0;
  std::vector<Token> tokens;
};

}  // namespace distilc::syntax
