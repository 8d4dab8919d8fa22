#include "parser.hpp"

#include <tree_sitter/api.h>

#include <memory>

extern "C" {
const TSLanguage* tree_sitter_python(void);
const TSLanguage* tree_sitter_java(void);
const TSLanguage* tree_sitter_cpp(void);
const TSLanguage* tree_sitter_c_sharp(void);
}

namespace distilc::syntax {
namespace {

const TSLanguage* grammar_for(Language lang) {
  switch (lang) {
    case Language::Cpp: return tree_sitter_cpp();
    case Language::Java: return tree_sitter_java();
    case Language::CSharp: return tree_sitter_c_sharp();
    case Language::Python: return tree_sitter_python();
  }
  return nullptr;
}

struct ParserDeleter {
  void operator()(TSParser* p) const { ts_parser_delete(p); }
};

TSParser* thread_parser(Language lang) {
  thread_local std::unique_ptr<TSParser, ParserDeleter> parsers[4];
  auto& slot = parsers[static_cast<int>(lang)];
  if (!slot) {
    slot.reset(ts_parser_new());
    ts_parser_set_language(slot.get(), grammar_for(lang));
  }
  return slot.get();
}

SyntaxNode convert(TSNode node, std::string_view source) {
  SyntaxNode out;
  out.kind = ts_node_type(node);
  out.start = ts_node_start_byte(node);
  out.end = ts_node_end_byte(node);
  out.is_named = ts_node_is_named(node);
  out.text.assign(source.substr(out.start, out.end - out.start));
  uint32_t n = ts_node_child_count(node);
  out.children.reserve(n);
  for (uint32_t i = 0; i < n; ++i) {
    out.children.push_back(convert(ts_node_child(node, i), source));
    if (const char* f = ts_node_field_name_for_child(node, i))
      out.children.back().field = f;
  }
  return out;
}

}  // namespace

SyntaxTree parse(std::string_view source, Language language) {
  if (source.empty()) throw ParseFailure("empty source");
  TSParser* parser = thread_parser(language);
  ts_parser_reset(parser);
  TSTree* tree = ts_parser_parse_string(parser, nullptr, source.data(),
                                        static_cast<uint32_t>(source.size()));
  if (!tree) throw ParseFailure("parser produced no tree");
  SyntaxTree out;
  out.language = language;
  out.source.assign(source);
  TSNode root = ts_tree_root_node(tree);
  out.has_error = ts_node_has_error(root);
  out.root = convert(root, source);
  ts_tree_delete(tree);
  return out;
}

}  // namespace distilc::syntax
