#include "noise.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

#include "morph/pattern.hpp"
#include "syntax/parser.hpp"

namespace distilc::noise {

using syntax::SourceFunction;
using syntax::SyntaxNode;
using syntax::Token;
using syntax::TokenKind;

uint64_t splitmix64(uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

uint64_t mix_seed(uint64_t base_seed, uint64_t record_index) {
  uint64_t state = base_seed ^ (0x9E3779B97F4A7C15ULL * (record_index + 1));
  return splitmix64(state);
}

void NoiseSpec::validate() const {
  auto check = [](double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0))
      throw std::invalid_argument(std::string(name) +
                                  " must be a fraction in [0, 1]");
  };
  check(mask_ratio, "mask_ratio");
  check(dropout_ratio, "dropout_ratio");
  check(permute_ratio, "permute_ratio");
  check(bow_mask_ratio, "bow_mask_ratio");
  check(bow_dropout_ratio, "bow_dropout_ratio");
  check(bow_permute_ratio, "bow_permute_ratio");
}

const std::string* RenameMap::find(std::string_view original) const {
  for (const auto& [from, to] : entries)
    if (from == original) return &to;
  return nullptr;
}

RenameMap RenameMap::inverted() const {
  RenameMap inv;
  for (const auto& [from, to] : entries) inv.entries.push_back({to, from});
  return inv;
}

namespace {

template <typename T>
void fisher_yates(std::vector<T>& v, SplitMix64& rng) {
  for (size_t i = v.size(); i > 1; --i)
    std::swap(v[i - 1], v[rng.below(i)]);
}

// identifier spellings with library meaning that renaming would break but
// that no registry surface pattern mentions
const std::set<std::string>& builtin_allowlist(Language lang) {
  static const std::set<std::string> kCpp = {
      "size_t", "int64_t", "uint64_t", "pair",
      "make_pair", "first", "second"};
  static const std::set<std::string> kJava = {
      "Integer", "Long", "Double", "Boolean", "Character",
      "Object", "Random", "Arrays", "Collections"};
  static const std::set<std::string> kCSharp = {"Random", "Object", "Array",
                                                "Convert"};
  static const std::set<std::string> kPython = {
      "list", "dict", "set",    "tuple", "range", "enumerate",
      "abs",  "min",  "max",    "sum",   "sorted", "ord",
      "chr",  "self", "cls"};
  switch (lang) {
    case Language::Cpp: return kCpp;
    case Language::Java: return kJava;
    case Language::CSharp: return kCSharp;
    case Language::Python: return kPython;
  }
  return kCpp;
}

std::set<std::string> registry_words(Language lang,
                                     const morph::MorphemeRegistry& registry) {
  std::set<std::string> words;
  for (const auto* rule : registry.rules_for(lang))
    for (const auto& tok : rule->surface.toks)
      if (tok.kind == morph::Pattern::Tok::Word) words.insert(tok.text);
  return words;
}

// names bound by a function definition inside this unit
std::set<std::string> defined_function_names(const syntax::SyntaxTree& tree) {
  std::set<std::string> names;
  syntax::walk(tree.root, [&](const SyntaxNode& n) {
    if (n.kind == "function_definition" || n.kind == "method_declaration" ||
        n.kind == "local_function_statement") {
      if (const SyntaxNode* name = n.child_by_field("name")) {
        names.insert(name->text);
      } else {
        const SyntaxNode* decl = n.child_by_field("declarator");
        while (decl && decl->kind != "function_declarator")
          decl = decl->child_by_field("declarator");
        if (decl)
          if (const SyntaxNode* id = decl->child_by_field("declarator"))
            if (id->is_leaf()) names.insert(id->text);
      }
    }
    return true;
  });
  return names;
}

std::string splice_renames(const std::string& body,
                           const std::vector<Token>& tokens,
                           const std::map<std::string, std::string>& table) {
  std::string out;
  size_t cursor = 0;
  for (const Token& t : tokens) {
    if (t.kind != TokenKind::Identifier) continue;
    auto it = table.find(t.text);
    if (it == table.end()) continue;
    out.append(body, cursor, t.start - cursor);
    out += it->second;
    cursor = t.end;
  }
  out.append(body, cursor, std::string::npos);
  return out;
}

}  // namespace

std::pair<SourceFunction, RenameMap> obfuscate_identifiers(
    const SourceFunction& fn, const morph::MorphemeRegistry& registry) {
  syntax::SyntaxTree tree = syntax::parse_function(fn);
  std::set<std::string> func_names = defined_function_names(tree);
  std::set<std::string> vocab = registry_words(fn.language, registry);
  const std::set<std::string>& allow = builtin_allowlist(fn.language);

  std::vector<Token> tokens = syntax::tokenize(fn);
  RenameMap map;
  std::map<std::string, std::string> table;
  int next_func = 0;
  int next_var = 0;
  for (const Token& t : tokens) {
    if (t.kind != TokenKind::Identifier) continue;
    if (syntax::is_reserved_keyword(fn.language, t.text)) continue;
    if (vocab.count(t.text) || allow.count(t.text)) continue;
    if (table.count(t.text)) continue;
    std::string repl = func_names.count(t.text)
                           ? "FUNC_" + std::to_string(next_func++)
                           : "VAR_" + std::to_string(next_var++);
    table.emplace(t.text, repl);
    map.entries.push_back({t.text, repl});
  }

  SourceFunction out = fn;
  out.body = splice_renames(fn.body, tokens, table);
  if (const std::string* renamed = map.find(fn.name)) out.name = *renamed;
  out.tokens = syntax::tokenize(out);
  return {std::move(out), std::move(map)};
}

std::string apply_rename(const SourceFunction& fn, const RenameMap& map) {
  std::map<std::string, std::string> table;
  for (const auto& [from, to] : map.entries) table.emplace(from, to);
  return splice_renames(fn.body, syntax::tokenize(fn), table);
}

std::string shuffle_lines(const SourceFunction& fn, uint64_t seed) {
  std::vector<std::string> lines;
  std::string cur;
  for (char c : fn.body) {
    if (c == '\n') {
      lines.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  bool trailing_newline = !fn.body.empty() && fn.body.back() == '\n';
  if (!cur.empty()) lines.push_back(cur);
  SplitMix64 rng(seed);
  fisher_yates(lines, rng);
  std::string out;
  for (size_t i = 0; i < lines.size(); ++i) {
    if (i) out.push_back('\n');
    out += lines[i];
  }
  if (trailing_newline) out.push_back('\n');
  return out;
}

std::string shuffle_tokens(const SourceFunction& fn, uint64_t seed) {
  std::vector<Token> tokens = syntax::tokenize(fn);
  std::vector<std::string> texts;
  texts.reserve(tokens.size());
  for (const Token& t : tokens) texts.push_back(t.text);
  SplitMix64 rng(seed);
  fisher_yates(texts, rng);
  std::string out;
  for (size_t i = 0; i < texts.size(); ++i) {
    if (i) out.push_back(' ');
    out += texts[i];
  }
  return out;
}

std::string delete_keywords(const SourceFunction& fn) {
  std::string out;
  for (const Token& t : syntax::tokenize(fn)) {
    if (t.kind == TokenKind::Keyword) continue;
    if (!out.empty()) out.push_back(' ');
    out += t.text;
  }
  return out;
}

std::string delete_symbols(const SourceFunction& fn) {
  static const std::set<std::string> kStructural = {"(", ")", "[", "]", "{",
                                                    "}", ",", ".", ";"};
  std::string out = fn.body;
  for (const Token& t : syntax::tokenize(fn))
    if (kStructural.count(t.text) && t.end == t.start + 1 &&
        t.start < out.size())
      out[t.start] = ' ';
  return out;
}

std::vector<std::string> corrupt_dae(const std::vector<std::string>& tokens,
                                     const std::vector<bool>& is_bow_region,
                                     const NoiseSpec& spec) {
  if (tokens.size() != is_bow_region.size())
    throw std::invalid_argument("token/flag length mismatch");
  spec.validate();
  for (const std::string& t : tokens)
    if (t == kMaskToken)
      throw std::invalid_argument("input already contains the mask sentinel");

  SplitMix64 rng(spec.seed);
  struct Item {
    std::string text;
    bool bow;
    bool masked;
  };

  // pass 1: mask (one draw per token)
  std::vector<Item> items;
  items.reserve(tokens.size());
  for (size_t i = 0; i < tokens.size(); ++i) {
    double ratio = is_bow_region[i] ? spec.bow_mask_ratio : spec.mask_ratio;
    bool hit = rng.unit() < ratio;
    items.push_back(
        {hit ? std::string(kMaskToken) : tokens[i], is_bow_region[i], hit});
  }

  // pass 2: dropout (one draw per token; masked tokens are exempt)
  std::vector<Item> kept;
  kept.reserve(items.size());
  for (const Item& item : items) {
    double ratio = item.bow ? spec.bow_dropout_ratio : spec.dropout_ratio;
    bool hit = rng.unit() < ratio;
    if (hit && !item.masked) continue;
    kept.push_back(item);
  }

  // pass 3: adjacent statement swaps
  bool any_semicolon = false;
  for (const Item& item : kept)
    if (!item.bow && item.text == ";") any_semicolon = true;
  auto breaks_statement = [&](const Item& item) {
    if (item.bow) return false;
    if (item.text == ";" || item.text == "{" || item.text == "}") return true;
    return !any_semicolon && item.text == ":";
  };
  std::vector<std::vector<Item>> segments(1);
  for (Item& item : kept) {
    bool brk = breaks_statement(item);
    segments.back().push_back(std::move(item));
    if (brk) segments.emplace_back();
  }
  if (segments.back().empty()) segments.pop_back();
  for (size_t i = 0; i + 1 < segments.size(); ++i)
    if (rng.unit() < spec.permute_ratio) std::swap(segments[i], segments[i + 1]);

  std::vector<Item> flat;
  for (auto& seg : segments)
    for (Item& item : seg) flat.push_back(std::move(item));

  // pass 4: within-bag shuffle (one draw per maximal bag run)
  size_t i = 0;
  while (i < flat.size()) {
    if (!flat[i].bow) {
      ++i;
      continue;
    }
    size_t j = i;
    while (j < flat.size() && flat[j].bow) ++j;
    if (rng.unit() < spec.bow_permute_ratio) {
      std::vector<std::string> run;
      for (size_t k = i; k < j; ++k) run.push_back(std::move(flat[k].text));
      fisher_yates(run, rng);
      for (size_t k = i; k < j; ++k) flat[k].text = std::move(run[k - i]);
    }
    i = j;
  }

  std::vector<std::string> out;
  out.reserve(flat.size());
  for (Item& item : flat) out.push_back(std::move(item.text));
  return out;
}

std::vector<std::string> window_shuffle(std::vector<std::string> tokens,
                                        size_t window, uint64_t seed) {
  if (window < 2) return tokens;
  SplitMix64 rng(seed);
  for (size_t start = 0; start < tokens.size(); start += window) {
    size_t len = std::min(window, tokens.size() - start);
    for (size_t i = len; i > 1; --i)
      std::swap(tokens[start + i - 1], tokens[start + rng.below(i)]);
  }
  return tokens;
}

}  // namespace distilc::noise
