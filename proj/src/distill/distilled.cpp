#include "distilled.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_set>

namespace distilc::distill {
namespace {

const std::unordered_set<std::string_view> kStatementKeywords = {
    "func", "param", "decl", "if",   "elif",     "else", "while",
    "for",  "return", "break", "continue", "call", "assign"};

const std::unordered_set<std::string_view> kUnifiedBuiltins = {
    "pow",     "sqrt",    "log",     "floor",  "rand",   "print",
    "println", "islower", "tolower", "replace", "length", "int"};

const std::unordered_set<std::string_view> kTypeRefs = {
    "int",  "float",    "string", "bool",  "char",    "var",
    "vector<>", "map<>", "set<>", "queue<>", "deque<>"};

const std::unordered_set<std::string_view> kSymbols = {
    "+",  "-",  "*",  "/",  "%",  "**", "//", "&&", "||", "!",  "<",
    "<=", ">",  ">=", "==", "!=", "<<", ">>", "&",  "|",  "^",  "~",
    "=",  "+=", "-=", "*=", "/=", "%=", "(",  ")",  "[",  "]",  ",",
    "?",  ":"};

bool bag_char(char c) {
  return std::islower(static_cast<unsigned char>(c)) ||
         std::isdigit(static_cast<unsigned char>(c)) || c == '_';
}

bool lower(char c) { return std::islower(static_cast<unsigned char>(c)); }
bool upper(char c) { return std::isupper(static_cast<unsigned char>(c)); }
bool digit(char c) { return std::isdigit(static_cast<unsigned char>(c)); }

}  // namespace

bool is_statement_keyword(std::string_view w) {
  return kStatementKeywords.count(w) > 0;
}
bool is_unified_builtin(std::string_view w) {
  return kUnifiedBuiltins.count(w) > 0;
}
bool is_type_ref(std::string_view w) { return kTypeRefs.count(w) > 0; }
bool is_shared_symbol(std::string_view w) { return kSymbols.count(w) > 0; }

std::vector<std::string> split_subwords(std::string_view id) {
  std::vector<std::string> words;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) {
      words.push_back(cur);
      cur.clear();
    }
  };
  for (size_t i = 0; i < id.size(); ++i) {
    char c = id[i];
    if (c == '_') {
      flush();
      continue;
    }
    if (!cur.empty()) {
      char p = id[i - 1];
      bool boundary =
          (lower(p) && upper(c)) || (digit(p) != digit(c)) ||
          // acronym end: HTTPServer -> http, server
          (upper(p) && upper(c) && i + 1 < id.size() && lower(id[i + 1]));
      if (p == '_') boundary = false;
      if (boundary) flush();
    }
    cur.push_back(
        static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  flush();
  if (words.empty()) words.push_back("_");
  return words;
}

int binop_power(std::string_view op) {
  if (op == "=") return 2;
  if (op == "||") return 4;
  if (op == "&&") return 6;
  if (op == "|") return 8;
  if (op == "^") return 10;
  if (op == "&") return 12;
  if (op == "==" || op == "!=") return 14;
  if (op == "<" || op == "<=" || op == ">" || op == ">=") return 16;
  if (op == "<<" || op == ">>") return 18;
  if (op == "+" || op == "-") return 20;
  if (op == "*" || op == "/" || op == "%" || op == "**" || op == "//")
    return 22;
  return -1;
}

std::string serialize(const DistilledCode& code) {
  std::string out;
  for (const auto& t : code.tokens) {
    if (!out.empty()) out.push_back(' ');
    switch (t.kind) {
      case TokKind::Bag: {
        out.push_back('{');
        for (size_t i = 0; i < t.words.size(); ++i) {
          if (i) out.push_back(' ');
          out += t.words[i];
        }
        out.push_back('}');
        break;
      }
      default:
        out += t.text;
    }
  }
  return out;
}

DistilledCode deserialize(std::string_view text, Language source_language) {
  DistilledCode code;
  code.source_language = source_language;
  size_t i = 0;
  auto fail = [&](const std::string& why) {
    throw DistilledParseError("offset " + std::to_string(i) + ": " + why);
  };
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '{') {
      if (i + 1 < text.size() && bag_char(text[i + 1])) {
        size_t end = text.find('}', i);
        if (end == std::string_view::npos) fail("unterminated name bag");
        std::vector<std::string> words;
        std::string w;
        for (size_t j = i + 1; j < end; ++j) {
          if (text[j] == ' ') {
            if (!w.empty()) words.push_back(std::move(w)), w.clear();
          } else if (bag_char(text[j])) {
            w.push_back(text[j]);
          } else {
            fail("bad name bag character");
          }
        }
        if (!w.empty()) words.push_back(std::move(w));
        if (words.empty()) fail("empty name bag");
        code.tokens.push_back(bag(std::move(words)));
        i = end + 1;
      } else {
        code.tokens.push_back(open());
        ++i;
      }
      continue;
    }
    if (c == '}') {
      code.tokens.push_back(close());
      ++i;
      continue;
    }
    if (c == ';') {
      code.tokens.push_back(sep());
      ++i;
      continue;
    }
    if (c == '"') {
      size_t j = i + 1;
      while (j < text.size() && text[j] != '"') {
        if (text[j] == '\\') ++j;
        ++j;
      }
      if (j >= text.size()) fail("unterminated string literal");
      code.tokens.push_back(lit(std::string(text.substr(i, j - i + 1))));
      i = j + 1;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t j = i;
      while (j < text.size() &&
             !std::isspace(static_cast<unsigned char>(text[j])))
        ++j;
      code.tokens.push_back(lit(std::string(text.substr(i, j - i))));
      i = j;
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      size_t j = i;
      while (j < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[j])) ||
              text[j] == '_'))
        ++j;
      std::string word(text.substr(i, j - i));
      if (j + 1 < text.size() && text[j] == '<' && text[j + 1] == '>') {
        word += "<>";
        j += 2;
      }
      i = j;
      if (word == "true" || word == "false" || word == "null") {
        code.tokens.push_back(lit(word));
      } else if (word == "int") {
        // "int" is both the cast builtin and a type; call position has
        // an immediately following "(".
        size_t k = i;
        while (k < text.size() &&
               std::isspace(static_cast<unsigned char>(text[k])))
          ++k;
        if (k < text.size() && text[k] == '(')
          code.tokens.push_back(keyword(word));
        else
          code.tokens.push_back(type_ref(word));
      } else if (is_type_ref(word)) {
        code.tokens.push_back(type_ref(word));
      } else if (is_statement_keyword(word) || is_unified_builtin(word)) {
        code.tokens.push_back(keyword(word));
      } else {
        fail("word outside the distilled vocabulary: \"" + word + "\"");
      }
      continue;
    }
    // symbol; try two chars, then one
    if (i + 1 < text.size()) {
      std::string two(text.substr(i, 2));
      if (is_shared_symbol(two)) {
        code.tokens.push_back(keyword(two));
        i += 2;
        continue;
      }
    }
    std::string one(1, c);
    if (is_shared_symbol(one)) {
      code.tokens.push_back(keyword(one));
      ++i;
      continue;
    }
    fail(std::string("unexpected character '") + c + "'");
  }
  return code;
}

DistilledCode canonicalize(DistilledCode code) {
  for (auto& t : code.tokens)
    if (t.kind == TokKind::Bag) std::sort(t.words.begin(), t.words.end());
  return code;
}

bool well_formed(const DistilledCode& code, std::string* why) {
  int depth = 0;
  for (const auto& t : code.tokens) {
    if (t.kind == TokKind::Open) ++depth;
    if (t.kind == TokKind::Close) --depth;
    if (depth < 0) {
      if (why) *why = "unbalanced close";
      return false;
    }
    if (t.kind == TokKind::Bag) {
      if (t.words.empty()) {
        if (why) *why = "empty name bag";
        return false;
      }
      for (const auto& w : t.words)
        for (char c : w)
          if (!bag_char(c)) {
            if (why) *why = "bag word with bad character: " + w;
            return false;
          }
    }
  }
  if (depth != 0) {
    if (why) *why = "unbalanced open";
    return false;
  }
  return true;
}

}  // namespace distilc::distill
