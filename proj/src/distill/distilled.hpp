#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lang.hpp"

namespace distilc::distill {

// One token of distilled code.
//   Keyword: statement keywords, unified builtin names, shared symbols
//   TypeRef: unified type text (int, float, string, bool, char, var,
//            vector<>, map<>, set<>, queue<>, deque<>)
//   Bag:     name bag; serialized {w1 w2 ...}
//   Lit:     literal (numbers as-is; strings double-quoted; true/false/null)
//   Open/Close: block braces; Sep: statement separator
enum class TokKind { Keyword, TypeRef, Bag, Lit, Open, Close, Sep };

struct DToken {
  TokKind kind = TokKind::Keyword;
  std::string text;                 // Keyword/TypeRef/Lit
  std::vector<std::string> words;   // Bag

  bool operator==(const DToken&) const = default;
};

struct DistilledCode {
  std::vector<DToken> tokens;
  Language source_language = Language::Cpp;
};

inline DToken keyword(std::string text) {
  return {TokKind::Keyword, std::move(text), {}};
}
inline DToken type_ref(std::string text) {
  return {TokKind::TypeRef, std::move(text), {}};
}
inline DToken bag(std::vector<std::string> words) {
  return {TokKind::Bag, "", std::move(words)};
}
inline DToken lit(std::string text) {
  return {TokKind::Lit, std::move(text), {}};
}
inline DToken open() { return {TokKind::Open, "{", {}}; }
inline DToken close() { return {TokKind::Close, "}", {}}; }
inline DToken sep() { return {TokKind::Sep, ";", {}}; }

// Closed vocabulary.
bool is_statement_keyword(std::string_view word);
bool is_unified_builtin(std::string_view word);
bool is_type_ref(std::string_view word);
bool is_shared_symbol(std::string_view word);

// Snake/camel-case segmentation, lowercased: getMaxValue -> {get,max,value},
// two_sum2 -> {two,sum,2}.
std::vector<std::string> split_subwords(std::string_view identifier);

// Binding power of a shared binary operator in distilled expression syntax
// (C precedence, higher binds tighter); -1 for non-operators. Ternary sits
// at kTernaryPower, prefix operators at kUnaryPower.
int binop_power(std::string_view op);
inline constexpr int kTernaryPower = 3;
inline constexpr int kUnaryPower = 24;
inline constexpr int kAtomPower = 100;

struct DistilledParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string serialize(const DistilledCode& code);
DistilledCode deserialize(std::string_view text, Language source_language);

// Sorts every bag's words; idempotent; everything else unchanged.
DistilledCode canonicalize(DistilledCode code);

// Balanced Open/Close and non-empty lowercase bags.
bool well_formed(const DistilledCode& code, std::string* why = nullptr);

}  // namespace distilc::distill
