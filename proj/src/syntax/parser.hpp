#pragma once

#include <stdexcept>
#include <string_view>

#include "tree.hpp"

namespace distilc::syntax {

struct ParseFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Parses `source` under the grammar for `language` into a SyntaxTree.
// Grammar error recovery is kept: a tree with ERROR/MISSING nodes is returned
// with has_error set. Throws ParseFailure only when no tree is producible.
// Thread-safe; one underlying parser per language per thread.
SyntaxTree parse(std::string_view source, Language language);

}  // namespace distilc::syntax
