#pragma once

#include <stdexcept>
#include <vector>

#include "parser.hpp"
#include "tree.hpp"

namespace distilc::syntax {

struct ReparseFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One SourceFunction per top-level or class-member function/method definition
// in the tree. Nested local functions stay inside their enclosing function.
// Bodyless declarations (interface/abstract methods, prototypes) are skipped.
std::vector<SourceFunction> extract_functions(const SyntaxTree& tree);

// Removes comments, Python docstrings, and dead code: statements following an
// unconditional return/break/continue/throw in the same block, and bodies of
// branches guarded by literal false/0 (emptied, keeping the construct
// parseable). Idempotent. Throws ReparseFailure if the edited text no longer
// parses, which indicates a bug here rather than bad input.
SourceFunction strip_noncode(const SourceFunction& fn);

// Leaf tokens of the function's tree in source order. String-like literals
// and preprocessor directive lines come out as single atomic tokens.
std::vector<Token> tokenize(const SyntaxTree& tree);
std::vector<Token> tokenize(const SourceFunction& fn);

bool is_reserved_keyword(Language lang, std::string_view word);

// Joins tokens back into parseable text: single spaces for the brace
// languages, line/indent preserving for Python (token start offsets are
// mapped back through the original body's line structure).
std::string join_tokens(const std::vector<Token>& tokens, Language lang,
                        std::string_view original_body);

// Convenience: parse a function body on its own (bodies of all four
// languages parse standalone under their grammars).
SyntaxTree parse_function(const SourceFunction& fn);

}  // namespace distilc::syntax
