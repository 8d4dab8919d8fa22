#pragma once

#include <stdexcept>

#include "distill/distilled.hpp"
#include "morph/registry.hpp"
#include "syntax/frontend.hpp"

namespace distilc::distill {

// A node kind reached reassembly with no template and no fallback, or a
// pipeline precondition did not hold. Internal error by construction.
struct UntemplatedNode : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Drops language-specific noise (modifiers, annotations, qualifiers,
// decorators, pointer/reference adornments); identifiers, literals, type
// names, control keywords, and operators survive.
syntax::SyntaxTree prune(const syntax::SyntaxTree& tree, Language lang);

// Lowers a pruned tree onto unified node kinds (u_func, u_if, u_call, ...),
// rewriting every registry match to its unified form and Java/C# switch
// statements to if/elif/else chains. Identifier leaves pass through for
// fuzz_names.
syntax::SyntaxTree unify(const syntax::SyntaxTree& pruned, Language lang,
                         const morph::MorphemeRegistry& registry);

// Replaces every remaining identifier leaf with a u_bag node holding its
// snake/camel-case segmentation.
syntax::SyntaxTree fuzz_names(const syntax::SyntaxTree& unified);

// Serializes a unified+fuzzed tree through the template grammar.
DistilledCode reassemble(const syntax::SyntaxTree& tree);

// strip_noncode + parse + prune + unify + fuzz_names + reassemble.
DistilledCode distill(const syntax::SourceFunction& fn,
                      const morph::MorphemeRegistry& registry);

// Debug s-expression of a (unified) tree; tests compare shapes against
// hand-written expectations.
std::string dump_tree(const syntax::SyntaxNode& node);

}  // namespace distilc::distill
