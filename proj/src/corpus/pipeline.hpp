#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "distill/distilled.hpp"
#include "morph/registry.hpp"
#include "noise/noise.hpp"
#include "syntax/frontend.hpp"

namespace distilc::corpus {

// FNV-1a over bytes; the stable hash behind record ids and split assignment.
uint64_t fnv1a(std::string_view bytes);

// Stable record id: hash of the language tag plus the function's token
// texts, so formatting differences do not split identical functions.
std::string record_id(const syntax::SourceFunction& fn);

// hash(id) % 100 -> train (<96), valid (96-97), test (98-99)
std::string split_for_id(std::string_view id);

struct IngestStats {
  size_t files_scanned = 0;
  size_t files_unparseable = 0;
  size_t functions_extracted = 0;
  size_t duplicates_skipped = 0;
  std::vector<std::string> io_errors;  // one message per unreadable root
};

// Recursively walks roots in sorted path order, parses every file whose
// extension names a supported language, extracts functions, strips noncode,
// and deduplicates by record id. Unreadable roots are reported, not fatal.
std::vector<syntax::SourceFunction> ingest(
    const std::vector<std::string>& roots, IngestStats* stats = nullptr);

struct EmitStats {
  size_t records = 0;
  std::map<std::string, size_t> skips;  // cause -> count
  size_t skipped() const;
};

// One translation pair per function, one JSON object per line with keys in
// alphabetical order (distilled, id, lang_token, split, target). The
// distilled side randomizes word order inside each name bag with
// bow_permute_ratio (seeded per record); the token-level ratios do not
// apply because every distilled field must stay deserializable. The target
// side is clean source. A zero-noise spec emits canonical distilled text.
EmitStats emit_mpg(const std::vector<syntax::SourceFunction>& functions,
                   const morph::MorphemeRegistry& registry,
                   const noise::NoiseSpec& spec, std::ostream& out);

// Masked-token records: input = distilled tokens ++ <sep> ++ source tokens
// with mask_ratio of them masked (the separator is exempt); answers list the
// original tokens at the masked positions. Keys: answers, id, input,
// positions, split.
EmitStats emit_mlm(const std::vector<syntax::SourceFunction>& functions,
                   const morph::MorphemeRegistry& registry, double mask_ratio,
                   uint64_t seed, std::ostream& out);

// Denoising records: each side is corrupted separately (distilled side uses
// the bag-aware flags), then joined with <sep>; target is the clean joined
// sequence. Keys: id, input, split, target.
EmitStats emit_dae(const std::vector<syntax::SourceFunction>& functions,
                   const morph::MorphemeRegistry& registry,
                   const noise::NoiseSpec& spec, std::ostream& out);

struct MalformedRecord : std::runtime_error {
  MalformedRecord(size_t line, const std::string& why);
  size_t line;
};

struct CorpusStats {
  size_t records = 0;
  std::map<std::string, size_t> functions_per_language;
  std::map<std::string, size_t> split_counts;
  size_t distilled_tokens = 0;
  size_t target_tokens = 0;
  double mean_length_ratio = 0.0;  // distilled/target token count, averaged
  double min_length_ratio = 0.0;
  double max_length_ratio = 0.0;
  size_t unified_call_sites = 0;
  size_t fuzzy_call_sites = 0;
  // unified / (unified + fuzzy); 1.0 when a corpus has no call sites
  double registry_hit_rate = 1.0;
};

// Scans an MPG pair file; throws MalformedRecord with the 1-based line
// number on the first undecodable record (bad JSON, missing fields, or a
// distilled field that does not deserialize to balanced tokens). Distilled
// token counts flatten bags to words; target counts use an approximate
// lexer over the source text.
CorpusStats stats(std::istream& pair_file);

// Flattens distilled tokens for corruption: bag words become individual
// tokens flagged as bag-of-words content, everything else keeps its
// serialized spelling.
void flatten_distilled(const distill::DistilledCode& code,
                       std::vector<std::string>& tokens,
                       std::vector<bool>& is_bow);

}  // namespace distilc::corpus
