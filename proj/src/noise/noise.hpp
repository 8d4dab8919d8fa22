#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "morph/registry.hpp"
#include "syntax/frontend.hpp"

namespace distilc::noise {

// Mask sentinel for DAE corruption. corrupt_dae rejects inputs that already
// contain it, so it can never collide with a source token.
inline constexpr std::string_view kMaskToken = "<mask>";

// All randomness below comes from splitmix64 so corrupted corpora are
// reproducible across platforms and standard libraries.
uint64_t splitmix64(uint64_t& state);

class SplitMix64 {
 public:
  explicit SplitMix64(uint64_t seed) : state_(seed) {}
  uint64_t next() { return splitmix64(state_); }
  // uniform index in [0, n); 0 when n == 0
  uint64_t below(uint64_t n) { return n ? next() % n : 0; }
  // uniform double in [0, 1)
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  uint64_t state_;
};

// Per-record seed: corpus jobs corrupt record k with mix_seed(base, k), so
// parallel workers never share generator state.
uint64_t mix_seed(uint64_t base_seed, uint64_t record_index);

struct NoiseSpec {
  double mask_ratio = 0.3;
  double dropout_ratio = 0.3;
  double permute_ratio = 0.2;
  double bow_mask_ratio = 0.5;
  double bow_dropout_ratio = 0.5;
  double bow_permute_ratio = 0.0;
  uint64_t seed = 0;

  // throws std::invalid_argument when a ratio leaves [0, 1]
  void validate() const;
};

struct RenameMap {
  // original -> replacement, in order of first appearance
  std::vector<std::pair<std::string, std::string>> entries;

  const std::string* find(std::string_view original) const;
  RenameMap inverted() const;
};

// DOBF-style obfuscation: every user identifier is renamed FUNC_i (names
// bound by a function definition in this unit) or VAR_i (everything else),
// densely from 0 in first-appearance order. Keywords and identifiers with
// library meaning (registry surface words plus a small per-language builtin
// list) keep their spelling. Layout is preserved byte-for-byte outside the
// renamed identifiers, so the result reparses cleanly.
std::pair<syntax::SourceFunction, RenameMap> obfuscate_identifiers(
    const syntax::SourceFunction& fn,
    const morph::MorphemeRegistry& registry);

// Applies a rename map to a function body (used to invert an obfuscation).
std::string apply_rename(const syntax::SourceFunction& fn,
                         const RenameMap& map);

// Seeded Fisher-Yates permutation of the body's lines (resp. tokens).
// The multiset of lines/tokens is preserved exactly.
std::string shuffle_lines(const syntax::SourceFunction& fn, uint64_t seed);
std::string shuffle_tokens(const syntax::SourceFunction& fn, uint64_t seed);

// Removes exactly the keyword-tagged tokens; everything else survives in
// order, single-space joined: "if (a) return b;" -> "( a ) b ;".
std::string delete_keywords(const syntax::SourceFunction& fn);

// Blanks exactly the nine structural symbols ( ) [ ] { } , . ; in place,
// one space per symbol; operators and everything else survive.
std::string delete_symbols(const syntax::SourceFunction& fn);

// DAE corruption over one token stream. is_bow_region flags the tokens that
// sit inside name bags: those use the bow_* ratios. Three seeded passes:
//   1. mask: each token independently becomes <mask>
//   2. dropout: each unmasked token is independently removed (masked tokens
//      are exempt so the two rates stay independently measurable)
//   3. permutation: adjacent statement segments swap with permute_ratio;
//      a bag shuffles internally with bow_permute_ratio
// Statements break after ; { } tokens, or after : when the stream has no ;
// at all (the pythonic case). All ratios zero is the identity.
std::vector<std::string> corrupt_dae(const std::vector<std::string>& tokens,
                                     const std::vector<bool>& is_bow_region,
                                     const NoiseSpec& spec);

// Extra probe: shuffles tokens within consecutive fixed-size windows.
std::vector<std::string> window_shuffle(std::vector<std::string> tokens,
                                        size_t window, uint64_t seed);

}  // namespace distilc::noise
