#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace distilc::eval {

struct EmptyReference : std::runtime_error {
  EmptyReference() : std::runtime_error("reference has no tokens") {}
};

// Corpus BLEU with uniform n-gram weights and brevity penalty, on a 0-100
// scale. Clipped n-gram counts pool across added pairs before the ratios
// are taken, so the corpus score is not the mean of per-pair scores.
// Orders with no hypothesis n-grams anywhere are skipped (effective
// order), which keeps identity pairs shorter than max_n at 100; an order
// that is present but unmatched scores 0.
class BleuAccumulator {
 public:
  explicit BleuAccumulator(size_t max_n = 4);

  // Throws EmptyReference when the reference is empty. An empty
  // hypothesis is a valid (zero-scoring) entry.
  void add(const std::vector<std::string>& hypothesis,
           const std::vector<std::string>& reference);

  double score() const;
  size_t pairs() const { return pairs_; }

 private:
  size_t max_n_;
  size_t pairs_ = 0;
  size_t hyp_len_ = 0;
  size_t ref_len_ = 0;
  std::vector<size_t> matched_;
  std::vector<size_t> total_;
};

// Single-pair convenience wrapper over BleuAccumulator.
double bleu(const std::vector<std::string>& hypothesis,
            const std::vector<std::string>& reference, size_t max_n = 4);

struct NoRelevantCandidate : std::runtime_error {
  explicit NoRelevantCandidate(size_t query)
      : std::runtime_error("query " + std::to_string(query) +
                           " has no relevant candidate") {}
};

struct RetrievalMetrics {
  double precision_at_k = 0.0;  // fraction of queries with a relevant
                                // candidate in the top k
  double mean_average_precision = 0.0;
  double mean_reciprocal_rank = 0.0;
};

// Ranks candidates per query by descending similarity, ties broken by
// candidate index, and averages the standard definitions over queries.
// k larger than the candidate count clamps. Throws std::invalid_argument
// on shape mismatch and NoRelevantCandidate when a query has none.
RetrievalMetrics retrieval_metrics(
    const std::vector<std::vector<double>>& similarity,
    const std::vector<std::vector<bool>>& relevance, size_t k = 10);

}  // namespace distilc::eval
