#include "metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace distilc::eval {

BleuAccumulator::BleuAccumulator(size_t max_n) : max_n_(max_n) {
  if (max_n_ == 0) throw std::invalid_argument("max_n must be at least 1");
  matched_.resize(max_n_, 0);
  total_.resize(max_n_, 0);
}

void BleuAccumulator::add(const std::vector<std::string>& hypothesis,
                          const std::vector<std::string>& reference) {
  if (reference.empty()) throw EmptyReference();
  ++pairs_;
  hyp_len_ += hypothesis.size();
  ref_len_ += reference.size();
  for (size_t n = 1; n <= max_n_; ++n) {
    if (hypothesis.size() < n) break;
    std::map<std::vector<std::string>, size_t> ref_grams;
    if (reference.size() >= n)
      for (size_t i = 0; i + n <= reference.size(); ++i)
        ++ref_grams[{reference.begin() + i, reference.begin() + i + n}];
    std::map<std::vector<std::string>, size_t> hyp_grams;
    for (size_t i = 0; i + n <= hypothesis.size(); ++i)
      ++hyp_grams[{hypothesis.begin() + i, hypothesis.begin() + i + n}];
    for (const auto& [gram, count] : hyp_grams) {
      total_[n - 1] += count;
      auto it = ref_grams.find(gram);
      if (it != ref_grams.end()) matched_[n - 1] += std::min(count, it->second);
    }
  }
}

double BleuAccumulator::score() const {
  if (hyp_len_ == 0) return 0.0;
  double log_sum = 0.0;
  size_t orders = 0;
  for (size_t n = 0; n < max_n_; ++n) {
    if (total_[n] == 0) continue;
    if (matched_[n] == 0) return 0.0;
    log_sum += std::log(static_cast<double>(matched_[n]) /
                        static_cast<double>(total_[n]));
    ++orders;
  }
  if (orders == 0) return 0.0;
  double brevity =
      hyp_len_ >= ref_len_
          ? 1.0
          : std::exp(1.0 - static_cast<double>(ref_len_) /
                               static_cast<double>(hyp_len_));
  return 100.0 * brevity * std::exp(log_sum / static_cast<double>(orders));
}

double bleu(const std::vector<std::string>& hypothesis,
            const std::vector<std::string>& reference, size_t max_n) {
  BleuAccumulator acc(max_n);
  acc.add(hypothesis, reference);
  return acc.score();
}

RetrievalMetrics retrieval_metrics(
    const std::vector<std::vector<double>>& similarity,
    const std::vector<std::vector<bool>>& relevance, size_t k) {
  if (similarity.size() != relevance.size())
    throw std::invalid_argument("similarity and relevance row counts differ");
  if (similarity.empty()) throw std::invalid_argument("no queries");
  if (k == 0) throw std::invalid_argument("k must be at least 1");

  double hits = 0.0, ap_sum = 0.0, rr_sum = 0.0;
  for (size_t q = 0; q < similarity.size(); ++q) {
    const auto& scores = similarity[q];
    const auto& rel = relevance[q];
    if (scores.size() != rel.size())
      throw std::invalid_argument("row " + std::to_string(q) +
                                  " has mismatched candidate counts");
    size_t relevant_total =
        static_cast<size_t>(std::count(rel.begin(), rel.end(), true));
    if (relevant_total == 0) throw NoRelevantCandidate(q);

    std::vector<size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
      return scores[a] > scores[b];
    });

    size_t top = std::min(k, order.size());
    bool hit = false;
    size_t found = 0;
    double ap = 0.0;
    double rr = 0.0;
    for (size_t rank = 1; rank <= order.size(); ++rank) {
      if (!rel[order[rank - 1]]) continue;
      if (rank <= top) hit = true;
      if (rr == 0.0) rr = 1.0 / static_cast<double>(rank);
      ++found;
      ap += static_cast<double>(found) / static_cast<double>(rank);
    }
    hits += hit ? 1.0 : 0.0;
    ap_sum += ap / static_cast<double>(relevant_total);
    rr_sum += rr;
  }

  double queries = static_cast<double>(similarity.size());
  return {hits / queries, ap_sum / queries, rr_sum / queries};
}

}  // namespace distilc::eval
