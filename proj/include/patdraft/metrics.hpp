#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "patdraft/errors.hpp"
#include "patdraft/textstats.hpp"

namespace patdraft {

/// Token-level longest common subsequence length (two-row DP).
inline size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  if (a.empty() || b.empty()) return 0;
  const auto& shorter = a.size() <= b.size() ? a : b;
  const auto& longer = a.size() <= b.size() ? b : a;
  std::vector<uint32_t> prev(shorter.size() + 1, 0), cur(shorter.size() + 1, 0);
  for (size_t i = 1; i <= longer.size(); ++i) {
    for (size_t j = 1; j <= shorter.size(); ++j) {
      if (longer[i - 1] == shorter[j - 1])
        cur[j] = prev[j - 1] + 1;
      else
        cur[j] = std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[shorter.size()];
}

/// ROUGE-L F1: P = LCS/|candidate|, R = LCS/|reference|, harmonic mean.
/// 0 when either side is empty.
inline double rouge_l_f1(const std::vector<std::string>& candidate,
                         const std::vector<std::string>& reference) {
  if (candidate.empty() || reference.empty()) return 0.0;
  double lcs = static_cast<double>(lcs_length(candidate, reference));
  if (lcs == 0.0) return 0.0;
  double p = lcs / static_cast<double>(candidate.size());
  double r = lcs / static_cast<double>(reference.size());
  return 2.0 * p * r / (p + r);
}

inline double rouge_l_f1(const std::string& candidate, const std::string& reference,
                         const Tokenizer& tokenizer = {}) {
  return rouge_l_f1(tokenizer.tokenize(candidate), tokenizer.tokenize(reference));
}

/// Repetition rate: over consecutive windows of window_size tokens (a
/// shorter text or tail forms its own window), accumulate for n = 1..4 the
/// n-gram type counts V(n) and the singleton type counts V(1,n); with
/// r_n = 1 - sum V(1,n) / sum V(n), RR = 100 * (r_1 r_2 r_3 r_4)^(1/4).
/// Throws TooShort for texts under 4 tokens.
inline double repetition_rate(const std::vector<std::string>& tokens,
                              size_t window_size = 1000) {
  if (window_size < 4) throw ConfigError("repetition-rate window must be at least 4 tokens");
  if (tokens.size() < 4) throw TooShort("repetition rate needs at least 4 tokens");

  double product = 1.0;
  for (size_t n = 1; n <= 4; ++n) {
    size_t types = 0, singletons = 0;
    for (size_t start = 0; start < tokens.size(); start += window_size) {
      size_t end = std::min(tokens.size(), start + window_size);
      std::vector<std::string> window(tokens.begin() + static_cast<long>(start),
                                      tokens.begin() + static_cast<long>(end));
      for (const auto& [gram, count] : ngram_counts(window, n)) {
        (void)gram;
        ++types;
        if (count == 1) ++singletons;
      }
    }
    double r_n = types == 0 ? 0.0
                            : 1.0 - static_cast<double>(singletons) / static_cast<double>(types);
    product *= r_n;
  }
  return 100.0 * std::pow(product, 0.25);
}

inline double repetition_rate(const std::string& text, size_t window_size = 1000,
                              const Tokenizer& tokenizer = {}) {
  return repetition_rate(tokenizer.tokenize(text), window_size);
}

/// Generated-token count as a percentage of the reference token count.
inline double token_ratio(const std::vector<std::string>& candidate,
                          const std::vector<std::string>& reference) {
  if (reference.empty()) return 0.0;
  return 100.0 * static_cast<double>(candidate.size()) / static_cast<double>(reference.size());
}

inline double token_ratio(const std::string& candidate, const std::string& reference,
                          const Tokenizer& tokenizer = {}) {
  return token_ratio(tokenizer.tokenize(candidate), tokenizer.tokenize(reference));
}

/// Jaccard similarity of the distinct 4-gram sets of the two texts. 0 when
/// neither text has a 4-gram.
inline double fourgram_overlap(const std::vector<std::string>& a,
                               const std::vector<std::string>& b) {
  std::unordered_set<std::string> set_a, set_b;
  for (const auto& [gram, count] : ngram_counts(a, 4)) {
    (void)count;
    set_a.insert(gram);
  }
  for (const auto& [gram, count] : ngram_counts(b, 4)) {
    (void)count;
    set_b.insert(gram);
  }
  size_t shared = 0;
  for (const auto& gram : set_a)
    if (set_b.count(gram)) ++shared;
  size_t unioned = set_a.size() + set_b.size() - shared;
  if (unioned == 0) return 0.0;
  return static_cast<double>(shared) / static_cast<double>(unioned);
}

inline double fourgram_overlap(const std::string& a, const std::string& b,
                               const Tokenizer& tokenizer = {}) {
  return fourgram_overlap(tokenizer.tokenize(a), tokenizer.tokenize(b));
}

}  // namespace patdraft
