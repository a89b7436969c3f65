#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <unordered_map>
#include <vector>

#include "patdraft/errors.hpp"
#include "patdraft/textstats.hpp"

namespace patdraft {

struct Bm25Params {
  double k1 = 1.2;
  double b = 0.75;
  /// Floor applied to negative IDF values, as a fraction of the mean IDF.
  double epsilon = 0.25;
};

/// Okapi BM25 over a fixed paragraph corpus. Terms go through the same
/// normalization chain as the matcher (analyze_terms). idf(t) =
/// ln((N - df + 0.5) / (df + 0.5)); negative values are replaced by
/// epsilon * mean(idf).
class Bm25Index {
public:
  static Bm25Index build(const std::vector<std::string>& paragraphs,
                         const Bm25Params& params = {}) {
    if (paragraphs.empty()) throw EmptyCorpus("bm25 corpus is empty");
    Bm25Index index;
    index.params_ = params;
    std::unordered_map<std::string, size_t> df;
    size_t total_len = 0;
    for (const auto& paragraph : paragraphs) {
      auto terms = analyze_terms(paragraph);
      total_len += terms.size();
      std::unordered_map<std::string, int> freqs;
      for (const auto& term : terms) ++freqs[term];
      for (const auto& [term, unused] : freqs) {
        (void)unused;
        ++df[term];
      }
      index.lengths_.push_back(terms.size());
      index.term_freqs_.push_back(std::move(freqs));
    }
    index.avgdl_ = static_cast<double>(total_len) / static_cast<double>(paragraphs.size());

    double n = static_cast<double>(paragraphs.size());
    double idf_sum = 0.0;
    std::vector<std::string> negative;
    for (const auto& [term, freq] : df) {
      double idf = std::log((n - static_cast<double>(freq) + 0.5) /
                            (static_cast<double>(freq) + 0.5));
      index.idf_[term] = idf;
      idf_sum += idf;
      if (idf < 0.0) negative.push_back(term);
    }
    double mean_idf = idf_sum / static_cast<double>(index.idf_.size());
    for (const auto& term : negative) index.idf_[term] = params.epsilon * mean_idf;
    return index;
  }

  size_t size() const { return term_freqs_.size(); }
  double avg_length() const { return avgdl_; }
  const Bm25Params& params() const { return params_; }

  /// One score per paragraph; query tokens contribute per occurrence.
  std::vector<double> scores(const std::string& query) const {
    std::vector<double> out(term_freqs_.size(), 0.0);
    auto query_terms = analyze_terms(query);
    for (const auto& term : query_terms) {
      auto idf_it = idf_.find(term);
      if (idf_it == idf_.end()) continue;
      for (size_t d = 0; d < term_freqs_.size(); ++d) {
        auto tf_it = term_freqs_[d].find(term);
        if (tf_it == term_freqs_[d].end()) continue;
        double tf = tf_it->second;
        double norm = params_.k1 * (1.0 - params_.b +
                                    params_.b * static_cast<double>(lengths_[d]) / avgdl_);
        out[d] += idf_it->second * tf * (params_.k1 + 1.0) / (tf + norm);
      }
    }
    return out;
  }

  /// Descending by score; ties keep original paragraph order.
  std::vector<std::pair<size_t, double>> rank(const std::string& query) const {
    auto s = scores(query);
    std::vector<std::pair<size_t, double>> ranked(s.size());
    for (size_t i = 0; i < s.size(); ++i) ranked[i] = {i, s[i]};
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    return ranked;
  }

private:
  Bm25Params params_;
  std::vector<std::unordered_map<std::string, int>> term_freqs_;
  std::vector<size_t> lengths_;
  double avgdl_ = 0.0;
  std::unordered_map<std::string, double> idf_;
};

/// Convenience wrappers matching the free-function call sites.
inline Bm25Index bm25_index(const std::vector<std::string>& paragraphs,
                            const Bm25Params& params = {}) {
  return Bm25Index::build(paragraphs, params);
}

inline std::vector<std::pair<size_t, double>> bm25_rank(const Bm25Index& index,
                                                        const std::string& query) {
  return index.rank(query);
}

}  // namespace patdraft
