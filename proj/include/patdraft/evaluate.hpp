#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "patdraft/embedding.hpp"
#include "patdraft/metrics.hpp"
#include "patdraft/textstats.hpp"

namespace patdraft {

struct EvalConfig {
  size_t rr_window = 1000;
  size_t embed_chunk = 512;
  size_t embed_overlap = 128;
  Tokenizer tokenizer;
  /// Optional; embed_f1 is reported only when set.
  EmbeddingClient* embedder = nullptr;
};

struct EvalReport {
  double rouge_l_f1 = 0.0;
  std::optional<double> embed_f1;
  double token_ratio = 0.0;
  double repetition_rate = 0.0;
  size_t lcs_words = 0;
  double fourgram_overlap = 0.0;
};

inline EvalReport evaluate_pair(const std::string& candidate, const std::string& reference,
                                const EvalConfig& cfg = {}) {
  EvalReport report;
  auto cand = cfg.tokenizer.tokenize(candidate);
  auto ref = cfg.tokenizer.tokenize(reference);
  report.rouge_l_f1 = rouge_l_f1(cand, ref);
  report.token_ratio = token_ratio(cand, ref);
  report.repetition_rate = repetition_rate(cand, cfg.rr_window);
  report.lcs_words = longest_common_substring_words(cand, ref).length;
  report.fourgram_overlap = fourgram_overlap(cand, ref);
  if (cfg.embedder != nullptr)
    report.embed_f1 =
        chunked_embedding_score(cand, ref, *cfg.embedder, cfg.embed_chunk, cfg.embed_overlap).f1;
  return report;
}

struct PairEval {
  std::string patent_id;
  std::string paper_id;
  std::string domain;
  EvalReport report;
};

struct MetricStats {
  double mean = 0.0;
  double stddev = 0.0;  // population standard deviation
  size_t n = 0;
};

struct AggregateReport {
  std::map<std::string, MetricStats> metrics;
  std::map<std::string, std::map<std::string, MetricStats>> by_domain;
};

namespace evaluate_detail {

inline MetricStats stats_of(const std::vector<double>& values) {
  MetricStats s;
  s.n = values.size();
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - s.mean) * (v - s.mean);
  s.stddev = std::sqrt(var / static_cast<double>(values.size()));
  return s;
}

inline std::map<std::string, MetricStats> aggregate_group(const std::vector<const PairEval*>& group) {
  std::map<std::string, std::vector<double>> columns;
  for (const PairEval* pair : group) {
    const EvalReport& r = pair->report;
    columns["rouge_l_f1"].push_back(r.rouge_l_f1);
    columns["token_ratio"].push_back(r.token_ratio);
    columns["repetition_rate"].push_back(r.repetition_rate);
    columns["lcs_words"].push_back(static_cast<double>(r.lcs_words));
    columns["fourgram_overlap"].push_back(r.fourgram_overlap);
    if (r.embed_f1) columns["embed_f1"].push_back(*r.embed_f1);
  }
  std::map<std::string, MetricStats> out;
  for (const auto& [name, values] : columns) out[name] = stats_of(values);
  return out;
}

}  // namespace evaluate_detail

/// Mean and population standard deviation per metric, overall and per
/// domain label where labels are present in the pair metadata.
inline AggregateReport aggregate(const std::vector<PairEval>& pairs) {
  AggregateReport report;
  std::vector<const PairEval*> all;
  std::map<std::string, std::vector<const PairEval*>> domains;
  for (const auto& pair : pairs) {
    all.push_back(&pair);
    if (!pair.domain.empty()) domains[pair.domain].push_back(&pair);
  }
  report.metrics = evaluate_detail::aggregate_group(all);
  for (const auto& [domain, group] : domains)
    report.by_domain[domain] = evaluate_detail::aggregate_group(group);
  return report;
}

inline nlohmann::json to_json(const EvalReport& r) {
  nlohmann::json j;
  j["rouge_l_f1"] = r.rouge_l_f1;
  if (r.embed_f1) j["embed_f1"] = *r.embed_f1;
  j["token_ratio"] = r.token_ratio;
  j["repetition_rate"] = r.repetition_rate;
  j["lcs_words"] = r.lcs_words;
  j["fourgram_overlap"] = r.fourgram_overlap;
  return j;
}

inline nlohmann::json to_json(const PairEval& p) {
  nlohmann::json j;
  j["patent_id"] = p.patent_id;
  j["paper_id"] = p.paper_id;
  if (!p.domain.empty()) j["domain"] = p.domain;
  j["metrics"] = to_json(p.report);
  return j;
}

inline nlohmann::json to_json(const MetricStats& s) {
  return {{"mean", s.mean}, {"stddev", s.stddev}, {"n", s.n}};
}

inline nlohmann::json to_json(const AggregateReport& r) {
  nlohmann::json metrics;
  for (const auto& [name, stats] : r.metrics) metrics[name] = to_json(stats);
  nlohmann::json domains;
  for (const auto& [domain, table] : r.by_domain) {
    nlohmann::json entry;
    for (const auto& [name, stats] : table) entry[name] = to_json(stats);
    domains[domain] = std::move(entry);
  }
  nlohmann::json j;
  j["aggregate"] = true;
  j["metrics"] = std::move(metrics);
  if (!r.by_domain.empty()) j["by_domain"] = std::move(domains);
  return j;
}

}  // namespace patdraft
