#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "patdraft/date.hpp"
#include "patdraft/errors.hpp"
#include "patdraft/records.hpp"
#include "patdraft/textstats.hpp"

namespace patdraft {

/// Inverse document frequency model over term sets. idf(t) = ln(N / df(t));
/// unseen terms fall back to df = 1.
struct IdfModel {
  size_t doc_count = 0;
  std::unordered_map<std::string, size_t> doc_freq;

  double idf(const std::string& term) const {
    auto it = doc_freq.find(term);
    size_t df = it == doc_freq.end() ? 1 : it->second;
    return std::log(static_cast<double>(doc_count) / static_cast<double>(df));
  }
};

/// Filter thresholds and the date window around the application date.
struct Thresholds {
  double author_min = 0.8;
  double term_min_norm = 0.15;
  double term_max_norm = 0.1;
  double margin_min = 0.15;
  double margin_max = 0.1;
  int grace_before_years = 1;
  int window_after_years = 2;
};

struct MatchScores {
  double sim_author = 0.0;
  double title_min = 0.0;
  double title_max = 0.0;
  double abs_min = 0.0;
  double abs_max = 0.0;
  bool date_ok = false;
};

enum class TermAgg { Min, Max };

/// Term set of a text: lowercased, punctuation and stopwords removed,
/// Porter-stemmed, deduplicated.
inline std::unordered_set<std::string> extract_terms(std::string_view text) {
  auto stream = analyze_terms(text);
  return std::unordered_set<std::string>(stream.begin(), stream.end());
}

/// Builds an IdfModel where each input set is one document. Throws
/// EmptyCorpus on an empty corpus.
inline IdfModel compute_idf(const std::vector<std::unordered_set<std::string>>& documents) {
  if (documents.empty()) throw EmptyCorpus("idf corpus is empty");
  IdfModel model;
  model.doc_count = documents.size();
  for (const auto& doc : documents)
    for (const auto& term : doc) ++model.doc_freq[term];
  return model;
}

/// Fraction of inventors that appear in the author list. A name matches iff
/// it equals one of an author's aliases exactly. Asymmetric on purpose:
/// papers routinely list more authors than the patent lists inventors.
inline double author_overlap(const std::vector<std::string>& inventors,
                             const std::vector<PersonRef>& authors) {
  if (inventors.empty()) return 0.0;
  std::unordered_set<std::string> alias_pool;
  for (const auto& author : authors) {
    alias_pool.insert(author.name);
    for (const auto& alias : author.aliases) alias_pool.insert(alias);
  }
  size_t matched = 0;
  for (const auto& inventor : inventors)
    if (alias_pool.count(inventor)) ++matched;
  return static_cast<double>(matched) / static_cast<double>(inventors.size());
}

/// IDF-weighted term overlap of two texts:
///   sum of idf over shared terms / agg(sum over terms of s1, sum over s2)
/// with agg in {min, max}; 0 when the denominator is 0.
inline double term_similarity(std::string_view s1, std::string_view s2,
                              const IdfModel& model, TermAgg agg) {
  auto t1 = extract_terms(s1);
  auto t2 = extract_terms(s2);
  double sum1 = 0.0, sum2 = 0.0, shared = 0.0;
  for (const auto& term : t1) {
    double w = model.idf(term);
    sum1 += w;
    if (t2.count(term)) shared += w;
  }
  for (const auto& term : t2) sum2 += model.idf(term);
  double denom = agg == TermAgg::Min ? std::min(sum1, sum2) : std::max(sum1, sum2);
  if (denom <= 0.0) return 0.0;
  return shared / denom;
}

/// True iff the paper date lies in
/// [application date - grace, application date + window], inclusive.
inline bool within_date_range(const Date& patent_date, const Date& paper_date,
                              const Thresholds& t = {}) {
  Date lo = add_years(patent_date, -t.grace_before_years);
  Date hi = add_years(patent_date, t.window_after_years);
  return paper_date >= lo && paper_date <= hi;
}

inline bool passes_overlap_filters(const MatchScores& s, const Thresholds& t = {}) {
  return s.sim_author >= t.author_min && s.date_ok &&
         s.title_min >= t.term_min_norm && s.abs_min >= t.term_min_norm &&
         s.title_max >= t.term_max_norm && s.abs_max >= t.term_max_norm;
}

namespace matcher_detail {

/// True iff `a` beats `b` on at least 3 of the 4 term metrics by the
/// stated margins. Deltas exactly equal to the margin do not count.
inline bool dominates(const MatchScores& a, const MatchScores& b, const Thresholds& t) {
  int wins = 0;
  if (a.title_min - b.title_min > t.margin_min) ++wins;
  if (a.abs_min - b.abs_min > t.margin_min) ++wins;
  if (a.title_max - b.title_max > t.margin_max) ++wins;
  if (a.abs_max - b.abs_max > t.margin_max) ++wins;
  return wins >= 3;
}

}  // namespace matcher_detail

/// Disambiguates a group of candidate pairs that share a patent or a paper.
/// A member survives iff it dominates every other member; singleton groups
/// survive unconditionally. Returns one flag per group member.
inline std::vector<bool> resolve_distinctiveness(const std::vector<MatchScores>& group,
                                                 const Thresholds& t = {}) {
  std::vector<bool> survives(group.size(), true);
  for (size_t i = 0; i < group.size(); ++i)
    for (size_t j = 0; j < group.size() && survives[i]; ++j)
      if (j != i && !matcher_detail::dominates(group[i], group[j], t)) survives[i] = false;
  return survives;
}

/// Licenses that allow redistribution and commercial use.
inline bool filter_license(License license) {
  return license == License::CcBy || license == License::Cc0 ||
         license == License::PublicDomain;
}

inline bool filter_license(const PaperRecord& paper) { return filter_license(paper.license); }

struct CandidateRecord {
  std::string patent_id;
  PaperRecord paper;
};

struct MatchedPair {
  std::string patent_id;
  std::string paper_id;
  MatchScores scores;
};

/// Surviving candidates after each stage. The first stage is the input
/// itself: author and date filtering already happened upstream during
/// harvesting, although both are re-checked as part of the overlap filter.
struct StageCounts {
  size_t authors_date = 0;
  size_t term_overlap = 0;
  size_t distinctiveness = 0;
  size_t license = 0;
};

struct MatchConfig {
  /// One IDF model over titles and abstracts jointly; set to false for
  /// separate title/abstract models.
  bool joint_idf = true;
  Thresholds thresholds;
};

struct MatchResult {
  std::vector<MatchedPair> pairs;
  StageCounts counts;
};

inline nlohmann::json to_json(const MatchScores& s) {
  return {{"sim_author", s.sim_author}, {"title_min", s.title_min},
          {"title_max", s.title_max},   {"abs_min", s.abs_min},
          {"abs_max", s.abs_max},       {"date_ok", s.date_ok}};
}

inline nlohmann::json to_json(const StageCounts& c) {
  return {{"authors_date", c.authors_date},
          {"term_overlap", c.term_overlap},
          {"distinctiveness", c.distinctiveness},
          {"license", c.license}};
}

/// Runs term overlap, distinctiveness and license filtering over candidate
/// (patent, paper) pairs. IDF weights are computed over the titles and
/// abstracts of all candidate patents and papers (deduplicated by id).
inline MatchResult match_pipeline(const std::vector<PatentRecord>& patents,
                                  const std::vector<CandidateRecord>& candidates,
                                  const MatchConfig& config = {}) {
  const Thresholds& t = config.thresholds;
  MatchResult result;
  result.counts.authors_date = candidates.size();
  if (candidates.empty()) return result;

  std::unordered_map<std::string, const PatentRecord*> patent_by_id;
  for (const auto& p : patents) patent_by_id[p.patent_id] = &p;

  // IDF corpus: one document per title and per abstract.
  std::vector<std::unordered_set<std::string>> title_docs, abstract_docs;
  std::unordered_set<std::string> seen_patents, seen_papers;
  for (const auto& c : candidates) {
    auto pit = patent_by_id.find(c.patent_id);
    if (pit != patent_by_id.end() && seen_patents.insert(c.patent_id).second) {
      title_docs.push_back(extract_terms(pit->second->title));
      abstract_docs.push_back(extract_terms(pit->second->abstract));
    }
    if (seen_papers.insert(c.paper.paper_id).second) {
      title_docs.push_back(extract_terms(c.paper.title));
      abstract_docs.push_back(extract_terms(c.paper.abstract));
    }
  }

  IdfModel joint, title_model, abstract_model;
  if (config.joint_idf) {
    std::vector<std::unordered_set<std::string>> all = title_docs;
    all.insert(all.end(), abstract_docs.begin(), abstract_docs.end());
    joint = compute_idf(all);
  } else {
    title_model = compute_idf(title_docs);
    abstract_model = compute_idf(abstract_docs);
  }
  const IdfModel& for_titles = config.joint_idf ? joint : title_model;
  const IdfModel& for_abstracts = config.joint_idf ? joint : abstract_model;

  // Score every candidate with a known patent.
  struct Scored {
    const CandidateRecord* candidate;
    MatchScores scores;
  };
  std::vector<Scored> scored;
  for (const auto& c : candidates) {
    auto pit = patent_by_id.find(c.patent_id);
    if (pit == patent_by_id.end()) continue;
    const PatentRecord& patent = *pit->second;
    MatchScores s;
    s.sim_author = author_overlap(patent.inventors, c.paper.authors);
    s.title_min = term_similarity(patent.title, c.paper.title, for_titles, TermAgg::Min);
    s.title_max = term_similarity(patent.title, c.paper.title, for_titles, TermAgg::Max);
    s.abs_min = term_similarity(patent.abstract, c.paper.abstract, for_abstracts, TermAgg::Min);
    s.abs_max = term_similarity(patent.abstract, c.paper.abstract, for_abstracts, TermAgg::Max);
    s.date_ok = within_date_range(patent.application_date, c.paper.publication_date, t);
    if (passes_overlap_filters(s, t)) scored.push_back({&c, s});
  }
  result.counts.term_overlap = scored.size();

  // Distinctiveness: a pair must win its patent group and its paper group.
  auto resolve_groups = [&](auto key_of) {
    std::unordered_map<std::string, std::vector<size_t>> groups;
    for (size_t i = 0; i < scored.size(); ++i) groups[key_of(*scored[i].candidate)].push_back(i);
    std::vector<bool> keep(scored.size(), true);
    for (const auto& [key, members] : groups) {
      (void)key;
      std::vector<MatchScores> group_scores;
      group_scores.reserve(members.size());
      for (size_t idx : members) group_scores.push_back(scored[idx].scores);
      auto survives = resolve_distinctiveness(group_scores, t);
      for (size_t k = 0; k < members.size(); ++k)
        if (!survives[k]) keep[members[k]] = false;
    }
    return keep;
  };
  auto keep_patent = resolve_groups([](const CandidateRecord& c) { return c.patent_id; });
  auto keep_paper = resolve_groups([](const CandidateRecord& c) { return c.paper.paper_id; });

  std::vector<Scored> distinct;
  for (size_t i = 0; i < scored.size(); ++i)
    if (keep_patent[i] && keep_paper[i]) distinct.push_back(scored[i]);
  result.counts.distinctiveness = distinct.size();

  for (const auto& s : distinct) {
    if (!filter_license(s.candidate->paper)) continue;
    result.pairs.push_back({s.candidate->patent_id, s.candidate->paper.paper_id, s.scores});
  }
  result.counts.license = result.pairs.size();
  return result;
}

}  // namespace patdraft
