#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "patdraft/errors.hpp"
#include "patdraft/evaluate.hpp"
#include "patdraft/generation.hpp"
#include "patdraft/harvest.hpp"
#include "patdraft/manifest.hpp"
#include "patdraft/matcher.hpp"
#include "patdraft/outline.hpp"
#include "patdraft/records.hpp"
#include "patdraft/sft.hpp"
#include "patdraft/split.hpp"

namespace patdraft {

/// Runs fn(i) for i in [0, n) on up to `workers` threads. Exceptions are
/// collected and the first one rethrown after all workers join.
template <typename Fn>
inline void parallel_for(size_t n, size_t workers, Fn&& fn) {
  if (n == 0) return;
  workers = std::max<size_t>(1, std::min(workers, n));
  if (workers == 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  std::vector<std::thread> threads;
  for (size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&] {
      for (;;) {
        size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

struct PairRecord {
  std::string patent_id;
  std::string paper_id;
  std::string domain;
};

inline std::vector<PairRecord> read_pairs_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open pairs file: " + path);
  std::vector<PairRecord> pairs;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.contains("patent_id") || !j.contains("paper_id"))
      throw SchemaError(path + ":" + std::to_string(line_no) + ": invalid pair record");
    PairRecord pair;
    pair.patent_id = j["patent_id"].get<std::string>();
    pair.paper_id = j["paper_id"].get<std::string>();
    if (j.contains("domain")) pair.domain = j["domain"].get<std::string>();
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

inline std::vector<PaperRecord> read_papers_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open papers file: " + path);
  std::vector<PaperRecord> papers;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded())
      throw SchemaError(path + ":" + std::to_string(line_no) + ": not valid JSON");
    papers.push_back(paper_from_json(j));
  }
  return papers;
}

inline std::string outline_basename(const std::string& patent_id, const std::string& label) {
  return patent_id + "." + label;
}

/// Strips metadata sections from every patent body in place. Outlining,
/// generation, training-data export and evaluation all run on the cleaned
/// bodies so outline paths stay aligned with the trees they were built
/// from.
inline void clean_patent_bodies(std::vector<PatentRecord>& patents,
                                const std::vector<std::string>& blacklist) {
  for (auto& patent : patents)
    patent.body = filter_metadata_sections(patent.body, blacklist);
}

/// Shared settings for the generation-side commands.
struct GeneratePipelineOptions {
  std::string pairs_path;
  std::string patents_path;
  std::string papers_path;
  std::string outlines_dir;
  std::string out_dir;
  std::string granularity = "long";
  RetrieverKind retriever = RetrieverKind::Bm25;
  GenerationConfig config;
  PromptTemplates templates = PromptTemplates::defaults();
  Tokenizer tokenizer;
  std::vector<std::string> metadata_blacklist = default_metadata_blacklist();
  size_t workers = 1;
  uint64_t seed = 0;
  std::string config_hash;
};

struct GeneratePipelineResult {
  size_t drafts_written = 0;
  std::vector<std::string> diagnostics;
};

/// Drafts every pair in the pairs file: loads the outline for the patent,
/// retrieves paper context and generates chunk by chunk. Writes one
/// Markdown draft plus one provenance record per pair and a run manifest.
inline GeneratePipelineResult run_generate_pipeline(const GeneratePipelineOptions& options,
                                                    LanguageModelClient& llm) {
  RunManifest manifest;
  manifest.command = "generate";
  manifest.started_at = now_iso8601();
  manifest.config_hash = options.config_hash;
  manifest.tokenizer = options.tokenizer.name();
  manifest.models["llm"] = options.config.model;
  manifest.seed = options.seed;
  manifest.add_input("pairs", options.pairs_path);
  manifest.add_input("patents", options.patents_path);
  manifest.add_input("papers", options.papers_path);

  auto pairs = read_pairs_file(options.pairs_path);
  auto patents = ingest_patent_metadata(options.patents_path);
  clean_patent_bodies(patents.records, options.metadata_blacklist);
  auto papers = read_papers_file(options.papers_path);

  std::map<std::string, const PatentRecord*> patent_by_id;
  for (const auto& p : patents.records) patent_by_id[p.patent_id] = &p;
  std::map<std::string, const PaperRecord*> paper_by_id;
  for (const auto& p : papers) paper_by_id[p.paper_id] = &p;

  std::filesystem::create_directories(options.out_dir + "/drafts");

  GeneratePipelineResult result;
  result.diagnostics = patents.diagnostics;
  std::mutex result_mutex;

  parallel_for(pairs.size(), options.workers, [&](size_t i) {
    const PairRecord& pair = pairs[i];
    auto patent_it = patent_by_id.find(pair.patent_id);
    auto paper_it = paper_by_id.find(pair.paper_id);
    if (patent_it == patent_by_id.end() || paper_it == paper_by_id.end()) {
      std::lock_guard<std::mutex> lock(result_mutex);
      result.diagnostics.push_back("pair " + pair.patent_id + ":" + pair.paper_id +
                                   " references unknown records; skipped");
      return;
    }
    std::string base = options.outlines_dir + "/" +
                       outline_basename(pair.patent_id, options.granularity);
    Outline outline = load_outline(base + ".md", base + ".lengths.json");
    PatentDraft draft =
        generate_patent(outline, *paper_it->second, llm, options.retriever, options.config,
                        options.templates, options.tokenizer, &patent_it->second->body);

    std::string draft_path = options.out_dir + "/drafts/" + pair.patent_id + ".md";
    std::ofstream out(draft_path);
    if (!out) throw IoError("cannot write draft: " + draft_path);
    out << draft.text;

    nlohmann::json prov = nlohmann::json::array();
    for (const auto& chunk : draft.chunks) {
      prov.push_back({{"chunk_index", chunk.chunk_index},
                      {"context_ids", chunk.context_ids},
                      {"prompt_tokens", chunk.prompt_tokens},
                      {"output_tokens", chunk.output_tokens},
                      {"context_truncated", chunk.context_truncated},
                      {"flags", chunk.flags}});
    }
    std::string prov_path = options.out_dir + "/drafts/" + pair.patent_id + ".provenance.json";
    std::ofstream prov_out(prov_path);
    if (!prov_out) throw IoError("cannot write provenance: " + prov_path);
    prov_out << prov.dump(2) << '\n';

    std::lock_guard<std::mutex> lock(result_mutex);
    ++result.drafts_written;
  });

  manifest.stats["pairs"] = pairs.size();
  manifest.stats["drafts_written"] = result.drafts_written;
  manifest.stats["retriever"] = to_string(options.retriever);
  manifest.stats["granularity"] = options.granularity;
  manifest.finished_at = now_iso8601();
  manifest.write(options.out_dir);
  return result;
}

struct EvaluatePipelineOptions {
  std::string pairs_path;
  std::string patents_path;
  std::string drafts_dir;
  std::string out_dir;
  EvalConfig eval;
  std::vector<std::string> metadata_blacklist = default_metadata_blacklist();
  size_t workers = 1;
  uint64_t seed = 0;
  std::string config_hash;
};

struct EvaluatePipelineResult {
  std::vector<PairEval> pair_evals;
  AggregateReport aggregate_report;
  std::vector<std::string> diagnostics;
  size_t pairs_total = 0;
};

/// Scores every drafted pair against the original patent (rendered with
/// the same Markdown layout drafts use) and writes eval.jsonl: one record
/// per pair followed by one aggregate record.
inline EvaluatePipelineResult run_evaluate_pipeline(const EvaluatePipelineOptions& options) {
  RunManifest manifest;
  manifest.command = "evaluate";
  manifest.started_at = now_iso8601();
  manifest.config_hash = options.config_hash;
  manifest.tokenizer = options.eval.tokenizer.name();
  manifest.seed = options.seed;
  manifest.add_input("pairs", options.pairs_path);
  manifest.add_input("patents", options.patents_path);

  auto pairs = read_pairs_file(options.pairs_path);
  auto patents = ingest_patent_metadata(options.patents_path);
  clean_patent_bodies(patents.records, options.metadata_blacklist);
  std::map<std::string, const PatentRecord*> patent_by_id;
  for (const auto& p : patents.records) patent_by_id[p.patent_id] = &p;

  EvaluatePipelineResult result;
  result.diagnostics = patents.diagnostics;
  result.pairs_total = pairs.size();
  result.pair_evals.resize(pairs.size());
  std::vector<bool> evaluated(pairs.size(), false);
  std::mutex diag_mutex;

  parallel_for(pairs.size(), options.workers, [&](size_t i) {
    const PairRecord& pair = pairs[i];
    auto patent_it = patent_by_id.find(pair.patent_id);
    std::string draft_path = options.drafts_dir + "/" + pair.patent_id + ".md";
    std::ifstream draft_in(draft_path);
    if (patent_it == patent_by_id.end() || !draft_in) {
      std::lock_guard<std::mutex> lock(diag_mutex);
      result.diagnostics.push_back("pair " + pair.patent_id + ":" + pair.paper_id +
                                   ": missing draft or patent record");
      return;
    }
    std::string draft((std::istreambuf_iterator<char>(draft_in)),
                      std::istreambuf_iterator<char>());
    std::string reference = render_document_markdown(patent_it->second->body);
    PairEval eval;
    eval.patent_id = pair.patent_id;
    eval.paper_id = pair.paper_id;
    eval.domain = !pair.domain.empty() ? pair.domain : patent_it->second->domain;
    try {
      eval.report = evaluate_pair(draft, reference, options.eval);
    } catch (const Error& e) {
      std::lock_guard<std::mutex> lock(diag_mutex);
      result.diagnostics.push_back("pair " + pair.patent_id + ": " + std::string(e.what()));
      return;
    }
    result.pair_evals[i] = std::move(eval);
    evaluated[i] = true;
  });

  // keep input order, drop pairs that could not be evaluated
  std::vector<PairEval> kept;
  for (size_t i = 0; i < result.pair_evals.size(); ++i)
    if (evaluated[i]) kept.push_back(std::move(result.pair_evals[i]));
  result.pair_evals = std::move(kept);
  result.aggregate_report = aggregate(result.pair_evals);

  std::filesystem::create_directories(options.out_dir);
  std::string eval_path = options.out_dir + "/eval.jsonl";
  std::ofstream out(eval_path);
  if (!out) throw IoError("cannot write evaluation report: " + eval_path);
  for (const auto& pair_eval : result.pair_evals) out << to_json(pair_eval).dump() << '\n';
  out << to_json(result.aggregate_report).dump() << '\n';

  manifest.stats["pairs"] = pairs.size();
  manifest.stats["evaluated"] = result.pair_evals.size();
  manifest.finished_at = now_iso8601();
  manifest.write(options.out_dir);
  return result;
}

}  // namespace patdraft
