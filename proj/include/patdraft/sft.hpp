#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "patdraft/errors.hpp"
#include "patdraft/generation.hpp"

namespace patdraft {

struct SftPair {
  PatentRecord patent;
  PaperRecord paper;
  Outline outline;
};

/// One training record per (pair, chunk): the inference-time prompt built
/// by build_prompt and the original patent text of that chunk as target.
struct SftRecord {
  std::string patent_id;
  std::string paper_id;
  size_t chunk_index = 0;
  std::string system;
  std::string user;
  std::string target;
};

inline nlohmann::json to_json(const SftRecord& r) {
  return {{"patent_id", r.patent_id}, {"paper_id", r.paper_id},
          {"chunk_index", r.chunk_index}, {"system", r.system},
          {"user", r.user},             {"target", r.target}};
}

inline std::vector<SftRecord> build_sft_records(const SftPair& pair, RetrieverKind retriever,
                                                const GenerationConfig& cfg,
                                                const PromptTemplates& templates,
                                                const Tokenizer& tokenizer) {
  TokenBudgets budgets = allocate_tokens(cfg);
  ChunkPlan plan = chunk_outline(pair.outline, budgets.output_budget, cfg);

  std::optional<Bm25Index> index;
  auto paragraphs = paper_paragraphs(pair.paper);
  bool needs_ranking =
      retriever == RetrieverKind::Bm25 || retriever == RetrieverKind::Bm25Oracle;
  if (needs_ranking && !paragraphs.empty()) index = Bm25Index::build(paragraphs);

  std::vector<SftRecord> records;
  for (size_t i = 0; i < plan.chunks.size(); ++i) {
    std::vector<std::pair<size_t, double>> ranking;
    if (index) {
      std::string query;
      if (retriever == RetrieverKind::Bm25Oracle)
        query = original_chunk_text(pair.patent.body, pair.outline, plan.chunks[i]);
      else
        query = render_chunk_outline(pair.outline, plan.chunks[i], /*with_lengths=*/false);
      ranking = index->rank(query);
    }
    RetrievalContext ctx = assemble_context(pair.paper, ranking,
                                            static_cast<size_t>(budgets.context_budget),
                                            retriever, tokenizer);
    Prompt prompt =
        build_prompt(pair.paper, ctx, pair.outline, plan, i, templates, cfg, budgets, tokenizer);
    SftRecord record;
    record.patent_id = pair.patent.patent_id;
    record.paper_id = pair.paper.paper_id;
    record.chunk_index = i;
    record.system = prompt.system;
    record.user = prompt.user;
    record.target = original_chunk_text(pair.patent.body, pair.outline, plan.chunks[i]);
    records.push_back(std::move(record));
  }
  return records;
}

/// Writes one JSON record per line. Returns the number of records written.
inline size_t export_sft_dataset(const std::vector<SftPair>& pairs, RetrieverKind retriever,
                                 const GenerationConfig& cfg, const PromptTemplates& templates,
                                 const Tokenizer& tokenizer, const std::string& out_path) {
  std::ofstream out(out_path);
  if (!out) throw IoError("cannot write training data: " + out_path);
  size_t count = 0;
  for (const auto& pair : pairs) {
    for (const auto& record : build_sft_records(pair, retriever, cfg, templates, tokenizer)) {
      out << to_json(record).dump() << '\n';
      ++count;
    }
  }
  return count;
}

}  // namespace patdraft
