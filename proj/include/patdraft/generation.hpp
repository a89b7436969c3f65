#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "patdraft/document.hpp"
#include "patdraft/errors.hpp"
#include "patdraft/llm.hpp"
#include "patdraft/outline.hpp"
#include "patdraft/retrieval.hpp"
#include "patdraft/textstats.hpp"

namespace patdraft {

struct GenerationConfig {
  int max_seq = 8192;
  double temperature = 0.6;
  int instruction_budget = 1024;
  double chars_per_token = 4.0;
  std::string model = "default";
  int empty_completion_retries = 2;
};

struct TokenBudgets {
  int context_budget = 0;
  int output_budget = 0;
};

/// Splits the sequence length remaining after the instruction equally
/// between paper context and output.
inline TokenBudgets allocate_tokens(const GenerationConfig& cfg) {
  if (cfg.max_seq <= 0 || cfg.instruction_budget <= 0)
    throw ConfigError("token budgets must be positive");
  if (cfg.instruction_budget >= cfg.max_seq)
    throw ConfigError("instruction budget must be smaller than the sequence length");
  int half = (cfg.max_seq - cfg.instruction_budget) / 2;
  return {half, half};
}

/// A contiguous bullet range of one outline section. `path` indexes the
/// outline tree from the roots; partial is set when the range does not
/// cover the whole section.
struct ChunkSlice {
  std::vector<size_t> path;
  size_t bullet_begin = 0;
  size_t bullet_end = 0;
  bool partial = false;
  int est_tokens = 0;

  bool operator==(const ChunkSlice&) const = default;
};

struct Chunk {
  std::vector<ChunkSlice> slices;
  int output_budget = 0;
  bool is_section_split = false;

  bool operator==(const Chunk&) const = default;
};

struct ChunkPlan {
  std::vector<Chunk> chunks;

  bool operator==(const ChunkPlan&) const = default;
};

inline const OutlineNode* outline_node_at(const Outline& outline,
                                          const std::vector<size_t>& path) {
  const std::vector<OutlineNode>* level = &outline.roots;
  const OutlineNode* node = nullptr;
  for (size_t index : path) {
    if (index >= level->size()) return nullptr;
    node = &(*level)[index];
    level = &node->children;
  }
  return node;
}

inline const SectionNode* section_at(const DocumentTree& tree,
                                     const std::vector<size_t>& path) {
  const std::vector<SectionNode>* level = &tree.roots;
  const SectionNode* node = nullptr;
  for (size_t index : path) {
    if (index >= level->size()) return nullptr;
    node = &(*level)[index];
    level = &node->subsections;
  }
  return node;
}

namespace generation_detail {

inline int estimate_tokens(size_t desired_chars, double chars_per_token) {
  if (desired_chars == 0) return 0;
  return static_cast<int>(std::ceil(static_cast<double>(desired_chars) / chars_per_token));
}

struct SectionRef {
  std::vector<size_t> path;
  const OutlineNode* node;
  int est_tokens;
};

inline void collect_sections(const std::vector<OutlineNode>& nodes,
                             std::vector<size_t>& path, double chars_per_token,
                             std::vector<SectionRef>& out) {
  for (size_t i = 0; i < nodes.size(); ++i) {
    path.push_back(i);
    out.push_back({path, &nodes[i], estimate_tokens(nodes[i].desired_chars, chars_per_token)});
    collect_sections(nodes[i].children, path, chars_per_token, out);
    path.pop_back();
  }
}

}  // namespace generation_detail

/// Greedy document-order packing: whole sections are appended to the
/// current chunk while the estimated output stays within output_budget. A
/// section is split (at bullet boundaries, into maximal sub-slices that
/// each form their own chunk) only when it exceeds the budget on its own.
inline ChunkPlan chunk_outline(const Outline& outline, int output_budget,
                               const GenerationConfig& cfg) {
  if (output_budget <= 0) throw ConfigError("output budget must be positive");
  using generation_detail::SectionRef;
  std::vector<SectionRef> sections;
  std::vector<size_t> path;
  generation_detail::collect_sections(outline.roots, path, cfg.chars_per_token, sections);

  ChunkPlan plan;
  Chunk current;
  current.output_budget = output_budget;
  int current_est = 0;
  auto flush = [&] {
    if (!current.slices.empty()) plan.chunks.push_back(std::move(current));
    current = Chunk{};
    current.output_budget = output_budget;
    current_est = 0;
  };

  for (const auto& section : sections) {
    size_t n_bullets = section.node->bullets.size();
    if (section.est_tokens > output_budget && n_bullets > 1) {
      flush();
      // Token boundary of bullet b: est * b / n (telescoping, so slice
      // estimates sum exactly to the section estimate).
      auto bullet_boundary = [&](size_t b) {
        return static_cast<int>(static_cast<int64_t>(section.est_tokens) *
                                static_cast<int64_t>(b) / static_cast<int64_t>(n_bullets));
      };
      size_t begin = 0;
      std::vector<Chunk> pieces;
      while (begin < n_bullets) {
        size_t end = begin + 1;
        while (end < n_bullets &&
               bullet_boundary(end + 1) - bullet_boundary(begin) <= output_budget)
          ++end;
        Chunk piece;
        piece.output_budget = output_budget;
        ChunkSlice slice;
        slice.path = section.path;
        slice.bullet_begin = begin;
        slice.bullet_end = end;
        slice.partial = !(begin == 0 && end == n_bullets);
        slice.est_tokens = bullet_boundary(end) - bullet_boundary(begin);
        piece.slices.push_back(std::move(slice));
        pieces.push_back(std::move(piece));
        begin = end;
      }
      bool split = pieces.size() > 1;
      for (auto& piece : pieces) {
        piece.is_section_split = split;
        plan.chunks.push_back(std::move(piece));
      }
      continue;
    }

    if (current_est + section.est_tokens > output_budget && !current.slices.empty()) flush();
    ChunkSlice slice;
    slice.path = section.path;
    slice.bullet_begin = 0;
    slice.bullet_end = n_bullets;
    slice.partial = false;
    slice.est_tokens = section.est_tokens;
    current.slices.push_back(std::move(slice));
    current_est += section.est_tokens;
  }
  flush();
  return plan;
}

struct PromptTemplates {
  /// System prompt text.
  std::string system;
  /// User template; placeholders: {{paper_context}}, {{prior_block}},
  /// {{chunk_outline}}, {{task_directive}}.
  std::string user;
  /// Prior-outline block template; placeholder: {{prior_outline}}. The
  /// block is omitted entirely for the first chunk.
  std::string prior_block;

  static PromptTemplates defaults();
  static PromptTemplates load_dir(const std::string& dir);
};

inline PromptTemplates PromptTemplates::defaults() {
  PromptTemplates t;
  t.system =
      "You are a patent attorney drafting the description section of a "
      "patent application. You write precise, formal patent language, "
      "follow the given outline exactly and ground every technical detail "
      "in the provided paper context.";
  t.user =
      "# Paper context\n"
      "\n"
      "{{paper_context}}\n"
      "{{prior_block}}"
      "# Current outline chunk\n"
      "\n"
      "{{chunk_outline}}\n"
      "# Task\n"
      "\n"
      "{{task_directive}}\n";
  t.prior_block =
      "# Outline of previously drafted sections\n"
      "\n"
      "{{prior_outline}}\n";
  return t;
}

namespace generation_detail {

inline std::string read_template_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open template: " + path);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

}  // namespace generation_detail

inline PromptTemplates PromptTemplates::load_dir(const std::string& dir) {
  PromptTemplates t;
  t.system = generation_detail::read_template_file(dir + "/generation_system.txt");
  t.user = generation_detail::read_template_file(dir + "/generation_user.txt");
  t.prior_block = generation_detail::read_template_file(dir + "/generation_prior_block.txt");
  return t;
}

/// Renders the outline slices of one chunk as Markdown. Desired lengths are
/// included as plain-text annotations when requested; continuation slices
/// are marked. Used both as prompt material and as the BM25 query.
inline std::string render_chunk_outline(const Outline& outline, const Chunk& chunk,
                                        bool with_lengths) {
  std::string out;
  for (const auto& slice : chunk.slices) {
    const OutlineNode* node = outline_node_at(outline, slice.path);
    if (node == nullptr) continue;
    out.append(slice.path.size(), '#');
    out.push_back(' ');
    out += node->heading;
    if (slice.partial && slice.bullet_begin > 0) out += " (continued)";
    out.push_back('\n');
    if (with_lengths && !slice.partial)
      out += "Desired length: about " + std::to_string(node->desired_chars) + " characters.\n";
    for (size_t b = slice.bullet_begin; b < slice.bullet_end && b < node->bullets.size(); ++b) {
      out += "- ";
      out += node->bullets[b];
      out.push_back('\n');
    }
  }
  return out;
}

/// Headings plus bullets of every chunk before `chunk_index`, without any
/// generated text.
inline std::string render_prior_outline(const Outline& outline, const ChunkPlan& plan,
                                        size_t chunk_index) {
  std::string out;
  for (size_t i = 0; i < chunk_index && i < plan.chunks.size(); ++i)
    out += render_chunk_outline(outline, plan.chunks[i], /*with_lengths=*/false);
  return out;
}

/// Chunk-level prompt. `user` is the fully substituted whole-chunk variant
/// (used verbatim for training-data export); per-section requests are
/// derived from `user_directive_template` by substituting
/// {{section_heading}} and {{desired_chars}}.
struct Prompt {
  std::string system;
  std::string user;
  std::string user_directive_template;
  bool context_truncated = false;
  size_t prompt_tokens = 0;
  std::vector<std::string> context_ids;
};

namespace generation_detail {

inline std::string whole_chunk_directive() {
  return "Write the full patent text for every section of the current outline "
         "chunk, in order, under the given headings, following the bullets and "
         "the desired lengths.";
}

inline std::string section_directive_template() {
  return "Write only the body text of the section titled \"{{section_heading}}\" "
         "(about {{desired_chars}} characters), following its bullets and the "
         "paper context. Do not repeat the heading and do not start any other "
         "section.";
}

}  // namespace generation_detail

/// Assembles the chunk prompt from the retrieved context, the current
/// outline chunk and the outlines of prior chunks. When the prompt would
/// exceed instruction_budget + context_budget tokens, context paragraphs
/// are dropped from the end of the inclusion list (then the abstract is
/// shortened) until it fits; the truncation is flagged.
inline Prompt build_prompt(const PaperRecord& paper, const RetrievalContext& context,
                           const Outline& outline, const ChunkPlan& plan, size_t chunk_index,
                           const PromptTemplates& templates, const GenerationConfig& cfg,
                           const TokenBudgets& budgets, const Tokenizer& tokenizer) {
  using outline_detail::substitute;
  const Chunk& chunk = plan.chunks.at(chunk_index);

  std::string prior_block;
  if (chunk_index > 0) {
    prior_block = substitute(templates.prior_block, "prior_outline",
                             render_prior_outline(outline, plan, chunk_index));
  }
  std::string chunk_outline_md = render_chunk_outline(outline, chunk, /*with_lengths=*/true);

  RetrievalContext ctx = context;
  size_t budget = static_cast<size_t>(cfg.instruction_budget + budgets.context_budget);

  Prompt prompt;
  prompt.system = templates.system;
  auto assemble_user = [&](const std::string& rendered_context) {
    std::string user = substitute(templates.user, "paper_context", rendered_context);
    user = substitute(std::move(user), "prior_block", prior_block);
    return substitute(std::move(user), "chunk_outline", chunk_outline_md);
  };
  auto longest_variant_tokens = [&](const std::string& user_template) {
    size_t worst = tokenizer.count(
        substitute(user_template, "task_directive", generation_detail::whole_chunk_directive()));
    for (const auto& slice : chunk.slices) {
      const OutlineNode* node = outline_node_at(outline, slice.path);
      if (node == nullptr) continue;
      std::string directive = substitute(generation_detail::section_directive_template(),
                                         "section_heading", node->heading);
      directive = substitute(std::move(directive), "desired_chars",
                             std::to_string(node->desired_chars));
      worst = std::max(worst,
                       tokenizer.count(substitute(user_template, "task_directive", directive)));
    }
    return worst + tokenizer.count(prompt.system);
  };

  std::string user_template = assemble_user(ctx.rendered);
  size_t tokens = longest_variant_tokens(user_template);
  size_t abstract_len = tokenizer.count(paper.abstract);
  while (tokens > budget) {
    if (ctx.included.size() > 1) {
      // drop the last included body paragraph and re-render
      std::set<size_t> keep;
      for (size_t i = 1; i + 1 < ctx.included.size(); ++i)
        keep.insert(static_cast<size_t>(std::stoul(ctx.included[i].substr(1))));
      ctx.included.pop_back();
      auto rendered = retrieval_detail::render_context(paper, keep, paper.abstract,
                                                       paper.body.has_value(), tokenizer);
      ctx.rendered = rendered.text;
      ctx.token_count = rendered.token_count;
    } else if (!ctx.rendered.empty() && abstract_len > 0) {
      // shorten the abstract by a quarter per round
      abstract_len = abstract_len * 3 / 4;
      auto abstract_tokens = tokenizer.tokenize(paper.abstract);
      abstract_tokens.resize(std::min(abstract_tokens.size(), abstract_len));
      auto rendered = retrieval_detail::render_context(
          paper, {}, Tokenizer::detokenize(abstract_tokens), false, tokenizer);
      ctx.rendered = rendered.text;
      ctx.token_count = rendered.token_count;
      ctx.truncated_abstract = true;
    } else {
      break;
    }
    prompt.context_truncated = true;
    user_template = assemble_user(ctx.rendered);
    tokens = longest_variant_tokens(user_template);
  }

  prompt.user = substitute(user_template, "task_directive",
                           generation_detail::whole_chunk_directive());
  prompt.user_directive_template = user_template;
  prompt.prompt_tokens = tokens;
  prompt.context_ids = ctx.included;
  return prompt;
}

struct ChunkProvenance {
  size_t chunk_index = 0;
  std::vector<std::string> context_ids;
  size_t prompt_tokens = 0;
  size_t output_tokens = 0;
  bool context_truncated = false;
  bool starts_with_continuation = false;
  std::vector<std::string> flags;
};

struct GeneratedChunk {
  std::string text;
  ChunkProvenance provenance;
};

struct PatentDraft {
  std::string text;
  std::vector<ChunkProvenance> chunks;
};

namespace generation_detail {

/// Model bodies must not introduce heading lines of their own; the outline
/// is the only source of headings. Leading '#' runs are stripped per line.
inline std::string sanitize_body(const std::string& text) {
  std::string out;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t eol = text.find('\n', pos);
    bool last = eol == std::string::npos;
    if (last) eol = text.size();
    size_t start = pos;
    while (start < eol && (text[start] == ' ' || text[start] == '\t')) ++start;
    if (start < eol && text[start] == '#') {
      while (start < eol && text[start] == '#') ++start;
      while (start < eol && text[start] == ' ') ++start;
      out.append(text, start, eol - start);
    } else {
      out.append(text, pos, eol - pos);
    }
    if (!last) out.push_back('\n');
    pos = eol + 1;
    if (last) break;
  }
  return out;
}

inline std::string truncate_tokens(const std::string& text, size_t max_tokens,
                                   const Tokenizer& tokenizer) {
  auto tokens = tokenizer.tokenize(text);
  if (tokens.size() <= max_tokens) return text;
  tokens.resize(max_tokens);
  return Tokenizer::detokenize(tokens);
}

}  // namespace generation_detail

/// Generates one chunk heading by heading. The driver writes every heading
/// line itself and asks the model for body text only, so the draft's
/// heading structure is guaranteed regardless of model behavior. Body
/// requests are capped so that the chunk total stays within the chunk's
/// output budget; empty completions are retried a bounded number of times,
/// then flagged and left empty.
inline GeneratedChunk generate_chunk(LanguageModelClient& llm, const Prompt& prompt,
                                     const Outline& outline, const Chunk& chunk,
                                     size_t chunk_index, const GenerationConfig& cfg,
                                     const Tokenizer& tokenizer) {
  using outline_detail::substitute;
  GeneratedChunk result;
  result.provenance.chunk_index = chunk_index;
  result.provenance.context_ids = prompt.context_ids;
  result.provenance.prompt_tokens = prompt.prompt_tokens;
  result.provenance.context_truncated = prompt.context_truncated;
  if (!chunk.slices.empty())
    result.provenance.starts_with_continuation =
        chunk.slices.front().partial && chunk.slices.front().bullet_begin > 0;

  // Heading lines are emitted unconditionally, so their token cost is
  // reserved up front; body caps shrink accordingly.
  std::vector<std::string> heading_lines;
  std::vector<size_t> heading_costs;
  size_t reserved = 0;
  for (const auto& slice : chunk.slices) {
    const OutlineNode* node = outline_node_at(outline, slice.path);
    std::string line;
    if (node != nullptr) {
      line.assign(slice.path.size(), '#');
      line.push_back(' ');
      line += node->heading;
    }
    heading_lines.push_back(line);
    heading_costs.push_back(tokenizer.count(line));
    reserved += heading_costs.back();
  }

  size_t used_tokens = 0;
  for (size_t k = 0; k < chunk.slices.size(); ++k) {
    const ChunkSlice& slice = chunk.slices[k];
    const OutlineNode* node = outline_node_at(outline, slice.path);
    if (node == nullptr) continue;
    result.text += heading_lines[k];
    result.text += "\n\n";
    used_tokens += heading_costs[k];
    reserved -= heading_costs[k];

    size_t slice_bullets = slice.bullet_end > slice.bullet_begin
                               ? slice.bullet_end - slice.bullet_begin
                               : 0;
    if (slice_bullets == 0) continue;  // heading-only section, no body request

    int remaining =
        chunk.output_budget - static_cast<int>(used_tokens) - static_cast<int>(reserved);
    if (remaining <= 0) {
      result.provenance.flags.push_back("output_budget_exhausted");
      continue;
    }
    int cap = std::min(remaining, std::max(slice.est_tokens, 1));

    std::string directive = substitute(generation_detail::section_directive_template(),
                                       "section_heading", node->heading);
    directive =
        substitute(std::move(directive), "desired_chars", std::to_string(node->desired_chars));

    ChatRequest request;
    request.model = cfg.model;
    request.system = prompt.system;
    request.user = substitute(prompt.user_directive_template, "task_directive", directive);
    request.max_tokens = cap;
    request.temperature = cfg.temperature;

    std::string body;
    for (int attempt = 0; attempt <= cfg.empty_completion_retries; ++attempt) {
      body = trim(generation_detail::sanitize_body(llm.complete(request)));
      if (!body.empty()) break;
    }
    if (body.empty()) {
      result.provenance.flags.push_back("empty_completion: " + node->heading);
      continue;
    }
    body = generation_detail::truncate_tokens(body, static_cast<size_t>(cap), tokenizer);
    used_tokens += tokenizer.count(body);
    result.text += body;
    result.text += "\n\n";
  }
  result.provenance.output_tokens = used_tokens;
  return result;
}

namespace generation_detail {

inline bool is_heading_line(std::string_view line) {
  size_t i = 0;
  while (i < line.size() && line[i] == '#') ++i;
  return i > 0 && i < line.size() && line[i] == ' ';
}

inline std::string last_heading_line(const std::string& text) {
  std::string last;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t eol = text.find('\n', pos);
    bool end = eol == std::string::npos;
    if (end) eol = text.size();
    std::string_view line(text.data() + pos, eol - pos);
    if (is_heading_line(line)) last = std::string(line);
    pos = eol + 1;
    if (end) break;
  }
  return last;
}

inline std::string strip_leading_heading(const std::string& text) {
  size_t pos = 0;
  while (pos < text.size()) {
    size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    std::string_view line(text.data() + pos, eol - pos);
    if (!trim(line).empty()) {
      if (is_heading_line(line)) {
        size_t next = eol == text.size() ? text.size() : eol + 1;
        while (next < text.size() && text[next] == '\n') ++next;
        return text.substr(next);
      }
      return text;
    }
    pos = eol == text.size() ? text.size() : eol + 1;
  }
  return text;
}

}  // namespace generation_detail

/// Concatenates generated chunks. A chunk that continues a section split
/// across chunks re-emits the section heading; the duplicate heading line
/// is dropped here.
inline PatentDraft assemble_draft(const std::vector<GeneratedChunk>& chunks) {
  PatentDraft draft;
  for (const auto& chunk : chunks) {
    std::string text = chunk.text;
    if (chunk.provenance.starts_with_continuation && !draft.text.empty())
      text = generation_detail::strip_leading_heading(text);
    draft.text += text;
    draft.chunks.push_back(chunk.provenance);
  }
  return draft;
}

/// Text-only variant: drops a leading heading line of a chunk when it
/// exactly repeats the previous heading line of the draft so far.
inline std::string assemble_draft(const std::vector<std::string>& chunk_texts) {
  std::string draft;
  for (const auto& chunk : chunk_texts) {
    std::string text = chunk;
    if (!draft.empty()) {
      std::string last = generation_detail::last_heading_line(draft);
      if (!last.empty()) {
        // compare against the first non-empty line
        size_t pos = 0;
        std::string first;
        while (pos <= text.size() && first.empty()) {
          size_t eol = text.find('\n', pos);
          if (eol == std::string::npos) eol = text.size();
          first = trim(std::string_view(text.data() + pos, eol - pos));
          pos = eol + 1;
          if (eol == text.size()) break;
        }
        if (first == last) text = generation_detail::strip_leading_heading(text);
      }
    }
    draft += text;
  }
  return draft;
}

/// Heading lines of a draft, in order.
inline std::vector<std::string> draft_headings(const std::string& draft_text) {
  std::vector<std::string> headings;
  size_t pos = 0;
  while (pos <= draft_text.size()) {
    size_t eol = draft_text.find('\n', pos);
    bool end = eol == std::string::npos;
    if (end) eol = draft_text.size();
    std::string_view line(draft_text.data() + pos, eol - pos);
    if (generation_detail::is_heading_line(line)) {
      size_t i = 0;
      while (i < line.size() && line[i] == '#') ++i;
      headings.push_back(trim(line.substr(i)));
    }
    pos = eol + 1;
    if (end) break;
  }
  return headings;
}

inline std::vector<std::string> outline_headings(const Outline& outline) {
  std::vector<std::string> headings;
  struct Walker {
    std::vector<std::string>& out;
    void walk(const OutlineNode& node) {
      out.push_back(node.heading);
      for (const auto& child : node.children) walk(child);
    }
  } walker{headings};
  for (const auto& root : outline.roots) walker.walk(root);
  return headings;
}

/// Original patent text covered by one chunk, sliced with the same plan
/// used for generation. Partial slices take the paragraphs whose starting
/// character offset falls into the slice's proportional character range.
inline std::string original_chunk_text(const DocumentTree& patent, const Outline& outline,
                                       const Chunk& chunk) {
  std::string out;
  for (const auto& slice : chunk.slices) {
    const OutlineNode* node = outline_node_at(outline, slice.path);
    const SectionNode* section = section_at(patent, slice.path);
    if (node == nullptr || section == nullptr) continue;
    out.append(slice.path.size(), '#');
    out.push_back(' ');
    out += node->heading;
    out += "\n\n";
    size_t total = own_char_count(*section);
    size_t n = node->bullets.size();
    size_t lo = 0;
    size_t hi = total + 1;
    if (slice.partial && n > 0) {
      lo = total * slice.bullet_begin / n;
      hi = slice.bullet_end == n ? total + 1 : total * slice.bullet_end / n;
    }
    size_t offset = 0;
    for (const auto& paragraph : section->paragraphs) {
      if (offset >= lo && offset < hi) {
        out += paragraph;
        out += "\n\n";
      }
      offset += paragraph.size();
    }
  }
  return out;
}

/// End-to-end draft generation for one patent: allocate budgets, chunk the
/// outline, retrieve context per chunk, generate heading by heading and
/// assemble. Chunks run sequentially because each prompt embeds the
/// outlines of the chunks before it. `original_patent` supplies the query
/// text for the oracle retriever and may be null otherwise.
inline PatentDraft generate_patent(const Outline& outline, const PaperRecord& paper,
                                   LanguageModelClient& llm, RetrieverKind retriever,
                                   const GenerationConfig& cfg, const PromptTemplates& templates,
                                   const Tokenizer& tokenizer,
                                   const DocumentTree* original_patent = nullptr) {
  TokenBudgets budgets = allocate_tokens(cfg);
  ChunkPlan plan = chunk_outline(outline, budgets.output_budget, cfg);

  std::optional<Bm25Index> index;
  auto paragraphs = paper_paragraphs(paper);
  bool needs_ranking =
      retriever == RetrieverKind::Bm25 || retriever == RetrieverKind::Bm25Oracle;
  if (needs_ranking && !paragraphs.empty()) index = Bm25Index::build(paragraphs);

  std::vector<GeneratedChunk> chunks;
  for (size_t i = 0; i < plan.chunks.size(); ++i) {
    std::vector<std::pair<size_t, double>> ranking;
    if (index) {
      std::string query;
      if (retriever == RetrieverKind::Bm25Oracle && original_patent != nullptr)
        query = original_chunk_text(*original_patent, outline, plan.chunks[i]);
      else
        query = render_chunk_outline(outline, plan.chunks[i], /*with_lengths=*/false);
      ranking = index->rank(query);
    }
    RetrievalContext ctx = assemble_context(paper, ranking,
                                            static_cast<size_t>(budgets.context_budget),
                                            retriever, tokenizer);
    Prompt prompt =
        build_prompt(paper, ctx, outline, plan, i, templates, cfg, budgets, tokenizer);
    chunks.push_back(generate_chunk(llm, prompt, outline, plan.chunks[i], i, cfg, tokenizer));
  }
  return assemble_draft(chunks);
}

}  // namespace patdraft
