#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "patdraft/bm25.hpp"
#include "patdraft/document.hpp"
#include "patdraft/errors.hpp"
#include "patdraft/records.hpp"
#include "patdraft/textstats.hpp"

namespace patdraft {

enum class RetrieverKind { NoPaper, AbstractOnly, Bm25, Bm25Oracle };

inline RetrieverKind parse_retriever(std::string_view name) {
  if (name == "noPaper" || name == "nopaper" || name == "none") return RetrieverKind::NoPaper;
  if (name == "abstractOnly" || name == "abstractonly") return RetrieverKind::AbstractOnly;
  if (name == "bm25") return RetrieverKind::Bm25;
  if (name == "bm25oracle" || name == "bm25Oracle") return RetrieverKind::Bm25Oracle;
  throw ConfigError("unknown retriever: '" + std::string(name) + "'");
}

inline std::string to_string(RetrieverKind kind) {
  switch (kind) {
    case RetrieverKind::NoPaper: return "noPaper";
    case RetrieverKind::AbstractOnly: return "abstractOnly";
    case RetrieverKind::Bm25: return "bm25";
    case RetrieverKind::Bm25Oracle: return "bm25oracle";
  }
  return "bm25";
}

/// Paper context handed to generation. `included` lists "abstract" and body
/// paragraph ids ("p0", "p1", ...) in inclusion order. token_count is the
/// sum of the token counts of the rendered blocks (title line, heading
/// lines, abstract, selected paragraphs), measured with the active
/// tokenizer.
struct RetrievalContext {
  std::vector<std::string> included;
  std::string rendered;
  size_t token_count = 0;
  bool truncated_abstract = false;
};

namespace retrieval_detail {

inline std::string heading_line(size_t depth, const std::string& title) {
  std::string line(depth, '#');
  line.push_back(' ');
  line += title;
  return line;
}

inline void render_section(const SectionNode& node, size_t depth, size_t& para_index,
                           const std::set<size_t>& selected, std::string& out,
                           size_t& token_count, const Tokenizer& tokenizer) {
  std::string line = heading_line(depth, node.title);
  token_count += tokenizer.count(line);
  out += line;
  out += "\n\n";
  for (const auto& paragraph : node.paragraphs) {
    if (selected.count(para_index)) {
      out += paragraph;
      out += "\n\n";
      token_count += tokenizer.count(paragraph);
    }
    ++para_index;
  }
  for (const auto& child : node.subsections)
    render_section(child, depth + 1, para_index, selected, out, token_count, tokenizer);
}

struct Rendered {
  std::string text;
  size_t token_count = 0;
};

/// Renders the context document: paper title, abstract, then every body
/// heading (the full document map) with only the selected paragraphs.
inline Rendered render_context(const PaperRecord& paper, const std::set<size_t>& selected,
                               const std::string& abstract_text, bool skeleton,
                               const Tokenizer& tokenizer) {
  Rendered r;
  std::string title_line = heading_line(1, paper.title);
  r.token_count += tokenizer.count(title_line);
  r.text += title_line;
  r.text += "\n\n";
  std::string abstract_heading = heading_line(2, "Abstract");
  r.token_count += tokenizer.count(abstract_heading);
  r.text += abstract_heading;
  r.text += "\n\n";
  if (!abstract_text.empty()) {
    r.token_count += tokenizer.count(abstract_text);
    r.text += abstract_text;
    r.text += "\n\n";
  }
  if (skeleton && paper.body) {
    size_t para_index = 0;
    for (const auto& root : paper.body->roots)
      render_section(root, 2, para_index, selected, r.text, r.token_count, tokenizer);
  }
  return r;
}

}  // namespace retrieval_detail

/// Flattened body paragraphs of a paper, in document order.
inline std::vector<std::string> paper_paragraphs(const PaperRecord& paper) {
  std::vector<std::string> out;
  if (!paper.body) return out;
  for (const auto& p : flatten(*paper.body)) out.push_back(p.text);
  return out;
}

/// Builds the paper context for one chunk. The abstract is always included
/// (truncated to fit if the budget is smaller than the abstract); ranked
/// body paragraphs are then added in ranking order, skipping any paragraph
/// that would overflow the budget and continuing down the ranking.
inline RetrievalContext assemble_context(const PaperRecord& paper,
                                         const std::vector<std::pair<size_t, double>>& ranking,
                                         size_t budget_tokens, RetrieverKind kind,
                                         const Tokenizer& tokenizer) {
  using namespace retrieval_detail;
  RetrievalContext ctx;
  if (budget_tokens == 0) throw ConfigError("context budget must be positive");
  if (kind == RetrieverKind::NoPaper) return ctx;

  // Forced minimum: title + abstract, abstract truncated to the budget.
  auto render_minimal = [&] {
    Rendered overhead = render_context(paper, {}, "", /*skeleton=*/false, tokenizer);
    auto abstract_tokens = tokenizer.tokenize(paper.abstract);
    size_t room = budget_tokens > overhead.token_count ? budget_tokens - overhead.token_count : 0;
    bool truncated = abstract_tokens.size() > room;
    std::string abstract_text = paper.abstract;
    if (truncated) {
      abstract_tokens.resize(room);
      abstract_text = Tokenizer::detokenize(abstract_tokens);
    }
    Rendered minimal = render_context(paper, {}, abstract_text, /*skeleton=*/false, tokenizer);
    ctx.rendered = minimal.text;
    ctx.token_count = minimal.token_count;
    ctx.truncated_abstract = truncated;
    ctx.included = {"abstract"};
  };

  if (kind == RetrieverKind::AbstractOnly) {
    render_minimal();
    return ctx;
  }

  bool skeleton = paper.body.has_value();
  Rendered base = render_context(paper, {}, paper.abstract, skeleton, tokenizer);
  if (base.token_count > budget_tokens) {
    render_minimal();
    return ctx;
  }

  // Greedy selection under the remaining budget.
  auto paragraphs = paper_paragraphs(paper);
  std::set<size_t> selected;
  std::vector<std::string> included;
  included.push_back("abstract");
  size_t used = base.token_count;
  for (const auto& [index, score] : ranking) {
    (void)score;
    if (index >= paragraphs.size() || selected.count(index)) continue;
    size_t cost = tokenizer.count(paragraphs[index]);
    if (used + cost > budget_tokens) continue;
    used += cost;
    selected.insert(index);
    included.push_back("p" + std::to_string(index));
  }
  Rendered full = render_context(paper, selected, paper.abstract, skeleton, tokenizer);
  ctx.rendered = full.text;
  ctx.token_count = full.token_count;
  ctx.included = std::move(included);
  return ctx;
}

}  // namespace patdraft
