#pragma once

#include <algorithm>
#include <cctype>
#include <string>
#include <utility>
#include <vector>

#include "patdraft/llm.hpp"

namespace patdraft {

struct HeadingLevelOptions {
  std::string model = "default";
  int max_tokens = 512;
  double temperature = 0.0;
};

namespace heading_detail {

inline std::vector<int> parse_levels(const std::string& reply) {
  std::vector<int> levels;
  size_t pos = 0;
  while (pos < reply.size()) {
    size_t eol = reply.find('\n', pos);
    if (eol == std::string::npos) eol = reply.size();
    std::string_view line(reply.data() + pos, eol - pos);
    pos = eol + 1;
    // first integer on the line, if any
    size_t i = 0;
    while (i < line.size() && !std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
    if (i == line.size()) continue;
    int value = 0;
    while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) {
      value = value * 10 + (line[i] - '0');
      ++i;
    }
    levels.push_back(value);
  }
  return levels;
}

}  // namespace heading_detail

/// Asks the model for a nesting level per heading (1 = top level). The
/// reply must contain one integer >= 1 per heading, in order; anything else
/// falls back to all-level-1 so parsing never fails on model misbehavior.
/// Transport failures propagate as LlmTransportError.
inline std::vector<std::pair<std::string, int>> infer_heading_levels(
    const std::vector<std::string>& headings, LanguageModelClient& llm,
    const HeadingLevelOptions& options = {}) {
  std::vector<std::pair<std::string, int>> result;
  if (headings.empty()) return result;
  if (headings.size() == 1) {
    result.emplace_back(headings[0], 1);
    return result;
  }

  std::string user =
      "Below is the flat list of section headings of a document, in reading "
      "order. Infer the nesting level of each heading from its name (1 = top "
      "level, 2 = subsection of the nearest preceding level-1 heading, and so "
      "on). Reply with exactly one integer per heading, one per line, in the "
      "same order, and nothing else.\n\nHeadings:\n";
  for (const auto& h : headings) {
    user += h;
    user.push_back('\n');
  }

  ChatRequest request;
  request.model = options.model;
  request.system = "You label document headings with their nesting levels.";
  request.user = user;
  // enough room for one integer line per heading
  request.max_tokens =
      std::max(options.max_tokens, static_cast<int>(headings.size()) * 8);
  request.temperature = options.temperature;

  std::string reply = llm.complete(request);
  std::vector<int> levels = heading_detail::parse_levels(reply);

  bool valid = levels.size() == headings.size();
  for (int level : levels)
    if (level < 1) valid = false;
  if (!valid) levels.assign(headings.size(), 1);

  for (size_t i = 0; i < headings.size(); ++i)
    result.emplace_back(headings[i], levels[i]);
  return result;
}

}  // namespace patdraft
