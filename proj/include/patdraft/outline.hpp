#pragma once

#include <algorithm>
#include <cctype>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "patdraft/document.hpp"
#include "patdraft/errors.hpp"
#include "patdraft/llm.hpp"

namespace patdraft {

/// Outline detail level: how many characters of source text one bullet
/// summarizes. The mapping is fixed: long=500, medium=1000, short=2000.
struct Granularity {
  size_t chars_per_bullet = 1000;
  std::string label = "medium";

  static Granularity long_form() { return {500, "long"}; }
  static Granularity medium() { return {1000, "medium"}; }
  static Granularity short_form() { return {2000, "short"}; }
};

inline Granularity parse_granularity(std::string_view label) {
  if (label == "long") return Granularity::long_form();
  if (label == "medium") return Granularity::medium();
  if (label == "short") return Granularity::short_form();
  throw ConfigError("unknown granularity: '" + std::string(label) + "'");
}

/// Bullets for a section of n_chars characters: 0 for an empty section,
/// otherwise max(1, floor(n_chars / chars_per_bullet)).
inline size_t bullet_count(size_t n_chars, size_t chars_per_bullet) {
  if (n_chars == 0) return 0;
  return std::max<size_t>(1, n_chars / chars_per_bullet);
}

struct OutlineNode {
  std::string heading;
  std::vector<std::string> bullets;
  size_t desired_chars = 0;
  std::vector<OutlineNode> children;

  bool operator==(const OutlineNode&) const = default;
};

struct Outline {
  std::string doc_id;
  std::vector<OutlineNode> roots;

  bool operator==(const Outline&) const = default;
};

inline size_t total_bullets(const OutlineNode& node) {
  size_t n = node.bullets.size();
  for (const auto& child : node.children) n += total_bullets(child);
  return n;
}

inline size_t total_bullets(const Outline& outline) {
  size_t n = 0;
  for (const auto& root : outline.roots) n += total_bullets(root);
  return n;
}

struct OutlineOptions {
  std::string model = "default";
  double temperature = 0.0;
  int max_deficit_retries = 2;
  /// Count subsection text toward a section's desired length (default:
  /// own paragraphs only).
  bool length_includes_subsections = false;
  int max_tokens_per_bullet = 48;
  /// Template placeholders: {{n_bullets}}, {{heading}}, {{text}}.
  std::string summary_template;
};

inline std::string default_summary_template() {
  return
      "Summarize the following patent section as exactly {{n_bullets}} bullet "
      "points covering its structure and key content, in reading order. Each "
      "bullet must be one short sentence on its own line starting with \"- \". "
      "Output nothing but the {{n_bullets}} bullet lines.\n"
      "\n"
      "Section title: {{heading}}\n"
      "\n"
      "Section text:\n"
      "{{text}}\n";
}

namespace outline_detail {

inline std::string substitute(std::string text, std::string_view key, std::string_view value) {
  std::string needle = "{{" + std::string(key) + "}}";
  size_t pos = 0;
  while ((pos = text.find(needle, pos)) != std::string::npos) {
    text.replace(pos, needle.size(), value);
    pos += value.size();
  }
  return text;
}

inline std::string single_line(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool last_space = true;
  for (char c : text) {
    if (c == '\n' || c == '\r' || c == '\t' || c == ' ') {
      if (!last_space) out.push_back(' ');
      last_space = true;
    } else {
      out.push_back(c);
      last_space = false;
    }
  }
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

inline std::vector<std::string> parse_bullet_lines(const std::string& reply) {
  std::vector<std::string> bullets;
  size_t pos = 0;
  while (pos <= reply.size()) {
    size_t eol = reply.find('\n', pos);
    if (eol == std::string::npos) eol = reply.size();
    std::string line = trim(reply.substr(pos, eol - pos));
    pos = eol + 1;
    if (line.empty()) {
      if (pos > reply.size()) break;
      continue;
    }
    std::string text;
    if (line.rfind("- ", 0) == 0 || line.rfind("* ", 0) == 0) {
      text = line.substr(2);
    } else {
      // numbered bullets: "3." or "3)" followed by a space
      size_t i = 0;
      while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
      if (i > 0 && i + 1 < line.size() && (line[i] == '.' || line[i] == ')') &&
          line[i + 1] == ' ')
        text = line.substr(i + 2);
    }
    text = trim(text);
    if (!text.empty()) bullets.push_back(single_line(text));
    if (pos > reply.size()) break;
  }
  return bullets;
}

/// Leading sentences of each paragraph first, then the remaining sentences
/// in reading order. Used to pad bullet deficits.
inline std::vector<std::string> candidate_sentences(const SectionNode& section) {
  std::vector<std::string> leading, rest;
  for (const auto& paragraph : section.paragraphs) {
    std::vector<std::string> sentences;
    std::string current;
    for (size_t i = 0; i < paragraph.size(); ++i) {
      current.push_back(paragraph[i]);
      bool terminal = paragraph[i] == '.' || paragraph[i] == '!' || paragraph[i] == '?';
      bool boundary = i + 1 == paragraph.size() ||
                      std::isspace(static_cast<unsigned char>(paragraph[i + 1]));
      if (terminal && boundary) {
        std::string s = single_line(current);
        if (!s.empty()) sentences.push_back(std::move(s));
        current.clear();
      }
    }
    std::string tail = single_line(current);
    if (!tail.empty()) sentences.push_back(std::move(tail));
    for (size_t i = 0; i < sentences.size(); ++i)
      (i == 0 ? leading : rest).push_back(std::move(sentences[i]));
  }
  leading.insert(leading.end(), rest.begin(), rest.end());
  return leading;
}

inline std::vector<std::string> summarize_section(const SectionNode& section,
                                                  size_t n_bullets,
                                                  LanguageModelClient& llm,
                                                  const OutlineOptions& options) {
  std::string body;
  for (const auto& paragraph : section.paragraphs) {
    if (!body.empty()) body += "\n\n";
    body += paragraph;
  }
  std::string tmpl =
      options.summary_template.empty() ? default_summary_template() : options.summary_template;
  std::string base = substitute(tmpl, "n_bullets", std::to_string(n_bullets));
  base = substitute(std::move(base), "heading", section.title);
  base = substitute(std::move(base), "text", body);

  ChatRequest request;
  request.model = options.model;
  request.system = "You write terse bullet-point summaries of patent sections.";
  request.temperature = options.temperature;
  request.max_tokens =
      static_cast<int>(n_bullets) * options.max_tokens_per_bullet + 64;

  std::vector<std::string> bullets;
  for (int attempt = 0; attempt <= options.max_deficit_retries; ++attempt) {
    request.user = base;
    if (attempt > 0)
      request.user += "\nYour previous reply had too few bullets. Output exactly " +
                      std::to_string(n_bullets) + " bullet lines. (attempt " +
                      std::to_string(attempt + 1) + ")";
    bullets = parse_bullet_lines(llm.complete(request));
    if (bullets.size() >= n_bullets) break;
  }

  if (bullets.size() > n_bullets) bullets.resize(n_bullets);
  if (bullets.size() < n_bullets) {
    auto pool = candidate_sentences(section);
    for (const auto& sentence : pool) {
      if (bullets.size() == n_bullets) break;
      bullets.push_back(sentence);
    }
    std::string filler = bullets.empty()
                             ? (section.title.empty() ? std::string("(no content)") : section.title)
                             : bullets.back();
    while (bullets.size() < n_bullets) bullets.push_back(filler);
  }
  return bullets;
}

inline OutlineNode outline_section(const SectionNode& section, const Granularity& g,
                                   LanguageModelClient& llm, const OutlineOptions& options) {
  OutlineNode node;
  node.heading = single_line(section.title);
  node.desired_chars = options.length_includes_subsections ? char_count(section)
                                                           : own_char_count(section);
  size_t own = own_char_count(section);
  size_t n_bullets = bullet_count(options.length_includes_subsections ? node.desired_chars : own,
                                  g.chars_per_bullet);
  if (n_bullets > 0) node.bullets = summarize_section(section, n_bullets, llm, options);
  for (const auto& child : section.subsections)
    node.children.push_back(outline_section(child, g, llm, options));
  return node;
}

}  // namespace outline_detail

/// Produces one outline node per patent section, in document order. The
/// bullet count per node is fixed by bullet_count(); model output is
/// truncated on excess, re-requested (bounded) on deficit and finally
/// padded from paragraph-leading sentences.
inline Outline generate_outline(const DocumentTree& patent, const Granularity& g,
                                LanguageModelClient& llm, const OutlineOptions& options = {}) {
  Outline outline;
  outline.doc_id = patent.doc_id;
  for (const auto& root : patent.roots)
    outline.roots.push_back(outline_detail::outline_section(root, g, llm, options));
  return outline;
}

namespace outline_detail {

inline void render_node(const OutlineNode& node, size_t depth, std::string& out) {
  out.append(depth, '#');
  out.push_back(' ');
  out += node.heading;
  out.push_back('\n');
  for (const auto& bullet : node.bullets) {
    out += "- ";
    out += bullet;
    out.push_back('\n');
  }
  for (const auto& child : node.children) render_node(child, depth + 1, out);
}

}  // namespace outline_detail

/// Headings as '#'-prefixed lines at their depth, bullets as "- " lines.
/// Desired lengths travel in the sidecar (see outline_sidecar), not in the
/// Markdown.
inline std::string render_outline_markdown(const Outline& outline) {
  std::string out;
  for (const auto& root : outline.roots) outline_detail::render_node(root, 1, out);
  return out;
}

/// Exact inverse of render_outline_markdown. Throws OutlineSyntaxError on
/// malformed nesting (level jumps, bullets before any heading, stray text).
inline Outline parse_outline_markdown(std::string_view text) {
  Outline outline;
  std::vector<OutlineNode*> stack;
  size_t pos = 0;
  size_t line_no = 0;
  while (pos < text.size()) {
    size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string line = trim(text.substr(pos, eol - pos));
    pos = eol + 1;
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      size_t depth = 0;
      while (depth < line.size() && line[depth] == '#') ++depth;
      if (depth >= line.size() || line[depth] != ' ')
        throw OutlineSyntaxError("line " + std::to_string(line_no) + ": malformed heading");
      std::string heading = trim(line.substr(depth + 1));
      if (depth > stack.size() + 1)
        throw OutlineSyntaxError("line " + std::to_string(line_no) +
                                 ": heading level jumps from " + std::to_string(stack.size()) +
                                 " to " + std::to_string(depth));
      stack.resize(depth - 1);
      OutlineNode node;
      node.heading = heading;
      if (stack.empty()) {
        outline.roots.push_back(std::move(node));
        stack.push_back(&outline.roots.back());
      } else {
        stack.back()->children.push_back(std::move(node));
        stack.push_back(&stack.back()->children.back());
      }
    } else if (line.rfind("- ", 0) == 0) {
      if (stack.empty())
        throw OutlineSyntaxError("line " + std::to_string(line_no) +
                                 ": bullet before any heading");
      stack.back()->bullets.push_back(trim(line.substr(2)));
    } else {
      throw OutlineSyntaxError("line " + std::to_string(line_no) +
                               ": expected heading or bullet");
    }
  }
  return outline;
}

namespace outline_detail {

inline void sidecar_node(const OutlineNode& node, std::vector<std::string>& path,
                         nlohmann::json& sections) {
  path.push_back(node.heading);
  sections.push_back({{"path", path}, {"desired_chars", node.desired_chars}});
  for (const auto& child : node.children) sidecar_node(child, path, sections);
  path.pop_back();
}

inline void apply_sidecar_node(OutlineNode& node, std::vector<std::string>& path,
                               const nlohmann::json& sections, size_t& index) {
  path.push_back(node.heading);
  if (index >= sections.size())
    throw OutlineSyntaxError("sidecar has fewer sections than the outline");
  const auto& entry = sections[index++];
  if (entry["path"].get<std::vector<std::string>>() != path)
    throw OutlineSyntaxError("sidecar path mismatch at heading '" + node.heading + "'");
  node.desired_chars = entry["desired_chars"].get<size_t>();
  for (auto& child : node.children) apply_sidecar_node(child, path, sections, index);
  path.pop_back();
}

}  // namespace outline_detail

/// Heading-path -> desired_chars mapping, in pre-order.
inline nlohmann::json outline_sidecar(const Outline& outline) {
  nlohmann::json sections = nlohmann::json::array();
  std::vector<std::string> path;
  for (const auto& root : outline.roots)
    outline_detail::sidecar_node(root, path, sections);
  return {{"doc_id", outline.doc_id}, {"sections", sections}};
}

inline void apply_sidecar(Outline& outline, const nlohmann::json& sidecar) {
  if (sidecar.contains("doc_id")) outline.doc_id = sidecar["doc_id"].get<std::string>();
  const auto& sections = sidecar.at("sections");
  size_t index = 0;
  std::vector<std::string> path;
  for (auto& root : outline.roots)
    outline_detail::apply_sidecar_node(root, path, sections, index);
  if (index != sections.size())
    throw OutlineSyntaxError("sidecar has more sections than the outline");
}

inline void save_outline(const Outline& outline, const std::string& markdown_path,
                         const std::string& sidecar_path) {
  std::ofstream md(markdown_path);
  if (!md) throw IoError("cannot write outline: " + markdown_path);
  md << render_outline_markdown(outline);
  std::ofstream side(sidecar_path);
  if (!side) throw IoError("cannot write outline sidecar: " + sidecar_path);
  side << outline_sidecar(outline).dump(2) << '\n';
}

inline Outline load_outline(const std::string& markdown_path, const std::string& sidecar_path) {
  std::ifstream md(markdown_path);
  if (!md) throw IoError("cannot open outline: " + markdown_path);
  std::string text((std::istreambuf_iterator<char>(md)), std::istreambuf_iterator<char>());
  Outline outline = parse_outline_markdown(text);
  std::ifstream side(sidecar_path);
  if (!side) throw IoError("cannot open outline sidecar: " + sidecar_path);
  nlohmann::json sidecar = nlohmann::json::parse(side);
  apply_sidecar(outline, sidecar);
  return outline;
}

}  // namespace patdraft
