#pragma once

#include <algorithm>
#include <cctype>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "patdraft/errors.hpp"
#include "patdraft/textstats.hpp"

namespace patdraft {

/// One node of a document tree. Titles are non-empty after trimming except
/// for an optional untitled root.
struct SectionNode {
  std::string title;
  std::vector<std::string> paragraphs;
  std::vector<SectionNode> subsections;

  bool operator==(const SectionNode&) const = default;
};

struct DocumentTree {
  std::string doc_id;
  std::vector<SectionNode> roots;

  bool operator==(const DocumentTree&) const = default;
};

inline std::string trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

inline std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

/// Characters in this node's own paragraphs, subsections excluded.
inline size_t own_char_count(const SectionNode& node) {
  size_t total = 0;
  for (const auto& p : node.paragraphs) total += p.size();
  return total;
}

inline size_t char_count(const SectionNode& node) {
  size_t total = own_char_count(node);
  for (const auto& child : node.subsections) total += char_count(child);
  return total;
}

inline size_t char_count(const DocumentTree& tree) {
  size_t total = 0;
  for (const auto& root : tree.roots) total += char_count(root);
  return total;
}

namespace document_detail {

inline void check_known_fields(const nlohmann::json& obj,
                               std::initializer_list<const char*> allowed,
                               const char* what) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = std::any_of(allowed.begin(), allowed.end(),
                             [&](const char* k) { return it.key() == k; });
    if (!known)
      throw SchemaError(std::string("unknown field '") + it.key() + "' in " + what);
  }
}

inline SectionNode parse_section(const nlohmann::json& j, bool is_root) {
  if (!j.is_object()) throw SchemaError("section must be an object");
  check_known_fields(j, {"title", "paragraphs", "subsections"}, "section");
  if (!j.contains("title") || !j.contains("paragraphs") || !j.contains("subsections"))
    throw SchemaError("section requires title, paragraphs and subsections");
  if (!j["title"].is_string()) throw SchemaError("section title must be a string");
  if (!j["paragraphs"].is_array())
    throw SchemaError("section paragraphs must be an array of strings");
  if (!j["subsections"].is_array())
    throw SchemaError("section subsections must be an array");

  SectionNode node;
  node.title = j["title"].get<std::string>();
  if (!is_root && trim(node.title).empty())
    throw SchemaError("non-root section has an empty title");
  for (const auto& p : j["paragraphs"]) {
    if (!p.is_string()) throw SchemaError("section paragraphs must be an array of strings");
    node.paragraphs.push_back(p.get<std::string>());
  }
  for (const auto& child : j["subsections"])
    node.subsections.push_back(parse_section(child, /*is_root=*/false));
  return node;
}

}  // namespace document_detail

inline DocumentTree document_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw SchemaError("document must be an object");
  DocumentTree tree;
  if (j.contains("doc_id") || j.contains("roots")) {
    document_detail::check_known_fields(j, {"doc_id", "roots"}, "document");
    if (!j.contains("doc_id") || !j["doc_id"].is_string())
      throw SchemaError("document requires a string doc_id");
    if (!j.contains("roots") || !j["roots"].is_array())
      throw SchemaError("document requires a roots array");
    tree.doc_id = j["doc_id"].get<std::string>();
    for (const auto& root : j["roots"])
      tree.roots.push_back(document_detail::parse_section(root, /*is_root=*/true));
    if (tree.roots.empty()) throw EmptyDocument("document has no sections");
  } else {
    // A bare section is accepted as a single-root document.
    tree.roots.push_back(document_detail::parse_section(j, /*is_root=*/true));
  }
  return tree;
}

/// Parses the external document schema. Unknown fields are rejected.
inline DocumentTree parse_document(std::string_view bytes) {
  nlohmann::json j = nlohmann::json::parse(bytes, nullptr, false);
  if (j.is_discarded()) throw SchemaError("document is not valid JSON");
  return document_from_json(j);
}

inline nlohmann::json to_json(const SectionNode& node) {
  nlohmann::json j;
  j["title"] = node.title;
  j["paragraphs"] = node.paragraphs;
  auto subs = nlohmann::json::array();
  for (const auto& child : node.subsections) subs.push_back(to_json(child));
  j["subsections"] = std::move(subs);
  return j;
}

inline nlohmann::json to_json(const DocumentTree& tree) {
  nlohmann::json j;
  j["doc_id"] = tree.doc_id;
  auto roots = nlohmann::json::array();
  for (const auto& root : tree.roots) roots.push_back(to_json(root));
  j["roots"] = std::move(roots);
  return j;
}

inline std::string serialize(const DocumentTree& tree) { return to_json(tree).dump(); }

/// Seed list of metadata headings stripped from patent bodies. Extend via
/// a blacklist file; entries are matched case-insensitively on trimmed
/// titles with Levenshtein distance < 3.
inline std::vector<std::string> default_metadata_blacklist() {
  return {
      "cross-reference to related applications",
      "statement regarding federally sponsored research",
      "government funding",
      "government support",
      "government license rights",
      "sequence listing",
  };
}

inline std::vector<std::string> load_blacklist(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open blacklist file: " + path);
  std::vector<std::string> entries;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string entry = to_lower(trim(line));
    if (!entry.empty()) entries.push_back(entry);
  }
  return entries;
}

namespace document_detail {

inline bool title_blacklisted(const std::string& title,
                              const std::vector<std::string>& blacklist) {
  std::string key = to_lower(trim(title));
  for (const auto& entry : blacklist)
    if (levenshtein(key, entry) < 3) return true;
  return false;
}

inline void filter_sections(const std::vector<SectionNode>& in,
                            const std::vector<std::string>& blacklist,
                            std::vector<SectionNode>& out) {
  for (const auto& node : in) {
    if (title_blacklisted(node.title, blacklist)) continue;
    SectionNode kept;
    kept.title = node.title;
    kept.paragraphs = node.paragraphs;
    filter_sections(node.subsections, blacklist, kept.subsections);
    out.push_back(std::move(kept));
  }
}

}  // namespace document_detail

/// Removes every subtree whose lowercased trimmed title is within
/// Levenshtein distance < 3 of a blacklist entry. Blacklist entries must be
/// lowercase.
inline DocumentTree filter_metadata_sections(const DocumentTree& tree,
                                             const std::vector<std::string>& blacklist) {
  DocumentTree out;
  out.doc_id = tree.doc_id;
  document_detail::filter_sections(tree.roots, blacklist, out.roots);
  return out;
}

struct FlatParagraph {
  std::vector<std::string> heading_path;
  std::string text;

  bool operator==(const FlatParagraph&) const = default;
};

namespace document_detail {

inline void flatten_node(const SectionNode& node, std::vector<std::string>& path,
                         std::vector<FlatParagraph>& out) {
  path.push_back(node.title);
  for (const auto& p : node.paragraphs) out.push_back({path, p});
  for (const auto& child : node.subsections) flatten_node(child, path, out);
  path.pop_back();
}

}  // namespace document_detail

/// Depth-first paragraph listing; heading_path is the chain of section
/// titles from root down to the paragraph's own section.
inline std::vector<FlatParagraph> flatten(const DocumentTree& tree) {
  std::vector<FlatParagraph> out;
  std::vector<std::string> path;
  for (const auto& root : tree.roots) document_detail::flatten_node(root, path, out);
  return out;
}

namespace document_detail {

inline void render_markdown_node(const SectionNode& node, size_t depth, std::string& out) {
  out.append(depth, '#');
  out.push_back(' ');
  out += node.title;
  out += "\n\n";
  for (const auto& paragraph : node.paragraphs) {
    out += paragraph;
    out += "\n\n";
  }
  for (const auto& child : node.subsections) render_markdown_node(child, depth + 1, out);
}

}  // namespace document_detail

/// Markdown rendering with '#'-prefixed headings at their depth; the same
/// layout generated drafts use, so originals and drafts are comparable.
inline std::string render_document_markdown(const DocumentTree& tree) {
  std::string out;
  for (const auto& root : tree.roots) document_detail::render_markdown_node(root, 1, out);
  return out;
}

}  // namespace patdraft
