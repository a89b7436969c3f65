#pragma once

#include <cctype>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "patdraft/date.hpp"
#include "patdraft/document.hpp"
#include "patdraft/errors.hpp"

namespace patdraft {

enum class License { CcBy, Cc0, PublicDomain, Other, Unknown };

inline std::string to_string(License l) {
  switch (l) {
    case License::CcBy: return "CC-BY";
    case License::Cc0: return "CC0";
    case License::PublicDomain: return "PublicDomain";
    case License::Other: return "Other";
    case License::Unknown: return "Unknown";
  }
  return "Unknown";
}

/// Accepts the canonical names plus common endpoint spellings
/// (e.g. "cc-by-4.0", "public domain"). Restricted CC-BY variants
/// (-nc, -nd, -sa) map to Other, not CC-BY. Empty maps to Unknown.
inline License parse_license(std::string_view text) {
  std::string key = to_lower(trim(text));
  for (char& c : key)
    if (c == ' ' || c == '_') c = '-';
  if (key.empty() || key == "unknown") return License::Unknown;
  auto is_version_suffix = [](std::string_view rest) {
    if (rest.empty()) return true;
    if (rest[0] != '-') return false;
    for (size_t i = 1; i < rest.size(); ++i)
      if (!std::isdigit(static_cast<unsigned char>(rest[i])) && rest[i] != '.') return false;
    return rest.size() > 1;
  };
  if (key.rfind("cc-by", 0) == 0 && is_version_suffix(std::string_view(key).substr(5)))
    return License::CcBy;
  if (key.rfind("cc0", 0) == 0 && is_version_suffix(std::string_view(key).substr(3)))
    return License::Cc0;
  if (key == "publicdomain" || key == "public-domain" || key == "pd") return License::PublicDomain;
  return License::Other;
}

/// A person with the surface-name aliases known for them. The alias set
/// always contains the canonical name itself.
struct PersonRef {
  std::string name;
  std::vector<std::string> aliases;

  static PersonRef with_aliases(std::string name, std::vector<std::string> aliases) {
    PersonRef p;
    p.name = std::move(name);
    p.aliases = std::move(aliases);
    bool has_self = false;
    for (const auto& a : p.aliases)
      if (a == p.name) has_self = true;
    if (!has_self) p.aliases.insert(p.aliases.begin(), p.name);
    return p;
  }

  bool operator==(const PersonRef&) const = default;
};

struct PatentRecord {
  std::string patent_id;
  std::string title;
  std::string abstract;
  std::vector<std::string> inventors;
  Date application_date;
  DocumentTree body;
  std::string domain;  // optional analysis label

  bool operator==(const PatentRecord&) const = default;
};

struct PaperRecord {
  std::string paper_id;
  std::string title;
  std::string abstract;
  std::vector<PersonRef> authors;
  Date publication_date;
  License license = License::Unknown;
  std::optional<DocumentTree> body;

  bool operator==(const PaperRecord&) const = default;
};

inline nlohmann::json to_json(const PersonRef& p) {
  return {{"name", p.name}, {"aliases", p.aliases}};
}

inline nlohmann::json to_json(const PatentRecord& r) {
  nlohmann::json j;
  j["patent_id"] = r.patent_id;
  j["title"] = r.title;
  j["abstract"] = r.abstract;
  j["inventors"] = r.inventors;
  j["application_date"] = to_string(r.application_date);
  if (!r.body.roots.empty()) j["body"] = to_json(r.body);
  if (!r.domain.empty()) j["domain"] = r.domain;
  return j;
}

inline nlohmann::json to_json(const PaperRecord& r) {
  nlohmann::json j;
  j["paper_id"] = r.paper_id;
  j["title"] = r.title;
  j["abstract"] = r.abstract;
  auto authors = nlohmann::json::array();
  for (const auto& a : r.authors) authors.push_back(to_json(a));
  j["authors"] = std::move(authors);
  j["publication_date"] = to_string(r.publication_date);
  j["license"] = to_string(r.license);
  if (r.body) j["body"] = to_json(*r.body);
  return j;
}

namespace records_detail {

inline const nlohmann::json& require(const nlohmann::json& j, const char* field,
                                     const char* what) {
  if (!j.contains(field))
    throw SchemaError(std::string(what) + " is missing field '" + field + "'");
  return j[field];
}

inline std::string require_string(const nlohmann::json& j, const char* field,
                                  const char* what) {
  const auto& v = require(j, field, what);
  if (!v.is_string())
    throw SchemaError(std::string(what) + " field '" + field + "' must be a string");
  return v.get<std::string>();
}

}  // namespace records_detail

inline PatentRecord patent_from_json(const nlohmann::json& j) {
  using records_detail::require;
  using records_detail::require_string;
  if (!j.is_object()) throw SchemaError("patent record must be an object");
  PatentRecord r;
  r.patent_id = require_string(j, "patent_id", "patent record");
  r.title = require_string(j, "title", "patent record");
  r.abstract = require_string(j, "abstract", "patent record");
  const auto& inv = require(j, "inventors", "patent record");
  if (!inv.is_array()) throw SchemaError("patent inventors must be an array");
  for (const auto& name : inv) {
    if (!name.is_string()) throw SchemaError("patent inventors must be strings");
    r.inventors.push_back(name.get<std::string>());
  }
  if (r.inventors.empty()) throw SchemaError("patent record has no inventors");
  r.application_date = parse_date(require_string(j, "application_date", "patent record"));
  if (j.contains("body")) {
    r.body = document_from_json(j["body"]);
  } else {
    r.body.doc_id = r.patent_id;
  }
  if (j.contains("domain")) r.domain = j["domain"].get<std::string>();
  return r;
}

inline PaperRecord paper_from_json(const nlohmann::json& j) {
  using records_detail::require;
  using records_detail::require_string;
  if (!j.is_object()) throw SchemaError("paper record must be an object");
  PaperRecord r;
  r.paper_id = require_string(j, "paper_id", "paper record");
  r.title = require_string(j, "title", "paper record");
  r.abstract = require_string(j, "abstract", "paper record");
  const auto& authors = require(j, "authors", "paper record");
  if (!authors.is_array()) throw SchemaError("paper authors must be an array");
  for (const auto& a : authors) {
    if (a.is_string()) {
      r.authors.push_back(PersonRef::with_aliases(a.get<std::string>(), {}));
    } else if (a.is_object()) {
      std::vector<std::string> aliases;
      if (a.contains("aliases"))
        for (const auto& alias : a["aliases"]) aliases.push_back(alias.get<std::string>());
      r.authors.push_back(
          PersonRef::with_aliases(require_string(a, "name", "paper author"), std::move(aliases)));
    } else {
      throw SchemaError("paper author must be a string or object");
    }
  }
  r.publication_date = parse_date(require_string(j, "publication_date", "paper record"));
  r.license = j.contains("license") ? parse_license(j["license"].get<std::string>())
                                    : License::Unknown;
  if (j.contains("body") && !j["body"].is_null()) r.body = document_from_json(j["body"]);
  return r;
}

}  // namespace patdraft
