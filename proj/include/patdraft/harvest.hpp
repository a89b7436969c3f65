#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "patdraft/date.hpp"
#include "patdraft/errors.hpp"
#include "patdraft/hash.hpp"
#include "patdraft/matcher.hpp"
#include "patdraft/records.hpp"

namespace patdraft {

/// Candidate retrieval window and author constraints for one patent.
struct CandidateQuery {
  std::vector<std::string> inventor_names;
  Date date_lo;
  Date date_hi;
  std::string endpoint_url;
};

/// Endpoint-specific query wording; both parts are overridable. The main
/// template takes {{name_clauses}}, {{date_lo}}, {{date_hi}}; the name
/// clause template takes {{name}} and {{i}} (a unique variable suffix).
struct QueryTemplate {
  std::string main;
  std::string name_clause;

  static QueryTemplate defaults();
};

inline QueryTemplate QueryTemplate::defaults() {
  QueryTemplate t;
  t.main =
      "PREFIX dct: <http://purl.org/dc/terms/>\n"
      "PREFIX foaf: <http://xmlns.com/foaf/0.1/>\n"
      "PREFIX soa: <https://semopenalex.org/ontology/>\n"
      "PREFIX xsd: <http://www.w3.org/2001/XMLSchema#>\n"
      "\n"
      "SELECT DISTINCT ?paper ?title ?abstract ?date ?license ?authorName ?alias WHERE {\n"
      "  ?paper dct:title ?title ;\n"
      "         dct:abstract ?abstract ;\n"
      "         dct:date ?date ;\n"
      "         dct:creator ?author .\n"
      "  ?author foaf:name ?authorName .\n"
      "  OPTIONAL { ?author soa:alternativeName ?alias . }\n"
      "  OPTIONAL { ?paper dct:license ?license . }\n"
      "{{name_clauses}}"
      "  FILTER(?date >= \"{{date_lo}}\"^^xsd:date && ?date <= \"{{date_hi}}\"^^xsd:date)\n"
      "}\n";
  t.name_clause =
      "  { ?paper dct:creator ?person{{i}} .\n"
      "    ?person{{i}} foaf:name|soa:alternativeName \"{{name}}\" . }\n";
  return t;
}

struct BuiltQuery {
  CandidateQuery query;
  std::string text;
};

namespace harvest_detail {

inline std::string replace_all(std::string text, std::string_view key, std::string_view value) {
  std::string needle = "{{" + std::string(key) + "}}";
  size_t pos = 0;
  while ((pos = text.find(needle, pos)) != std::string::npos) {
    text.replace(pos, needle.size(), value);
    pos += value.size();
  }
  return text;
}

inline std::string escape_literal(const std::string& value) {
  std::string out;
  for (char c : value) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

}  // namespace harvest_detail

/// Builds the candidate query for one patent: one name clause per inventor
/// and the date window [application date - 1 year, application date + 2
/// years]. Patents with fewer than two inventors are rejected because the
/// author-overlap signal is too weak for them.
inline BuiltQuery build_candidate_query(const PatentRecord& patent,
                                        const std::string& endpoint_url,
                                        const QueryTemplate& tmpl = QueryTemplate::defaults(),
                                        const Thresholds& thresholds = {}) {
  if (patent.inventors.size() < 2)
    throw TooFewInventors("patent " + patent.patent_id + " has " +
                          std::to_string(patent.inventors.size()) +
                          " inventor(s); at least 2 required");
  BuiltQuery built;
  built.query.inventor_names = patent.inventors;
  built.query.date_lo = add_years(patent.application_date, -thresholds.grace_before_years);
  built.query.date_hi = add_years(patent.application_date, thresholds.window_after_years);
  built.query.endpoint_url = endpoint_url;

  std::string clauses;
  for (size_t i = 0; i < patent.inventors.size(); ++i) {
    std::string clause = harvest_detail::replace_all(tmpl.name_clause, "i", std::to_string(i));
    clauses += harvest_detail::replace_all(clause, "name",
                                           harvest_detail::escape_literal(patent.inventors[i]));
  }
  std::string text = harvest_detail::replace_all(tmpl.main, "name_clauses", clauses);
  text = harvest_detail::replace_all(text, "date_lo", to_string(built.query.date_lo));
  built.text = harvest_detail::replace_all(text, "date_hi", to_string(built.query.date_hi));
  return built;
}

/// SPARQL-over-HTTP transport: POST the query, return the response body
/// (SPARQL JSON results). Throws TransportError on failure.
class SparqlClient {
public:
  virtual ~SparqlClient() = default;
  virtual std::string post(const std::string& endpoint_url, const std::string& query) = 0;
};

/// Canned transport for tests: returns a fixed body after optionally
/// failing the first `fail_times` calls.
class ScriptedSparqlClient : public SparqlClient {
public:
  explicit ScriptedSparqlClient(std::string body, size_t fail_times = 0)
      : body_(std::move(body)), fail_times_(fail_times) {}

  std::string post(const std::string& endpoint_url, const std::string& query) override {
    (void)endpoint_url;
    ++calls_;
    last_query_ = query;
    if (fail_times_ > 0) {
      --fail_times_;
      throw TransportError("scripted transport failure");
    }
    return body_;
  }

  size_t calls() const { return calls_; }
  const std::string& last_query() const { return last_query_; }

private:
  std::string body_;
  size_t fail_times_;
  size_t calls_ = 0;
  std::string last_query_;
};

struct RetryPolicy {
  int max_attempts = 3;
  int initial_backoff_ms = 100;
};

namespace harvest_detail {

inline std::string uri_tail(const std::string& uri) {
  size_t slash = uri.find_last_of('/');
  if (slash == std::string::npos || slash + 1 == uri.size()) return uri;
  return uri.substr(slash + 1);
}

inline std::string binding_value(const nlohmann::json& binding, const char* var) {
  if (!binding.contains(var)) return "";
  const auto& cell = binding[var];
  if (!cell.is_object() || !cell.contains("value"))
    throw MalformedResponse(std::string("binding for '") + var + "' has no value");
  return cell["value"].get<std::string>();
}

}  // namespace harvest_detail

/// Parses a SPARQL JSON results document into paper records. Bindings are
/// grouped by the ?paper variable; author aliases accumulate per author
/// name. A missing license binding yields Unknown.
inline std::vector<PaperRecord> parse_sparql_results(const std::string& body) {
  nlohmann::json j = nlohmann::json::parse(body, nullptr, false);
  if (j.is_discarded()) throw MalformedResponse("response is not valid JSON");
  if (!j.contains("results") || !j["results"].contains("bindings") ||
      !j["results"]["bindings"].is_array())
    throw MalformedResponse("response has no results.bindings array");

  std::vector<PaperRecord> papers;
  std::unordered_map<std::string, size_t> index_of;
  for (const auto& binding : j["results"]["bindings"]) {
    std::string uri = harvest_detail::binding_value(binding, "paper");
    if (uri.empty()) throw MalformedResponse("binding has no paper variable");
    std::string id = harvest_detail::uri_tail(uri);
    size_t idx;
    auto it = index_of.find(id);
    if (it == index_of.end()) {
      PaperRecord paper;
      paper.paper_id = id;
      paper.title = harvest_detail::binding_value(binding, "title");
      paper.abstract = harvest_detail::binding_value(binding, "abstract");
      std::string date = harvest_detail::binding_value(binding, "date");
      if (!date.empty()) {
        try {
          paper.publication_date = parse_date(std::string_view(date).substr(0, 10));
        } catch (const SchemaError&) {
          throw MalformedResponse("unparsable date in binding: '" + date + "'");
        }
      }
      paper.license = parse_license(harvest_detail::binding_value(binding, "license"));
      idx = papers.size();
      index_of.emplace(id, idx);
      papers.push_back(std::move(paper));
    } else {
      idx = it->second;
    }
    std::string author = harvest_detail::binding_value(binding, "authorName");
    if (author.empty()) continue;
    std::string alias = harvest_detail::binding_value(binding, "alias");
    PaperRecord& paper = papers[idx];
    PersonRef* person = nullptr;
    for (auto& a : paper.authors)
      if (a.name == author) person = &a;
    if (person == nullptr) {
      paper.authors.push_back(PersonRef::with_aliases(author, {}));
      person = &paper.authors.back();
    }
    if (!alias.empty()) {
      bool present = false;
      for (const auto& existing : person->aliases)
        if (existing == alias) present = true;
      if (!present) person->aliases.push_back(alias);
    }
  }
  return papers;
}

/// Runs the query against the endpoint with bounded retries (exponential
/// backoff) and parses the results. Throws TransportError when every
/// attempt fails, MalformedResponse on unparsable bodies.
inline std::vector<PaperRecord> fetch_candidates(const CandidateQuery& query,
                                                 const std::string& query_text,
                                                 SparqlClient& transport,
                                                 const RetryPolicy& retry = {}) {
  std::string body;
  int backoff = retry.initial_backoff_ms;
  for (int attempt = 1;; ++attempt) {
    try {
      body = transport.post(query.endpoint_url, query_text);
      break;
    } catch (const TransportError&) {
      if (attempt >= retry.max_attempts)
        throw TransportError("endpoint unreachable after " + std::to_string(attempt) +
                             " attempts: " + query.endpoint_url);
      if (backoff > 0) std::this_thread::sleep_for(std::chrono::milliseconds(backoff));
      backoff *= 2;
    }
  }
  return parse_sparql_results(body);
}

/// On-disk candidate cache keyed by patent id, so repeated runs are
/// reproducible offline. Writes go through a temp file plus rename.
class CandidateCache {
public:
  explicit CandidateCache(std::string dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
  }

  std::optional<std::vector<PaperRecord>> load(const std::string& patent_id) const {
    std::ifstream in(path_for(patent_id));
    if (!in) return std::nullopt;
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_array()) return std::nullopt;
    std::vector<PaperRecord> papers;
    for (const auto& entry : j) papers.push_back(paper_from_json(entry));
    return papers;
  }

  void store(const std::string& patent_id, const std::vector<PaperRecord>& papers) const {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& paper : papers) j.push_back(to_json(paper));
    std::string final_path = path_for(patent_id);
    std::string tmp_path = final_path + ".tmp";
    {
      std::ofstream out(tmp_path);
      if (!out) throw IoError("cannot write cache entry: " + tmp_path);
      out << j.dump() << '\n';
    }
    std::filesystem::rename(tmp_path, final_path);
  }

private:
  std::string path_for(const std::string& patent_id) const {
    return dir_ + "/" + fnv1a64_hex(patent_id) + ".json";
  }

  std::string dir_;
};

template <typename T>
struct IngestResult {
  std::vector<T> records;
  std::vector<std::string> diagnostics;
};

/// Reads line-delimited patent records. Malformed lines are reported with
/// their line numbers and skipped; an unreadable file is an IoError.
inline IngestResult<PatentRecord> ingest_patent_metadata(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open patent metadata file: " + path);
  IngestResult<PatentRecord> result;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      result.diagnostics.push_back("line " + std::to_string(line_no) + ": not valid JSON");
      continue;
    }
    try {
      result.records.push_back(patent_from_json(j));
    } catch (const Error& e) {
      result.diagnostics.push_back("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return result;
}

}  // namespace patdraft
