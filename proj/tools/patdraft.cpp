// Command-line driver for the patent drafting pipeline: candidate
// harvesting, pair matching, outline generation, chunk planning, draft
// generation, evaluation, training-data export and dataset splits.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "patdraft/document.hpp"
#include "patdraft/evaluate.hpp"
#include "patdraft/generation.hpp"
#include "patdraft/harvest.hpp"
#include "patdraft/http_clients.hpp"
#include "patdraft/llm.hpp"
#include "patdraft/manifest.hpp"
#include "patdraft/matcher.hpp"
#include "patdraft/outline.hpp"
#include "patdraft/pipeline.hpp"
#include "patdraft/sft.hpp"
#include "patdraft/split.hpp"

namespace {

using namespace patdraft;

struct LlmFlags {
  std::string endpoint;
  std::string mock_script;
  std::string model = "default";
  int max_inflight = 4;
};

void add_llm_flags(CLI::App* cmd, LlmFlags& flags) {
  cmd->add_option("--llm-endpoint", flags.endpoint, "Chat-completions endpoint URL");
  cmd->add_option("--mock-script", flags.mock_script,
                  "Deterministic mock client script (JSON)");
  cmd->add_option("--model", flags.model, "Model identifier sent to the endpoint");
  cmd->add_option("--max-inflight", flags.max_inflight, "In-flight request bound");
}

std::unique_ptr<LanguageModelClient> make_llm(const LlmFlags& flags) {
  if (!flags.mock_script.empty()) {
    auto client = std::make_unique<ScriptedLlmClient>();
    client->load_file(flags.mock_script);
    return client;
  }
  if (!flags.endpoint.empty())
    return std::make_unique<HttpLlmClient>(flags.endpoint, flags.max_inflight);
  throw ConfigError("either --llm-endpoint or --mock-script is required");
}

struct TokenizerFlags {
  std::string vocab_path;
};

void add_tokenizer_flags(CLI::App* cmd, TokenizerFlags& flags) {
  cmd->add_option("--vocab", flags.vocab_path,
                  "Subword vocabulary file (one subword per line); default tokenizer "
                  "splits on whitespace and punctuation");
}

Tokenizer make_tokenizer(const TokenizerFlags& flags) {
  if (!flags.vocab_path.empty()) return Tokenizer::subword_from_file(flags.vocab_path);
  return Tokenizer::whitespace_punct();
}

void add_generation_flags(CLI::App* cmd, GenerationConfig& cfg) {
  cmd->add_option("--max-seq", cfg.max_seq, "Maximum sequence length in tokens");
  cmd->add_option("--temperature", cfg.temperature, "Sampling temperature");
  cmd->add_option("--instruction-budget", cfg.instruction_budget,
                  "Tokens reserved for the instruction");
  cmd->add_option("--chars-per-token", cfg.chars_per_token,
                  "Character-to-token ratio for length estimates");
}

PromptTemplates load_templates(const std::string& dir) {
  if (dir.empty()) return PromptTemplates::defaults();
  return PromptTemplates::load_dir(dir);
}

std::string hash_effective_config(const CLI::App& app) {
  return fnv1a64_hex(app.config_to_str(true, false));
}

std::vector<std::string> blacklist_from(const std::string& path) {
  if (path.empty()) return default_metadata_blacklist();
  return load_blacklist(path);
}

void print_diagnostics(const std::vector<std::string>& diagnostics) {
  for (const auto& d : diagnostics) std::cerr << "warning: " << d << '\n';
}

int cmd_harvest(const CLI::App& app, const std::string& patents_path,
                const std::string& endpoint, const std::string& cache_dir, bool offline,
                const std::string& template_path, const std::string& out_dir, size_t workers) {
  RunManifest manifest;
  manifest.command = "harvest";
  manifest.started_at = now_iso8601();
  manifest.config_hash = hash_effective_config(app);
  manifest.tokenizer = "n/a";
  manifest.add_input("patents", patents_path);

  QueryTemplate tmpl = QueryTemplate::defaults();
  if (!template_path.empty()) {
    std::ifstream in(template_path);
    if (!in) throw IoError("cannot open query template: " + template_path);
    tmpl.main.assign((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  }

  auto ingest = ingest_patent_metadata(patents_path);
  print_diagnostics(ingest.diagnostics);

  CandidateCache cache(cache_dir.empty() ? out_dir + "/cache" : cache_dir);
  HttpSparqlClient transport;

  std::vector<std::vector<PaperRecord>> results(ingest.records.size());
  std::vector<std::string> diagnostics(ingest.records.size());
  parallel_for(ingest.records.size(), workers, [&](size_t i) {
    const PatentRecord& patent = ingest.records[i];
    try {
      BuiltQuery built = build_candidate_query(patent, endpoint, tmpl);
      if (auto cached = cache.load(patent.patent_id)) {
        results[i] = std::move(*cached);
        return;
      }
      if (offline) {
        diagnostics[i] = patent.patent_id + ": not in cache and --offline given";
        return;
      }
      results[i] = fetch_candidates(built.query, built.text, transport);
      cache.store(patent.patent_id, results[i]);
    } catch (const TooFewInventors& e) {
      diagnostics[i] = e.what();
    }
  });

  std::filesystem::create_directories(out_dir);
  std::string candidates_path = out_dir + "/candidates.jsonl";
  std::ofstream out(candidates_path);
  if (!out) throw IoError("cannot write candidates: " + candidates_path);
  size_t total = 0;
  for (size_t i = 0; i < ingest.records.size(); ++i) {
    if (!diagnostics[i].empty()) std::cerr << "warning: " << diagnostics[i] << '\n';
    for (const auto& paper : results[i]) {
      nlohmann::json line;
      line["patent_id"] = ingest.records[i].patent_id;
      line["paper"] = to_json(paper);
      out << line.dump() << '\n';
      ++total;
    }
  }

  manifest.stats["patents"] = ingest.records.size();
  manifest.stats["candidates"] = total;
  manifest.finished_at = now_iso8601();
  manifest.write(out_dir);
  std::cout << total << " candidate(s) for " << ingest.records.size() << " patent(s)\n";
  return 0;
}

int cmd_match(const CLI::App& app, const std::string& patents_path,
              const std::string& candidates_path, bool separate_idf,
              const std::string& out_dir) {
  RunManifest manifest;
  manifest.command = "match";
  manifest.started_at = now_iso8601();
  manifest.config_hash = hash_effective_config(app);
  manifest.tokenizer = "n/a";
  manifest.add_input("patents", patents_path);
  manifest.add_input("candidates", candidates_path);

  auto ingest = ingest_patent_metadata(patents_path);
  print_diagnostics(ingest.diagnostics);

  std::ifstream in(candidates_path);
  if (!in) throw IoError("cannot open candidates file: " + candidates_path);
  std::vector<CandidateRecord> candidates;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.contains("patent_id") || !j.contains("paper")) {
      std::cerr << "warning: line " << line_no << ": invalid candidate record\n";
      continue;
    }
    candidates.push_back({j["patent_id"].get<std::string>(), paper_from_json(j["paper"])});
  }

  MatchConfig config;
  config.joint_idf = !separate_idf;
  MatchResult result = match_pipeline(ingest.records, candidates, config);

  std::filesystem::create_directories(out_dir);
  std::string pairs_path = out_dir + "/pairs.jsonl";
  std::ofstream out(pairs_path);
  if (!out) throw IoError("cannot write pairs: " + pairs_path);
  for (const auto& pair : result.pairs) {
    nlohmann::json j;
    j["patent_id"] = pair.patent_id;
    j["paper_id"] = pair.paper_id;
    j["scores"] = to_json(pair.scores);
    out << j.dump() << '\n';
  }

  manifest.stats["stage_counts"] = to_json(result.counts);
  manifest.finished_at = now_iso8601();
  manifest.write(out_dir);
  std::cout << "stage counts: " << result.counts.authors_date << " -> "
            << result.counts.term_overlap << " -> " << result.counts.distinctiveness << " -> "
            << result.counts.license << '\n';
  return 0;
}

int cmd_outline(const CLI::App& app, const std::string& patents_path,
                const std::string& granularity_label, const LlmFlags& llm_flags,
                const std::string& summary_template_path, const std::string& blacklist_path,
                const std::string& out_dir, size_t workers) {
  RunManifest manifest;
  manifest.command = "outline";
  manifest.started_at = now_iso8601();
  manifest.config_hash = hash_effective_config(app);
  manifest.tokenizer = "n/a";
  manifest.models["llm"] = llm_flags.model;
  manifest.add_input("patents", patents_path);

  Granularity granularity = parse_granularity(granularity_label);
  auto ingest = ingest_patent_metadata(patents_path);
  print_diagnostics(ingest.diagnostics);
  clean_patent_bodies(ingest.records, blacklist_from(blacklist_path));
  auto llm = make_llm(llm_flags);

  OutlineOptions options;
  options.model = llm_flags.model;
  if (!summary_template_path.empty()) {
    std::ifstream in(summary_template_path);
    if (!in) throw IoError("cannot open summary template: " + summary_template_path);
    options.summary_template.assign((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
  }

  std::filesystem::create_directories(out_dir);
  parallel_for(ingest.records.size(), workers, [&](size_t i) {
    const PatentRecord& patent = ingest.records[i];
    Outline outline = generate_outline(patent.body, granularity, *llm, options);
    outline.doc_id = patent.patent_id;
    std::string base = out_dir + "/" + outline_basename(patent.patent_id, granularity.label);
    save_outline(outline, base + ".md", base + ".lengths.json");
  });

  manifest.stats["patents"] = ingest.records.size();
  manifest.stats["granularity"] = granularity.label;
  manifest.finished_at = now_iso8601();
  manifest.write(out_dir);
  std::cout << ingest.records.size() << " outline(s) written to " << out_dir << '\n';
  return 0;
}

int cmd_chunk_plan(const CLI::App& app, const std::string& outlines_dir,
                   const std::string& granularity_label, const GenerationConfig& cfg,
                   const std::string& out_dir) {
  RunManifest manifest;
  manifest.command = "chunk-plan";
  manifest.started_at = now_iso8601();
  manifest.config_hash = hash_effective_config(app);
  manifest.tokenizer = "n/a";

  Granularity granularity = parse_granularity(granularity_label);
  TokenBudgets budgets = allocate_tokens(cfg);

  std::vector<std::filesystem::path> outline_files;
  std::string suffix = "." + granularity.label + ".md";
  for (const auto& entry : std::filesystem::directory_iterator(outlines_dir)) {
    std::string name = entry.path().filename().string();
    if (name.size() > suffix.size() &&
        name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0)
      outline_files.push_back(entry.path());
  }
  std::sort(outline_files.begin(), outline_files.end());

  std::filesystem::create_directories(out_dir);
  std::string plans_path = out_dir + "/chunk_plans.jsonl";
  std::ofstream out(plans_path);
  if (!out) throw IoError("cannot write chunk plans: " + plans_path);
  for (const auto& path : outline_files) {
    std::string md = path.string();
    std::string sidecar = md.substr(0, md.size() - 3) + ".lengths.json";
    // <patent_id>.<granularity>.md
    std::string stem = path.filename().string();
    stem = stem.substr(0, stem.size() - suffix.size());
    Outline outline = load_outline(md, sidecar);
    ChunkPlan plan = chunk_outline(outline, budgets.output_budget, cfg);
    nlohmann::json chunks = nlohmann::json::array();
    for (const auto& chunk : plan.chunks) {
      nlohmann::json slices = nlohmann::json::array();
      for (const auto& slice : chunk.slices)
        slices.push_back({{"path", slice.path},
                          {"bullet_begin", slice.bullet_begin},
                          {"bullet_end", slice.bullet_end},
                          {"partial", slice.partial},
                          {"est_tokens", slice.est_tokens}});
      chunks.push_back({{"slices", std::move(slices)},
                        {"output_budget", chunk.output_budget},
                        {"is_section_split", chunk.is_section_split}});
    }
    nlohmann::json record;
    record["patent_id"] = stem;
    record["chunks"] = std::move(chunks);
    out << record.dump() << '\n';
  }

  manifest.stats["outlines"] = outline_files.size();
  manifest.stats["output_budget"] = budgets.output_budget;
  manifest.finished_at = now_iso8601();
  manifest.write(out_dir);
  std::cout << outline_files.size() << " chunk plan(s) written to " << plans_path << '\n';
  return 0;
}

int cmd_generate(const CLI::App& app, GeneratePipelineOptions options,
                 const LlmFlags& llm_flags) {
  options.config_hash = hash_effective_config(app);
  options.config.model = llm_flags.model;
  auto llm = make_llm(llm_flags);
  auto result = run_generate_pipeline(options, *llm);
  print_diagnostics(result.diagnostics);
  std::cout << result.drafts_written << " draft(s) written to " << options.out_dir
            << "/drafts\n";
  return 0;
}

int cmd_evaluate(const CLI::App& app, EvaluatePipelineOptions options,
                 const std::string& embed_endpoint, bool mock_embedder) {
  options.config_hash = hash_effective_config(app);
  std::unique_ptr<EmbeddingClient> embedder;
  if (mock_embedder)
    embedder = std::make_unique<HashEmbeddingClient>();
  else if (!embed_endpoint.empty())
    embedder = std::make_unique<HttpEmbeddingClient>(embed_endpoint);
  options.eval.embedder = embedder.get();
  auto result = run_evaluate_pipeline(options);
  print_diagnostics(result.diagnostics);
  std::cout << result.pair_evals.size() << " pair(s) evaluated; report at " << options.out_dir
            << "/eval.jsonl\n";
  if (result.pair_evals.size() < result.pairs_total) {
    std::cerr << "error: " << (result.pairs_total - result.pair_evals.size())
              << " pair(s) could not be evaluated\n";
    return 1;
  }
  return 0;
}

int cmd_export_sft(const CLI::App& app, const std::string& pairs_path,
                   const std::string& patents_path, const std::string& papers_path,
                   const std::string& outlines_dir, const std::string& granularity_label,
                   const std::string& retriever_label, const GenerationConfig& cfg,
                   const std::string& templates_dir, const TokenizerFlags& tokenizer_flags,
                   const std::string& blacklist_path, const std::string& out_dir) {
  RunManifest manifest;
  manifest.command = "export-sft";
  manifest.started_at = now_iso8601();
  manifest.config_hash = hash_effective_config(app);
  manifest.add_input("pairs", pairs_path);
  manifest.add_input("patents", patents_path);
  manifest.add_input("papers", papers_path);

  Granularity granularity = parse_granularity(granularity_label);
  RetrieverKind retriever = parse_retriever(retriever_label);
  Tokenizer tokenizer = make_tokenizer(tokenizer_flags);
  manifest.tokenizer = tokenizer.name();
  PromptTemplates templates = load_templates(templates_dir);

  auto pairs = read_pairs_file(pairs_path);
  auto patents = ingest_patent_metadata(patents_path);
  print_diagnostics(patents.diagnostics);
  clean_patent_bodies(patents.records, blacklist_from(blacklist_path));
  auto papers = read_papers_file(papers_path);

  std::map<std::string, const PatentRecord*> patent_by_id;
  for (const auto& p : patents.records) patent_by_id[p.patent_id] = &p;
  std::map<std::string, const PaperRecord*> paper_by_id;
  for (const auto& p : papers) paper_by_id[p.paper_id] = &p;

  std::vector<SftPair> sft_pairs;
  for (const auto& pair : pairs) {
    auto patent_it = patent_by_id.find(pair.patent_id);
    auto paper_it = paper_by_id.find(pair.paper_id);
    if (patent_it == patent_by_id.end() || paper_it == paper_by_id.end()) {
      std::cerr << "warning: pair " << pair.patent_id << ":" << pair.paper_id
                << " references unknown records; skipped\n";
      continue;
    }
    std::string base = outlines_dir + "/" + outline_basename(pair.patent_id, granularity.label);
    SftPair sft_pair;
    sft_pair.patent = *patent_it->second;
    sft_pair.paper = *paper_it->second;
    sft_pair.outline = load_outline(base + ".md", base + ".lengths.json");
    sft_pairs.push_back(std::move(sft_pair));
  }

  std::filesystem::create_directories(out_dir);
  size_t records =
      export_sft_dataset(sft_pairs, retriever, cfg, templates, tokenizer, out_dir + "/sft.jsonl");

  manifest.stats["pairs"] = sft_pairs.size();
  manifest.stats["records"] = records;
  manifest.stats["retriever"] = retriever_label;
  manifest.finished_at = now_iso8601();
  manifest.write(out_dir);
  std::cout << records << " training record(s) written to " << out_dir << "/sft.jsonl\n";
  return 0;
}

int cmd_split(const CLI::App& app, const std::string& pairs_path,
              const std::string& patents_path, const std::string& cutoff_text,
              const SplitSizes& sizes, uint64_t seed, const std::string& out_dir) {
  RunManifest manifest;
  manifest.command = "split";
  manifest.started_at = now_iso8601();
  manifest.config_hash = hash_effective_config(app);
  manifest.tokenizer = "n/a";
  manifest.seed = seed;
  manifest.add_input("pairs", pairs_path);
  manifest.add_input("patents", patents_path);

  auto pairs = read_pairs_file(pairs_path);
  auto patents = ingest_patent_metadata(patents_path);
  print_diagnostics(patents.diagnostics);
  std::map<std::string, Date> date_by_id;
  for (const auto& p : patents.records) date_by_id[p.patent_id] = p.application_date;

  std::vector<PairRef> refs;
  for (const auto& pair : pairs) {
    auto it = date_by_id.find(pair.patent_id);
    if (it == date_by_id.end()) {
      std::cerr << "warning: pair " << pair.patent_id << ":" << pair.paper_id
                << " has no patent record; skipped\n";
      continue;
    }
    refs.push_back({pair.patent_id, pair.paper_id, it->second, pair.domain});
  }

  Date cutoff = parse_date(cutoff_text);
  SplitSpec spec = split_with_cutoff(refs, sizes, cutoff, seed);

  std::filesystem::create_directories(out_dir);
  std::string splits_path = out_dir + "/splits.json";
  std::ofstream out(splits_path);
  if (!out) throw IoError("cannot write splits: " + splits_path);
  out << to_json(spec).dump(2) << '\n';

  manifest.stats["train"] = spec.train.size();
  manifest.stats["val"] = spec.val.size();
  manifest.stats["test"] = spec.test.size();
  manifest.stats["nc_test"] = spec.nc_test.size();
  manifest.finished_at = now_iso8601();
  manifest.write(out_dir);
  std::cout << "splits: train=" << spec.train.size() << " val=" << spec.val.size()
            << " test=" << spec.test.size() << " nc-test=" << spec.nc_test.size() << '\n';
  return 0;
}

void print_stats_table(const std::map<std::string, MetricStats>& stats, const std::string& head) {
  std::printf("%s\n", head.c_str());
  for (const auto& [name, s] : stats)
    std::printf("  %-18s %10.4f +/- %.4f  (n=%zu)\n", name.c_str(), s.mean, s.stddev, s.n);
}

int cmd_report(const std::string& eval_path) {
  std::ifstream in(eval_path);
  if (!in) throw IoError("cannot open evaluation report: " + eval_path);
  std::vector<PairEval> pairs;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || j.value("aggregate", false) || !j.contains("metrics")) continue;
    PairEval pair;
    pair.patent_id = j.value("patent_id", "");
    pair.paper_id = j.value("paper_id", "");
    pair.domain = j.value("domain", "");
    const auto& m = j["metrics"];
    pair.report.rouge_l_f1 = m.value("rouge_l_f1", 0.0);
    if (m.contains("embed_f1")) pair.report.embed_f1 = m["embed_f1"].get<double>();
    pair.report.token_ratio = m.value("token_ratio", 0.0);
    pair.report.repetition_rate = m.value("repetition_rate", 0.0);
    pair.report.lcs_words = m.value("lcs_words", size_t{0});
    pair.report.fourgram_overlap = m.value("fourgram_overlap", 0.0);
    pairs.push_back(std::move(pair));
  }
  AggregateReport report = aggregate(pairs);
  print_stats_table(report.metrics, "all pairs (n=" + std::to_string(pairs.size()) + ")");
  for (const auto& [domain, table] : report.by_domain)
    print_stats_table(table, "domain: " + domain);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Patent drafting pipeline"};
  app.set_config("--config", "", "Declarative configuration file (INI; sections per command)");
  app.require_subcommand(1);

  size_t workers = 1;
  uint64_t seed = 0;

  // harvest
  auto* harvest = app.add_subcommand("harvest", "Fetch candidate papers per patent");
  std::string h_patents, h_endpoint, h_cache, h_template, h_out = "out/harvest";
  bool h_offline = false;
  harvest->add_option("--patents", h_patents, "Patent records (JSONL)")->required();
  harvest->add_option("--endpoint", h_endpoint, "SPARQL endpoint URL");
  harvest->add_option("--cache", h_cache, "Candidate cache directory");
  harvest->add_flag("--offline", h_offline, "Serve results from the cache only");
  harvest->add_option("--query-template", h_template, "SPARQL query template override");
  harvest->add_option("--out", h_out, "Output directory");
  harvest->add_option("--workers", workers, "Concurrent requests");

  // match
  auto* match = app.add_subcommand("match", "Filter candidate pairs");
  std::string m_patents, m_candidates, m_out = "out/match";
  bool m_separate_idf = false;
  match->add_option("--patents", m_patents, "Patent records (JSONL)")->required();
  match->add_option("--candidates", m_candidates, "Candidate records (JSONL)")->required();
  match->add_flag("--separate-idf", m_separate_idf,
                  "Separate IDF models for titles and abstracts");
  match->add_option("--out", m_out, "Output directory");

  // outline
  auto* outline = app.add_subcommand("outline", "Generate patent outlines");
  std::string o_patents, o_granularity = "long", o_summary_template, o_out = "out/outlines";
  std::string o_blacklist;
  LlmFlags o_llm;
  outline->add_option("--patents", o_patents, "Patent records (JSONL)")->required();
  outline->add_option("--granularity", o_granularity, "short|medium|long");
  outline->add_option("--summary-template", o_summary_template, "Summary prompt template file");
  outline->add_option("--blacklist", o_blacklist,
                      "Metadata-section blacklist file (one heading per line)");
  outline->add_option("--out", o_out, "Output directory");
  outline->add_option("--workers", workers, "Concurrent patents");
  add_llm_flags(outline, o_llm);

  // chunk-plan
  auto* chunk_plan = app.add_subcommand("chunk-plan", "Plan outline chunks");
  std::string c_outlines, c_granularity = "long", c_out = "out/chunk-plan";
  GenerationConfig c_cfg;
  chunk_plan->add_option("--outlines", c_outlines, "Outline directory")->required();
  chunk_plan->add_option("--granularity", c_granularity, "short|medium|long");
  chunk_plan->add_option("--out", c_out, "Output directory");
  add_generation_flags(chunk_plan, c_cfg);

  // generate
  auto* generate = app.add_subcommand("generate", "Draft patents from outlines");
  GeneratePipelineOptions g_options;
  g_options.out_dir = "out/generate";
  std::string g_retriever = "bm25", g_templates_dir, g_blacklist;
  LlmFlags g_llm;
  TokenizerFlags g_tokenizer;
  generate->add_option("--pairs", g_options.pairs_path, "Pair records (JSONL)")->required();
  generate->add_option("--patents", g_options.patents_path, "Patent records (JSONL)")->required();
  generate->add_option("--papers", g_options.papers_path, "Paper records (JSONL)")->required();
  generate->add_option("--outlines", g_options.outlines_dir, "Outline directory")->required();
  generate->add_option("--granularity", g_options.granularity, "short|medium|long");
  generate->add_option("--retriever", g_retriever, "noPaper|abstractOnly|bm25|bm25oracle");
  generate->add_option("--templates", g_templates_dir, "Prompt template directory");
  generate->add_option("--blacklist", g_blacklist,
                       "Metadata-section blacklist file (one heading per line)");
  generate->add_option("--out", g_options.out_dir, "Output directory");
  generate->add_option("--workers", workers, "Concurrent patents");
  generate->add_option("--seed", seed, "Run seed recorded in the manifest");
  add_generation_flags(generate, g_options.config);
  add_llm_flags(generate, g_llm);
  add_tokenizer_flags(generate, g_tokenizer);

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Score drafts against originals");
  EvaluatePipelineOptions e_options;
  e_options.out_dir = "out/evaluate";
  std::string e_embed_endpoint, e_blacklist;
  bool e_mock_embedder = false;
  TokenizerFlags e_tokenizer;
  evaluate->add_option("--pairs", e_options.pairs_path, "Pair records (JSONL)")->required();
  evaluate->add_option("--patents", e_options.patents_path, "Patent records (JSONL)")->required();
  evaluate->add_option("--drafts", e_options.drafts_dir, "Draft directory")->required();
  evaluate->add_option("--out", e_options.out_dir, "Output directory");
  evaluate->add_option("--rr-window", e_options.eval.rr_window, "Repetition-rate window (tokens)");
  evaluate->add_option("--embed-chunk", e_options.eval.embed_chunk, "Embedding chunk (tokens)");
  evaluate->add_option("--embed-overlap", e_options.eval.embed_overlap,
                       "Embedding chunk overlap (tokens)");
  evaluate->add_option("--embed-endpoint", e_embed_endpoint, "Token embedding endpoint URL");
  evaluate->add_flag("--mock-embedder", e_mock_embedder, "Deterministic offline embedder");
  evaluate->add_option("--blacklist", e_blacklist,
                       "Metadata-section blacklist file (one heading per line)");
  evaluate->add_option("--workers", workers, "Concurrent pairs");
  add_tokenizer_flags(evaluate, e_tokenizer);

  // export-sft
  auto* export_sft = app.add_subcommand("export-sft", "Export chunk-aligned training data");
  std::string x_pairs, x_patents, x_papers, x_outlines, x_granularity = "long";
  std::string x_retriever = "bm25", x_templates_dir, x_blacklist, x_out = "out/sft";
  GenerationConfig x_cfg;
  TokenizerFlags x_tokenizer;
  export_sft->add_option("--pairs", x_pairs, "Pair records (JSONL)")->required();
  export_sft->add_option("--patents", x_patents, "Patent records (JSONL)")->required();
  export_sft->add_option("--papers", x_papers, "Paper records (JSONL)")->required();
  export_sft->add_option("--outlines", x_outlines, "Outline directory")->required();
  export_sft->add_option("--granularity", x_granularity, "short|medium|long");
  export_sft->add_option("--retriever", x_retriever, "noPaper|abstractOnly|bm25|bm25oracle");
  export_sft->add_option("--templates", x_templates_dir, "Prompt template directory");
  export_sft->add_option("--blacklist", x_blacklist,
                         "Metadata-section blacklist file (one heading per line)");
  export_sft->add_option("--out", x_out, "Output directory");
  add_generation_flags(export_sft, x_cfg);
  add_tokenizer_flags(export_sft, x_tokenizer);

  // split
  auto* split = app.add_subcommand("split", "Create dataset splits");
  std::string s_pairs, s_patents, s_cutoff = "2024-01-01", s_out = "out/split";
  SplitSizes s_sizes;
  split->add_option("--pairs", s_pairs, "Pair records (JSONL)")->required();
  split->add_option("--patents", s_patents, "Patent records (JSONL)")->required();
  split->add_option("--cutoff", s_cutoff, "nc-test cutoff date (YYYY-MM-DD)");
  split->add_option("--train", s_sizes.train, "Train split size")->required();
  split->add_option("--val", s_sizes.val, "Validation split size")->required();
  split->add_option("--test", s_sizes.test, "Test split size")->required();
  split->add_option("--seed", seed, "Shuffle seed");
  split->add_option("--out", s_out, "Output directory");

  // report
  auto* report = app.add_subcommand("report", "Print aggregate metrics from eval.jsonl");
  std::string r_eval;
  report->add_option("--eval", r_eval, "Evaluation report (JSONL)")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(harvest))
      return cmd_harvest(app, h_patents, h_endpoint, h_cache, h_offline, h_template, h_out,
                         workers);
    if (app.got_subcommand(match))
      return cmd_match(app, m_patents, m_candidates, m_separate_idf, m_out);
    if (app.got_subcommand(outline))
      return cmd_outline(app, o_patents, o_granularity, o_llm, o_summary_template, o_blacklist,
                         o_out, workers);
    if (app.got_subcommand(chunk_plan))
      return cmd_chunk_plan(app, c_outlines, c_granularity, c_cfg, c_out);
    if (app.got_subcommand(generate)) {
      g_options.retriever = parse_retriever(g_retriever);
      g_options.templates = load_templates(g_templates_dir);
      g_options.tokenizer = make_tokenizer(g_tokenizer);
      g_options.metadata_blacklist = blacklist_from(g_blacklist);
      g_options.workers = workers;
      g_options.seed = seed;
      return cmd_generate(app, g_options, g_llm);
    }
    if (app.got_subcommand(evaluate)) {
      e_options.eval.tokenizer = make_tokenizer(e_tokenizer);
      e_options.metadata_blacklist = blacklist_from(e_blacklist);
      e_options.workers = workers;
      e_options.seed = seed;
      return cmd_evaluate(app, e_options, e_embed_endpoint, e_mock_embedder);
    }
    if (app.got_subcommand(export_sft))
      return cmd_export_sft(app, x_pairs, x_patents, x_papers, x_outlines, x_granularity,
                            x_retriever, x_cfg, x_templates_dir, x_tokenizer, x_blacklist,
                            x_out);
    if (app.got_subcommand(split))
      return cmd_split(app, s_pairs, s_patents, s_cutoff, s_sizes, seed, s_out);
    if (app.got_subcommand(report)) return cmd_report(r_eval);
  } catch (const patdraft::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
