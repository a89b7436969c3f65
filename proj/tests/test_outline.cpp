#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "patdraft/llm.hpp"
#include "patdraft/outline.hpp"

using namespace patdraft;

namespace {

SectionNode make_section(std::string title, std::vector<std::string> paragraphs,
                         std::vector<SectionNode> subsections = {}) {
  SectionNode node;
  node.title = std::move(title);
  node.paragraphs = std::move(paragraphs);
  node.subsections = std::move(subsections);
  return node;
}

std::string text_of(size_t chars) { return std::string(chars, 'x'); }

std::mt19937& rng() {
  static std::mt19937 engine(41);
  return engine;
}

OutlineNode random_outline_node(int depth) {
  std::uniform_int_distribution<int> word(0, 25);
  std::uniform_int_distribution<int> n_bullets(0, 3);
  std::uniform_int_distribution<int> n_children(0, depth > 0 ? 2 : 0);
  auto random_text = [&](int words) {
    std::string s;
    for (int w = 0; w < words; ++w) {
      if (w > 0) s.push_back(' ');
      for (int i = 0; i < 4; ++i) s.push_back(static_cast<char>('a' + word(rng())));
    }
    return s;
  };
  OutlineNode node;
  node.heading = random_text(2);
  int bullets = n_bullets(rng());
  for (int i = 0; i < bullets; ++i) node.bullets.push_back(random_text(3));
  node.desired_chars = static_cast<size_t>(word(rng())) * 100;
  int children = n_children(rng());
  for (int i = 0; i < children; ++i) node.children.push_back(random_outline_node(depth - 1));
  return node;
}

Outline random_outline() {
  Outline outline;
  outline.doc_id = "R";
  std::uniform_int_distribution<int> n_roots(1, 3);
  int roots = n_roots(rng());
  for (int i = 0; i < roots; ++i) outline.roots.push_back(random_outline_node(2));
  return outline;
}

}  // namespace

TEST_CASE("bullet_count follows the length formula") {
  CHECK(bullet_count(0, 1000) == 0);
  CHECK(bullet_count(2500, 1000) == 2);
  CHECK(bullet_count(100, 500) == 1);
  CHECK(bullet_count(499, 500) == 1);
  CHECK(bullet_count(500, 500) == 1);
  CHECK(bullet_count(1000, 500) == 2);
  CHECK(bullet_count(1, 2000) == 1);
}

TEST_CASE("granularity mapping is fixed") {
  CHECK(Granularity::long_form().chars_per_bullet == 500);
  CHECK(Granularity::medium().chars_per_bullet == 1000);
  CHECK(Granularity::short_form().chars_per_bullet == 2000);
  CHECK(parse_granularity("long").label == "long");
  CHECK(parse_granularity("short").chars_per_bullet == 2000);
  CHECK_THROWS_AS(parse_granularity("huge"), ConfigError);
}

TEST_CASE("generate_outline skips the model for empty sections") {
  DocumentTree patent;
  patent.doc_id = "P";
  patent.roots.push_back(make_section("Empty", {}));
  ScriptedLlmClient llm;
  Outline outline = generate_outline(patent, Granularity::medium(), llm);
  REQUIRE(outline.roots.size() == 1);
  CHECK(outline.roots[0].bullets.empty());
  CHECK(outline.roots[0].desired_chars == 0);
  CHECK(llm.call_count() == 0);
}

TEST_CASE("generate_outline truncates excess bullets") {
  DocumentTree patent;
  patent.doc_id = "P";
  patent.roots.push_back(make_section("S", {text_of(3000)}));  // 3 bullets at l=1000
  ScriptedLlmClient llm;
  llm.push_response("- one\n- two\n- three\n- four\n- five\n");
  Outline outline = generate_outline(patent, Granularity::medium(), llm);
  REQUIRE(outline.roots.size() == 1);
  CHECK(outline.roots[0].bullets == std::vector<std::string>{"one", "two", "three"});
  CHECK(outline.roots[0].desired_chars == 3000);
  CHECK(llm.call_count() == 1);
}

TEST_CASE("generate_outline retries on deficit then pads from sentences") {
  DocumentTree patent;
  patent.doc_id = "P";
  patent.roots.push_back(make_section(
      "S", {"First sentence here. Second sentence follows.", std::string(2955, 'x')}));
  // own chars just over 3000 -> 3 bullets at l=1000
  ScriptedLlmClient llm;
  llm.push_response("- only one\n");
  llm.push_response("- still one\n");
  llm.push_response("- again one\n");
  Outline outline = generate_outline(patent, Granularity::medium(), llm);
  REQUIRE(outline.roots.size() == 1);
  // 1 attempt + 2 retries
  CHECK(llm.call_count() == 3);
  REQUIRE(outline.roots[0].bullets.size() == 3);
  CHECK(outline.roots[0].bullets[0] == "again one");
  // padding takes paragraph-leading sentences first
  CHECK(outline.roots[0].bullets[1] == "First sentence here.");
}

TEST_CASE("generate_outline mirrors the section structure in order") {
  DocumentTree patent;
  patent.doc_id = "P";
  for (int i = 0; i < 10; ++i)
    patent.roots.push_back(make_section("S" + std::to_string(i), {text_of(100)}));
  ScriptedLlmClient llm;
  llm.set_default("- summary\n");
  Outline outline = generate_outline(patent, Granularity::long_form(), llm);
  REQUIRE(outline.roots.size() == 10);
  for (int i = 0; i < 10; ++i) {
    CHECK(outline.roots[static_cast<size_t>(i)].heading == "S" + std::to_string(i));
    CHECK(outline.roots[static_cast<size_t>(i)].bullets.size() == 1);
  }
}

TEST_CASE("desired length excludes subsections by default, flag includes them") {
  DocumentTree patent;
  patent.doc_id = "P";
  patent.roots.push_back(
      make_section("Top", {text_of(600)}, {make_section("Sub", {text_of(400)})}));
  ScriptedLlmClient llm;
  llm.set_default("- b\n");

  Outline exclusive = generate_outline(patent, Granularity::medium(), llm);
  CHECK(exclusive.roots[0].desired_chars == 600);
  CHECK(exclusive.roots[0].children[0].desired_chars == 400);

  OutlineOptions options;
  options.length_includes_subsections = true;
  Outline inclusive = generate_outline(patent, Granularity::medium(), llm, options);
  CHECK(inclusive.roots[0].desired_chars == 1000);
}

TEST_CASE("bullet totals are bounded and monotone across granularities") {
  DocumentTree patent;
  patent.doc_id = "P";
  std::mt19937 engine(43);
  std::uniform_int_distribution<int> chars(1, 5000);
  size_t total_chars = 0;
  for (int i = 0; i < 100; ++i) {
    size_t n = static_cast<size_t>(chars(engine));
    total_chars += n;
    patent.roots.push_back(make_section("S" + std::to_string(i), {text_of(n)}));
  }
  ScriptedLlmClient llm;
  llm.set_default("- b\n");

  auto bullets_at = [&](Granularity g) {
    return total_bullets(generate_outline(patent, g, llm));
  };
  size_t long_bullets = bullets_at(Granularity::long_form());
  size_t medium_bullets = bullets_at(Granularity::medium());
  size_t short_bullets = bullets_at(Granularity::short_form());

  CHECK(long_bullets >= medium_bullets);
  CHECK(medium_bullets >= short_bullets);

  auto check_bounds = [&](size_t bullets, size_t l) {
    CHECK(bullets >= 100);  // every non-empty section has at least one
    CHECK(bullets <= (total_chars + l - 1) / l + 100);
  };
  check_bounds(long_bullets, 500);
  check_bounds(medium_bullets, 1000);
  check_bounds(short_bullets, 2000);
}

TEST_CASE("render and parse outline markdown") {
  Outline outline;
  outline.doc_id = "O";
  OutlineNode top;
  top.heading = "Top";
  top.bullets = {"first bullet", "second bullet"};
  top.desired_chars = 1200;
  OutlineNode child;
  child.heading = "Child";
  child.bullets = {"inner"};
  child.desired_chars = 300;
  top.children.push_back(child);
  outline.roots.push_back(top);

  std::string md = render_outline_markdown(outline);
  CHECK(md ==
        "# Top\n- first bullet\n- second bullet\n## Child\n- inner\n");

  Outline parsed = parse_outline_markdown(md);
  apply_sidecar(parsed, outline_sidecar(outline));
  CHECK(parsed == outline);
}

TEST_CASE("empty outline renders to empty text and back") {
  Outline empty;
  CHECK(render_outline_markdown(empty).empty());
  CHECK(parse_outline_markdown("") == empty);
}

TEST_CASE("parse_outline_markdown rejects malformed input") {
  CHECK_THROWS_AS(parse_outline_markdown("- bullet before heading\n"), OutlineSyntaxError);
  CHECK_THROWS_AS(parse_outline_markdown("# A\n### level jump\n"), OutlineSyntaxError);
  CHECK_THROWS_AS(parse_outline_markdown("# A\nstray text\n"), OutlineSyntaxError);
  CHECK_THROWS_AS(parse_outline_markdown("#missing space\n"), OutlineSyntaxError);
}

TEST_CASE("fuzzed outlines round-trip through markdown plus sidecar") {
  for (int round = 0; round < 100; ++round) {
    Outline outline = random_outline();
    Outline parsed = parse_outline_markdown(render_outline_markdown(outline));
    apply_sidecar(parsed, outline_sidecar(outline));
    parsed.doc_id = outline.doc_id;
    CHECK(parsed == outline);
  }
}

TEST_CASE("outline files round-trip through save and load") {
  Outline outline = random_outline();
  std::string md = "/tmp/patdraft_test_outline.md";
  std::string side = "/tmp/patdraft_test_outline.lengths.json";
  save_outline(outline, md, side);
  Outline loaded = load_outline(md, side);
  CHECK(loaded == outline);
}

TEST_CASE("sidecar mismatches are rejected") {
  Outline outline = random_outline();
  nlohmann::json sidecar = outline_sidecar(outline);
  outline.roots[0].heading += " changed";
  CHECK_THROWS_AS(apply_sidecar(outline, sidecar), OutlineSyntaxError);
}
