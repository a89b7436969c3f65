#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "patdraft/evaluate.hpp"

using namespace patdraft;

namespace {

// embedder that maps every token to the same axis vector per text side,
// controlled by a prefix convention: tokens starting with 'z' go to a
// second orthogonal axis
class AxisEmbedder : public EmbeddingClient {
public:
  std::vector<std::vector<double>> embed(const std::vector<std::string>& tokens) override {
    std::vector<std::vector<double>> out;
    for (const auto& token : tokens) {
      std::vector<double> v(4, 0.0);
      v[token.rfind('z', 0) == 0 ? 1 : 0] = 1.0;
      out.push_back(std::move(v));
    }
    return out;
  }
};

// embedder whose vectors depend on the position inside the request,
// exposing which chunk an overlap token was taken from
class PositionEmbedder : public EmbeddingClient {
public:
  std::vector<std::vector<double>> embed(const std::vector<std::string>& tokens) override {
    std::vector<std::vector<double>> out;
    for (size_t i = 0; i < tokens.size(); ++i) {
      std::vector<double> v(2, 0.0);
      v[0] = static_cast<double>(i);
      v[1] = static_cast<double>(tokens.size());
      out.push_back(std::move(v));
    }
    return out;
  }
};

class CountingEmbedder : public EmbeddingClient {
public:
  explicit CountingEmbedder(EmbeddingClient& inner) : inner_(inner) {}
  std::vector<std::vector<double>> embed(const std::vector<std::string>& tokens) override {
    ++calls;
    return inner_.embed(tokens);
  }
  EmbeddingClient& inner_;
  int calls = 0;
};

}  // namespace

TEST_CASE("rouge_l_f1 endpoints") {
  Tokenizer tok;
  CHECK(rouge_l_f1("same text here", "same text here", tok) == doctest::Approx(1.0));
  CHECK(rouge_l_f1("aaa bbb", "ccc ddd", tok) == doctest::Approx(0.0));
  CHECK(rouge_l_f1("", "something", tok) == doctest::Approx(0.0));
  CHECK(rouge_l_f1("something", "", tok) == doctest::Approx(0.0));
}

TEST_CASE("rouge_l_f1 on the crossed-pair example") {
  // candidate "a b c d" vs reference "a c b d": LCS = 3, P = R = 3/4
  Tokenizer tok;
  CHECK(lcs_length(tok.tokenize("a b c d"), tok.tokenize("a c b d")) == 3);
  CHECK(rouge_l_f1("a b c d", "a c b d", tok) == doctest::Approx(0.75));
}

TEST_CASE("lcs_length matches the exhaustive subsequence oracle") {
  std::mt19937 rng(61);
  std::uniform_int_distribution<size_t> len(0, 10);
  for (int round = 0; round < 200; ++round) {
    auto a = oracles::random_tokens(rng, len(rng), 3, 1);
    auto b = oracles::random_tokens(rng, len(rng), 3, 1);
    CHECK(lcs_length(a, b) == oracles::lcs_subsequence_exhaustive(a, b));
  }
}

TEST_CASE("rouge_l_f1 is symmetric and 1 only for identical sequences") {
  std::mt19937 rng(67);
  std::uniform_int_distribution<size_t> len(1, 12);
  for (int round = 0; round < 100; ++round) {
    auto a = oracles::random_tokens(rng, len(rng), 3, 1);
    auto b = oracles::random_tokens(rng, len(rng), 3, 1);
    CHECK(rouge_l_f1(a, b) == doctest::Approx(rouge_l_f1(b, a)));
    if (rouge_l_f1(a, b) == doctest::Approx(1.0).epsilon(1e-12)) CHECK(a == b);
  }
}

TEST_CASE("repetition_rate endpoints") {
  std::vector<std::string> same(8, "a");
  CHECK(repetition_rate(same, 1000) == doctest::Approx(100.0));

  std::vector<std::string> distinct;
  for (int i = 0; i < 200; ++i) distinct.push_back("tok" + std::to_string(i));
  CHECK(repetition_rate(distinct, 1000) == doctest::Approx(0.0));

  CHECK_THROWS_AS(repetition_rate(std::vector<std::string>{"a", "b", "c"}, 1000), TooShort);
}

TEST_CASE("repetition_rate matches the naive recount on random texts") {
  std::mt19937 rng(71);
  std::uniform_int_distribution<size_t> len(4, 120);
  std::uniform_int_distribution<size_t> window(4, 40);
  for (int round = 0; round < 100; ++round) {
    auto tokens = oracles::random_tokens(rng, len(rng), 3, 1);
    size_t w = window(rng);
    CHECK(repetition_rate(tokens, w) ==
          doctest::Approx(oracles::repetition_rate_naive(tokens, w)).epsilon(1e-9));
  }
}

TEST_CASE("repetition_rate strictly increases under within-window duplication") {
  std::mt19937 rng(73);
  for (int round = 0; round < 30; ++round) {
    // texts with some variety so the rate starts below 100
    auto tokens = oracles::random_tokens(rng, 40, 6, 2);
    double base = repetition_rate(tokens, 100000);
    if (base >= 100.0) continue;
    std::vector<std::string> doubled = tokens;
    doubled.insert(doubled.end(), tokens.begin(), tokens.end());
    double doubled_rate = repetition_rate(doubled, 100000);
    CHECK(doubled_rate > base);
  }
}

TEST_CASE("token_ratio") {
  Tokenizer tok;
  CHECK(token_ratio("a b c", "d e f", tok) == doctest::Approx(100.0));
  CHECK(token_ratio("", "d e f", tok) == doctest::Approx(0.0));
  std::vector<std::string> cand(81, "x"), ref(162, "y");
  CHECK(token_ratio(cand, ref) == doctest::Approx(50.0));
}

TEST_CASE("fourgram_overlap endpoints and oracle equivalence") {
  Tokenizer tok;
  CHECK(fourgram_overlap("a b c d e", "a b c d e", tok) == doctest::Approx(1.0));
  CHECK(fourgram_overlap("a b c d", "e f g h", tok) == doctest::Approx(0.0));
  CHECK(fourgram_overlap("a b", "a b", tok) == doctest::Approx(0.0));  // no 4-grams

  std::mt19937 rng(79);
  std::uniform_int_distribution<size_t> len(0, 30);
  for (int round = 0; round < 100; ++round) {
    auto a = oracles::random_tokens(rng, len(rng), 3, 1);
    auto b = oracles::random_tokens(rng, len(rng), 3, 1);
    CHECK(fourgram_overlap(a, b) == doctest::Approx(oracles::fourgram_jaccard_naive(a, b)));
    CHECK(fourgram_overlap(a, b) == doctest::Approx(fourgram_overlap(b, a)));
  }
}

TEST_CASE("chunked_embedding_score is 1 for identical texts with unit vectors") {
  HashEmbeddingClient embedder(32);
  std::mt19937 rng(83);
  auto tokens = oracles::random_tokens(rng, 50, 8, 3);
  auto score = chunked_embedding_score(tokens, tokens, embedder, 512, 128);
  CHECK(score.f1 == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(score.precision == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(score.recall == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("chunked_embedding_score is 0 for orthogonal embeddings") {
  AxisEmbedder embedder;
  std::vector<std::string> cand{"alpha", "beta", "gamma"};
  std::vector<std::string> ref{"zeta", "zoo", "zone"};  // all on the other axis
  auto score = chunked_embedding_score(cand, ref, embedder, 512, 128);
  CHECK(score.f1 == doctest::Approx(0.0));
}

TEST_CASE("chunking is a no-op when the text fits one chunk") {
  HashEmbeddingClient inner(16);
  std::mt19937 rng(89);
  auto cand = oracles::random_tokens(rng, 60, 8, 3);
  auto ref = oracles::random_tokens(rng, 40, 8, 3);

  auto one = chunked_embedding_score(cand, ref, inner, 512, 128);
  auto two = chunked_embedding_score(cand, ref, inner, 64, 16);
  CHECK(one.f1 == doctest::Approx(two.f1).epsilon(1e-6));

  CountingEmbedder counting(inner);
  chunked_embedding_score(cand, ref, counting, 512, 128);
  CHECK(counting.calls == 2);  // one request per side
}

TEST_CASE("overlap tokens keep the embedding farther from a chunk edge") {
  PositionEmbedder embedder;
  // chunk 4, overlap 2 -> chunks [0,4) and [2,6)
  std::vector<std::string> tokens{"t0", "t1", "t2", "t3", "t4", "t5"};
  auto vectors = embedding_detail::embed_chunked(tokens, embedder, 4, 2);
  REQUIRE(vectors.size() == 6);
  // position 2: margin 1 in chunk one (index 2 of 4), margin 0 in chunk two
  CHECK(vectors[2][0] == doctest::Approx(2.0));
  // position 3: margin 0 in chunk one (last), margin 1 in chunk two (index 1)
  CHECK(vectors[3][0] == doctest::Approx(1.0));
  // position 4 only in chunk two (index 2)
  CHECK(vectors[4][0] == doctest::Approx(2.0));
}

TEST_CASE("embedding dimension mismatches are rejected") {
  class RaggedEmbedder : public EmbeddingClient {
  public:
    std::vector<std::vector<double>> embed(const std::vector<std::string>& tokens) override {
      std::vector<std::vector<double>> out;
      for (size_t i = 0; i < tokens.size(); ++i) out.push_back(std::vector<double>(2 + i % 2));
      return out;
    }
  } ragged;
  std::vector<std::string> tokens{"a", "b", "c"};
  CHECK_THROWS_AS(chunked_embedding_score(tokens, tokens, ragged, 512, 128),
                  DimensionMismatch);

  class ShortEmbedder : public EmbeddingClient {
  public:
    std::vector<std::vector<double>> embed(const std::vector<std::string>& tokens) override {
      return std::vector<std::vector<double>>(tokens.size() / 2, std::vector<double>(2, 0.0));
    }
  } short_embedder;
  CHECK_THROWS_AS(chunked_embedding_score(tokens, tokens, short_embedder, 512, 128),
                  DimensionMismatch);
}

TEST_CASE("evaluate_pair fills a full report") {
  EvalConfig cfg;
  HashEmbeddingClient embedder(16);
  cfg.embedder = &embedder;
  std::string reference = "# Section\n\nthe quick brown fox jumps over the lazy dog\n";
  EvalReport report = evaluate_pair(reference, reference, cfg);
  CHECK(report.rouge_l_f1 == doctest::Approx(1.0));
  REQUIRE(report.embed_f1.has_value());
  CHECK(*report.embed_f1 == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(report.token_ratio == doctest::Approx(100.0));
  CHECK(report.fourgram_overlap == doctest::Approx(1.0));
  CHECK(report.lcs_words == Tokenizer().count(reference));

  EvalConfig no_embed;
  EvalReport plain = evaluate_pair(reference, reference, no_embed);
  CHECK_FALSE(plain.embed_f1.has_value());
}

TEST_CASE("aggregate over a single pair has zero deviation") {
  PairEval pair;
  pair.patent_id = "P";
  pair.paper_id = "W";
  pair.report.rouge_l_f1 = 0.5;
  pair.report.token_ratio = 80.0;
  pair.report.repetition_rate = 40.0;
  pair.report.lcs_words = 7;
  pair.report.fourgram_overlap = 0.1;
  AggregateReport report = aggregate({pair});
  CHECK(report.metrics.at("rouge_l_f1").mean == doctest::Approx(0.5));
  CHECK(report.metrics.at("rouge_l_f1").stddev == doctest::Approx(0.0));
  CHECK(report.metrics.at("rouge_l_f1").n == 1);
  CHECK(report.by_domain.empty());
}

TEST_CASE("aggregate of two identical pairs has zero deviation") {
  PairEval pair;
  pair.report.rouge_l_f1 = 0.4;
  pair.report.token_ratio = 60.0;
  AggregateReport report = aggregate({pair, pair});
  CHECK(report.metrics.at("rouge_l_f1").mean == doctest::Approx(0.4));
  CHECK(report.metrics.at("rouge_l_f1").stddev == doctest::Approx(0.0));
}

TEST_CASE("report metrics stay within their stated ranges on random inputs") {
  std::mt19937 rng(97);
  EvalConfig cfg;
  HashEmbeddingClient embedder(8);
  cfg.embedder = &embedder;
  std::uniform_int_distribution<size_t> len(4, 80);
  for (int round = 0; round < 50; ++round) {
    auto cand = oracles::random_tokens(rng, len(rng), 5, 2);
    auto ref = oracles::random_tokens(rng, len(rng), 5, 2);
    EvalReport report = evaluate_pair(Tokenizer::detokenize(cand),
                                      Tokenizer::detokenize(ref), cfg);
    CHECK(report.rouge_l_f1 >= 0.0);
    CHECK(report.rouge_l_f1 <= 1.0);
    CHECK(report.token_ratio >= 0.0);
    CHECK(report.repetition_rate >= 0.0);
    CHECK(report.repetition_rate <= 100.0);
    CHECK(report.fourgram_overlap >= 0.0);
    CHECK(report.fourgram_overlap <= 1.0);
    CHECK(report.lcs_words <= std::min(cand.size(), ref.size()));
    REQUIRE(report.embed_f1.has_value());
    CHECK(*report.embed_f1 <= 1.0 + 1e-9);
  }
}

TEST_CASE("repetition_rate rejects degenerate windows") {
  std::vector<std::string> tokens(10, "a");
  CHECK_THROWS_AS(repetition_rate(tokens, 3), ConfigError);
  CHECK_THROWS_AS(repetition_rate(tokens, 0), ConfigError);
}

TEST_CASE("aggregate matches an externally recomputed five-pair fixture") {
  // values recomputed by hand: mean of (0.2, 0.4, 0.6, 0.8, 1.0) = 0.6,
  // population variance = (0.16 + 0.04 + 0 + 0.04 + 0.16) / 5 = 0.08
  std::vector<PairEval> pairs(5);
  double values[] = {0.2, 0.4, 0.6, 0.8, 1.0};
  const char* domains[] = {"cs", "cs", "bio", "bio", "bio"};
  for (size_t i = 0; i < 5; ++i) {
    pairs[i].patent_id = "P" + std::to_string(i);
    pairs[i].report.rouge_l_f1 = values[i];
    pairs[i].domain = domains[i];
  }
  AggregateReport report = aggregate(pairs);
  CHECK(report.metrics.at("rouge_l_f1").mean == doctest::Approx(0.6));
  CHECK(report.metrics.at("rouge_l_f1").stddev == doctest::Approx(std::sqrt(0.08)));
  REQUIRE(report.by_domain.count("cs") == 1);
  REQUIRE(report.by_domain.count("bio") == 1);
  CHECK(report.by_domain.at("cs").at("rouge_l_f1").mean == doctest::Approx(0.3));
  CHECK(report.by_domain.at("bio").at("rouge_l_f1").mean == doctest::Approx(0.8));
  CHECK(report.by_domain.at("cs").at("rouge_l_f1").n == 2);
}

