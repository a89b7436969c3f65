#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "patdraft/errors.hpp"
#include "patdraft/hash.hpp"
#include "patdraft/textstats.hpp"

namespace patdraft {

/// Token embedder: one fixed-dimension unit-normalized vector per input
/// token. Implementations must be thread-safe.
class EmbeddingClient {
public:
  virtual ~EmbeddingClient() = default;
  virtual std::vector<std::vector<double>> embed(const std::vector<std::string>& tokens) = 0;
};

/// Deterministic context-free embedder for tests and offline runs: each
/// token maps to a pseudo-random unit vector seeded by its content.
class HashEmbeddingClient : public EmbeddingClient {
public:
  explicit HashEmbeddingClient(size_t dim = 64) : dim_(dim) {}

  std::vector<std::vector<double>> embed(const std::vector<std::string>& tokens) override {
    std::vector<std::vector<double>> out;
    out.reserve(tokens.size());
    for (const auto& token : tokens) out.push_back(vector_for(token));
    return out;
  }

  std::vector<double> vector_for(const std::string& token) const {
    std::vector<double> v(dim_);
    uint64_t state = fnv1a64(token);
    double norm_sq = 0.0;
    for (size_t i = 0; i < dim_; ++i) {
      // splitmix64 step
      state += 0x9e3779b97f4a7c15ull;
      uint64_t z = state;
      z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
      z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
      z = z ^ (z >> 31);
      v[i] = static_cast<double>(z % 2000003) / 1000001.5 - 1.0;
      norm_sq += v[i] * v[i];
    }
    double norm = std::sqrt(norm_sq);
    for (double& x : v) x /= norm;
    return v;
  }

private:
  size_t dim_;
};

struct EmbedScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

namespace embedding_detail {

/// Embeds tokens in overlapping chunks (stride = chunk - overlap). For a
/// token covered by several chunks, the embedding from the chunk where the
/// token sits farther from a chunk edge wins; ties keep the earlier chunk.
inline std::vector<std::vector<double>> embed_chunked(const std::vector<std::string>& tokens,
                                                      EmbeddingClient& client, size_t chunk,
                                                      size_t overlap) {
  if (chunk == 0 || overlap >= chunk)
    throw ConfigError("embedding chunk must be positive and larger than the overlap");
  std::vector<std::vector<double>> result(tokens.size());
  if (tokens.empty()) return result;
  std::vector<long> best_margin(tokens.size(), -1);
  size_t dim = 0;
  size_t stride = chunk - overlap;
  for (size_t start = 0; start < tokens.size(); start += stride) {
    size_t end = std::min(tokens.size(), start + chunk);
    std::vector<std::string> window(tokens.begin() + static_cast<long>(start),
                                    tokens.begin() + static_cast<long>(end));
    auto vectors = client.embed(window);
    if (vectors.size() != window.size())
      throw DimensionMismatch("embedder returned " + std::to_string(vectors.size()) +
                              " vectors for " + std::to_string(window.size()) + " tokens");
    for (size_t i = 0; i < vectors.size(); ++i) {
      if (dim == 0) dim = vectors[i].size();
      if (vectors[i].size() != dim)
        throw DimensionMismatch("embedding dimensions differ within one response");
      size_t pos = start + i;
      long margin = static_cast<long>(std::min(i, vectors.size() - 1 - i));
      if (margin > best_margin[pos]) {
        best_margin[pos] = margin;
        result[pos] = std::move(vectors[i]);
      }
    }
    if (end == tokens.size()) break;
  }
  return result;
}

inline double mean_max_similarity(const std::vector<std::vector<double>>& from,
                                  const std::vector<std::vector<double>>& to) {
  if (from.empty() || to.empty()) return 0.0;
  double total = 0.0;
  for (const auto& f : from) {
    double best = -1.0;
    for (const auto& t : to) {
      if (f.size() != t.size())
        throw DimensionMismatch("embedding dimensions differ between texts");
      double dot = 0.0;
      for (size_t i = 0; i < f.size(); ++i) dot += f[i] * t[i];
      best = std::max(best, dot);
    }
    total += best;
  }
  return total / static_cast<double>(from.size());
}

}  // namespace embedding_detail

/// Embedding-based similarity with greedy token matching across the whole
/// sequences: P is the mean over candidate tokens of the best dot product
/// against any reference token, R is symmetric, F1 the harmonic mean.
/// Long inputs are embedded in overlapping chunks.
inline EmbedScore chunked_embedding_score(const std::vector<std::string>& candidate,
                                          const std::vector<std::string>& reference,
                                          EmbeddingClient& client, size_t chunk = 512,
                                          size_t overlap = 128) {
  using namespace embedding_detail;
  auto cand_vecs = embed_chunked(candidate, client, chunk, overlap);
  auto ref_vecs = embed_chunked(reference, client, chunk, overlap);
  EmbedScore score;
  score.precision = mean_max_similarity(cand_vecs, ref_vecs);
  score.recall = mean_max_similarity(ref_vecs, cand_vecs);
  if (score.precision + score.recall > 0.0)
    score.f1 = 2.0 * score.precision * score.recall / (score.precision + score.recall);
  return score;
}

inline EmbedScore chunked_embedding_score(const std::string& candidate,
                                          const std::string& reference, EmbeddingClient& client,
                                          const Tokenizer& tokenizer = {}, size_t chunk = 512,
                                          size_t overlap = 128) {
  return chunked_embedding_score(tokenizer.tokenize(candidate), tokenizer.tokenize(reference),
                                 client, chunk, overlap);
}

}  // namespace patdraft
