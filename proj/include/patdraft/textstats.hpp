#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "patdraft/errors.hpp"
#include "patdraft/porter.hpp"
#include "patdraft/stopwords.hpp"

namespace patdraft {

enum class TokenizerKind { WhitespacePunct, SubwordVocab };

inline bool is_punct_char(char c) {
  unsigned char u = static_cast<unsigned char>(c);
  return std::ispunct(u) != 0;
}

/// Deterministic tokenizer. WhitespacePunct splits on whitespace and emits
/// every punctuation character as its own token, so concatenating the
/// tokens restores all non-whitespace characters of the input. SubwordVocab
/// applies greedy longest-match against a vocabulary (one subword per line,
/// rank order = line order); characters not covered by the vocabulary
/// become single-character tokens.
class Tokenizer {
public:
  Tokenizer() = default;

  static Tokenizer whitespace_punct() { return Tokenizer(); }

  static Tokenizer subword(std::vector<std::string> vocab) {
    Tokenizer t;
    t.kind_ = TokenizerKind::SubwordVocab;
    for (auto& entry : vocab) {
      if (entry.empty()) continue;
      t.max_piece_ = std::max(t.max_piece_, entry.size());
      t.vocab_.insert(std::move(entry));
    }
    return t;
  }

  static Tokenizer subword_from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open vocabulary file: " + path);
    std::vector<std::string> vocab;
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) vocab.push_back(line);
    }
    return subword(std::move(vocab));
  }

  TokenizerKind kind() const { return kind_; }

  std::string name() const {
    return kind_ == TokenizerKind::WhitespacePunct ? "whitespace-punct" : "subword-vocab";
  }

  std::vector<std::string> tokenize(std::string_view text) const {
    return kind_ == TokenizerKind::WhitespacePunct ? tokenize_whitespace(text)
                                                   : tokenize_subword(text);
  }

  size_t count(std::string_view text) const { return tokenize(text).size(); }

  /// Joins tokens with single spaces.
  static std::string detokenize(const std::vector<std::string>& tokens) {
    std::string out;
    for (size_t i = 0; i < tokens.size(); ++i) {
      if (i > 0) out.push_back(' ');
      out += tokens[i];
    }
    return out;
  }

private:
  static std::vector<std::string> tokenize_whitespace(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    auto flush = [&] {
      if (!current.empty()) {
        tokens.push_back(current);
        current.clear();
      }
    };
    for (char c : text) {
      if (std::isspace(static_cast<unsigned char>(c))) {
        flush();
      } else if (is_punct_char(c)) {
        flush();
        tokens.emplace_back(1, c);
      } else {
        current.push_back(c);
      }
    }
    flush();
    return tokens;
  }

  std::vector<std::string> tokenize_subword(std::string_view text) const {
    std::vector<std::string> tokens;
    size_t pos = 0;
    while (pos < text.size()) {
      size_t longest = 0;
      size_t limit = std::min(max_piece_, text.size() - pos);
      for (size_t n = limit; n >= 1; --n) {
        if (vocab_.count(std::string(text.substr(pos, n)))) {
          longest = n;
          break;
        }
      }
      if (longest == 0) longest = 1;
      tokens.emplace_back(text.substr(pos, longest));
      pos += longest;
    }
    return tokens;
  }

  TokenizerKind kind_ = TokenizerKind::WhitespacePunct;
  std::unordered_set<std::string> vocab_;
  size_t max_piece_ = 0;
};

/// N-gram multiset, keyed by the tokens joined with '\x1f'.
inline std::unordered_map<std::string, int> ngram_counts(
    const std::vector<std::string>& tokens, size_t n) {
  std::unordered_map<std::string, int> counts;
  if (n == 0 || tokens.size() < n) return counts;
  for (size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string key = tokens[i];
    for (size_t j = 1; j < n; ++j) {
      key.push_back('\x1f');
      key += tokens[i + j];
    }
    ++counts[key];
  }
  return counts;
}

/// Edit distance (insert/delete/substitute, unit costs).
inline size_t levenshtein(std::string_view a, std::string_view b) {
  if (a.size() > b.size()) std::swap(a, b);
  std::vector<size_t> prev(a.size() + 1), cur(a.size() + 1);
  for (size_t i = 0; i <= a.size(); ++i) prev[i] = i;
  for (size_t j = 1; j <= b.size(); ++j) {
    cur[0] = j;
    for (size_t i = 1; i <= a.size(); ++i) {
      size_t sub = prev[i - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[i] = std::min({prev[i] + 1, cur[i - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[a.size()];
}

struct LcsWordsResult {
  size_t length = 0;
  size_t a_offset = 0;
  size_t b_offset = 0;
};

/// Longest contiguous run of tokens shared by both sequences. Offsets point
/// at the start of the run in each input; ties keep the earliest (a, b)
/// position.
inline LcsWordsResult longest_common_substring_words(
    const std::vector<std::string>& a, const std::vector<std::string>& b) {
  LcsWordsResult best;
  if (a.empty() || b.empty()) return best;
  std::vector<size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (size_t i = 1; i <= a.size(); ++i) {
    for (size_t j = 1; j <= b.size(); ++j) {
      if (a[i - 1] == b[j - 1]) {
        cur[j] = prev[j - 1] + 1;
        if (cur[j] > best.length) {
          best.length = cur[j];
          best.a_offset = i - cur[j];
          best.b_offset = j - cur[j];
        }
      } else {
        cur[j] = 0;
      }
    }
    std::swap(prev, cur);
  }
  return best;
}

/// Normalization chain shared by term matching and lexical retrieval:
/// lowercase, tokenize, drop punctuation tokens and stopwords, Porter-stem.
/// Returns the stemmed token stream with duplicates preserved.
inline std::vector<std::string> analyze_terms(std::string_view text) {
  std::string lowered(text);
  for (char& c : lowered)
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  std::vector<std::string> out;
  for (auto& token : Tokenizer::whitespace_punct().tokenize(lowered)) {
    bool punct_only = std::all_of(token.begin(), token.end(), is_punct_char);
    if (punct_only) continue;
    if (is_stopword(token)) continue;
    out.push_back(porter_stem(token));
  }
  return out;
}

}  // namespace patdraft
