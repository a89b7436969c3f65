#pragma once

#include <array>
#include <cctype>
#include <string>
#include <string_view>

namespace patdraft {

namespace porter_detail {

// y counts as a vowel when preceded by a consonant, as a consonant at the
// start of the word or after a vowel.
inline bool is_consonant(std::string_view w, size_t i) {
  switch (w[i]) {
    case 'a': case 'e': case 'i': case 'o': case 'u':
      return false;
    case 'y':
      return i == 0 ? true : !is_consonant(w, i - 1);
    default:
      return true;
  }
}

// Number of VC sequences in w[0..len): [C](VC)^m[V].
inline int measure(std::string_view w, size_t len) {
  int m = 0;
  size_t i = 0;
  while (i < len && is_consonant(w, i)) ++i;
  while (i < len) {
    while (i < len && !is_consonant(w, i)) ++i;
    if (i >= len) break;
    ++m;
    while (i < len && is_consonant(w, i)) ++i;
  }
  return m;
}

inline bool contains_vowel(std::string_view w, size_t len) {
  for (size_t i = 0; i < len; ++i)
    if (!is_consonant(w, i)) return true;
  return false;
}

inline bool ends_double_consonant(std::string_view w, size_t len) {
  return len >= 2 && w[len - 1] == w[len - 2] && is_consonant(w, len - 1);
}

// *o: stem ends consonant-vowel-consonant and the final consonant is not
// w, x or y.
inline bool ends_cvc(std::string_view w, size_t len) {
  if (len < 3) return false;
  if (!is_consonant(w, len - 3) || is_consonant(w, len - 2) || !is_consonant(w, len - 1))
    return false;
  char c = w[len - 1];
  return c != 'w' && c != 'x' && c != 'y';
}

inline bool ends_with(std::string_view w, size_t len, std::string_view suffix) {
  return len >= suffix.size() &&
         w.substr(len - suffix.size(), suffix.size()) == suffix;
}

struct Rule {
  std::string_view suffix;
  std::string_view replacement;
};

// Finds the longest matching suffix in the table. Returns -1 when none
// matches. The matched rule's condition decides whether anything happens;
// shorter suffixes are not retried.
template <size_t N>
inline int longest_match(std::string_view w, size_t len, const std::array<Rule, N>& rules) {
  int best = -1;
  size_t best_len = 0;
  for (size_t r = 0; r < N; ++r) {
    if (rules[r].suffix.size() > best_len && ends_with(w, len, rules[r].suffix)) {
      best = static_cast<int>(r);
      best_len = rules[r].suffix.size();
    }
  }
  return best;
}

}  // namespace porter_detail

/// Porter stemming (the published algorithm, steps 1a-5b). Input is
/// lowercased internally; words of length <= 2 are returned unchanged.
inline std::string porter_stem(std::string_view word) {
  using namespace porter_detail;

  std::string w(word);
  for (char& c : w) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (w.size() <= 2) return w;

  size_t len = w.size();
  auto apply = [&](const Rule& rule) {
    len -= rule.suffix.size();
    w.resize(len);
    w.append(rule.replacement);
    len = w.size();
  };

  // step 1a
  {
    static constexpr std::array<Rule, 4> rules{{
        {"sses", "ss"}, {"ies", "i"}, {"ss", "ss"}, {"s", ""}}};
    int r = longest_match(w, len, rules);
    if (r >= 0) apply(rules[static_cast<size_t>(r)]);
  }

  // step 1b
  {
    bool cleanup = false;
    if (ends_with(w, len, "eed")) {
      if (measure(w, len - 3) > 0) {
        w.resize(len - 1);
        len = w.size();
      }
    } else if (ends_with(w, len, "ed") && contains_vowel(w, len - 2)) {
      w.resize(len - 2);
      len = w.size();
      cleanup = true;
    } else if (ends_with(w, len, "ing") && contains_vowel(w, len - 3)) {
      w.resize(len - 3);
      len = w.size();
      cleanup = true;
    }
    if (cleanup) {
      if (ends_with(w, len, "at") || ends_with(w, len, "bl") || ends_with(w, len, "iz")) {
        w.push_back('e');
        len = w.size();
      } else if (ends_double_consonant(w, len) && w[len - 1] != 'l' &&
                 w[len - 1] != 's' && w[len - 1] != 'z') {
        w.resize(len - 1);
        len = w.size();
      } else if (measure(w, len) == 1 && ends_cvc(w, len)) {
        w.push_back('e');
        len = w.size();
      }
    }
  }

  // step 1c
  if (ends_with(w, len, "y") && contains_vowel(w, len - 1)) {
    w[len - 1] = 'i';
  }

  // step 2 (m > 0 on the stem)
  {
    static constexpr std::array<Rule, 20> rules{{
        {"ational", "ate"}, {"tional", "tion"}, {"enci", "ence"},
        {"anci", "ance"},   {"izer", "ize"},    {"abli", "able"},
        {"alli", "al"},     {"entli", "ent"},   {"eli", "e"},
        {"ousli", "ous"},   {"ization", "ize"}, {"ation", "ate"},
        {"ator", "ate"},    {"alism", "al"},    {"iveness", "ive"},
        {"fulness", "ful"}, {"ousness", "ous"}, {"aliti", "al"},
        {"iviti", "ive"},   {"biliti", "ble"}}};
    int r = longest_match(w, len, rules);
    if (r >= 0 && measure(w, len - rules[static_cast<size_t>(r)].suffix.size()) > 0)
      apply(rules[static_cast<size_t>(r)]);
  }

  // step 3 (m > 0 on the stem)
  {
    static constexpr std::array<Rule, 7> rules{{
        {"icate", "ic"}, {"ative", ""}, {"alize", "al"}, {"iciti", "ic"},
        {"ical", "ic"},  {"ful", ""},   {"ness", ""}}};
    int r = longest_match(w, len, rules);
    if (r >= 0 && measure(w, len - rules[static_cast<size_t>(r)].suffix.size()) > 0)
      apply(rules[static_cast<size_t>(r)]);
  }

  // step 4 (m > 1 on the stem; "ion" additionally requires the stem to end
  // in s or t)
  {
    static constexpr std::array<Rule, 19> rules{{
        {"ement", ""}, {"ance", ""}, {"ence", ""}, {"able", ""},
        {"ible", ""},  {"ment", ""}, {"ant", ""},  {"ent", ""},
        {"ion", ""},   {"ism", ""},  {"ate", ""},  {"iti", ""},
        {"ous", ""},   {"ive", ""},  {"ize", ""},  {"al", ""},
        {"er", ""},    {"ic", ""},   {"ou", ""}}};
    int r = longest_match(w, len, rules);
    if (r >= 0) {
      const Rule& rule = rules[static_cast<size_t>(r)];
      size_t stem_len = len - rule.suffix.size();
      bool ok = measure(w, stem_len) > 1;
      if (ok && rule.suffix == "ion")
        ok = stem_len > 0 && (w[stem_len - 1] == 's' || w[stem_len - 1] == 't');
      if (ok) apply(rule);
    }
  }

  // step 5a
  if (ends_with(w, len, "e")) {
    int m = measure(w, len - 1);
    if (m > 1 || (m == 1 && !ends_cvc(w, len - 1))) {
      w.resize(len - 1);
      len = w.size();
    }
  }

  // step 5b
  if (measure(w, len) > 1 && ends_double_consonant(w, len) && w[len - 1] == 'l') {
    w.resize(len - 1);
  }

  return w;
}

}  // namespace patdraft
