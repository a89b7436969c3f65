#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "patdraft/date.hpp"
#include "patdraft/errors.hpp"

namespace patdraft {

struct PairRef {
  std::string patent_id;
  std::string paper_id;
  Date patent_date;
  std::string domain;

  std::string key() const { return patent_id + ":" + paper_id; }
};

struct SplitSizes {
  size_t train = 0;
  size_t val = 0;
  size_t test = 0;
};

struct SplitSpec {
  std::vector<std::string> train;
  std::vector<std::string> val;
  std::vector<std::string> test;
  std::vector<std::string> nc_test;
};

namespace split_detail {

/// Portable Fisher-Yates; std::shuffle is not reproducible across standard
/// library implementations.
inline void shuffle_ids(std::vector<std::string>& ids, uint64_t seed) {
  std::mt19937_64 engine(seed);
  for (size_t i = ids.size(); i > 1; --i) {
    size_t j = static_cast<size_t>(engine() % i);
    std::swap(ids[i - 1], ids[j]);
  }
}

}  // namespace split_detail

/// Deterministic random partition of the given ids. Throws SizeError when
/// the requested sizes exceed the population; ids beyond the requested
/// sizes stay unassigned.
inline SplitSpec random_split(std::vector<std::string> ids, const SplitSizes& sizes,
                              uint64_t seed) {
  if (sizes.train + sizes.val + sizes.test > ids.size())
    throw SizeError("split sizes (" + std::to_string(sizes.train + sizes.val + sizes.test) +
                    ") exceed population (" + std::to_string(ids.size()) + ")");
  split_detail::shuffle_ids(ids, seed);
  SplitSpec spec;
  size_t pos = 0;
  spec.train.assign(ids.begin(), ids.begin() + static_cast<long>(sizes.train));
  pos += sizes.train;
  spec.val.assign(ids.begin() + static_cast<long>(pos),
                  ids.begin() + static_cast<long>(pos + sizes.val));
  pos += sizes.val;
  spec.test.assign(ids.begin() + static_cast<long>(pos),
                   ids.begin() + static_cast<long>(pos + sizes.test));
  return spec;
}

/// Pairs whose patents are dated on/after the cutoff form the
/// non-contaminated test split; the remainder is randomly partitioned.
inline SplitSpec split_with_cutoff(const std::vector<PairRef>& pairs, const SplitSizes& sizes,
                                   const Date& cutoff, uint64_t seed) {
  std::vector<std::string> pool;
  SplitSpec spec;
  for (const auto& pair : pairs) {
    if (pair.patent_date >= cutoff)
      spec.nc_test.push_back(pair.key());
    else
      pool.push_back(pair.key());
  }
  SplitSpec random = random_split(std::move(pool), sizes, seed);
  spec.train = std::move(random.train);
  spec.val = std::move(random.val);
  spec.test = std::move(random.test);
  return spec;
}

inline nlohmann::json to_json(const SplitSpec& spec) {
  return {{"train", spec.train},
          {"val", spec.val},
          {"test", spec.test},
          {"nc_test", spec.nc_test}};
}

}  // namespace patdraft
