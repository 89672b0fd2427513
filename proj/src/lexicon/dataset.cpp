// mtlg2p/lexicon/dataset.cpp

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABILITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "mtlg2p/lexicon/dataset.hpp"

#include <numeric>

#include "mtlg2p/error.hpp"
#include "mtlg2p/log.hpp"
#include "mtlg2p/rng.hpp"

namespace mtlg2p::lexicon {

double positive_ratio(const std::vector<LexiconEntry>& entries) {
  if (entries.empty()) return 0.0;
  std::size_t positives = 0;
  for (const auto& e : entries) {
    if (e.anglicism.value_or(false)) ++positives;
  }
  return static_cast<double>(positives) / static_cast<double>(entries.size());
}

double tag_entries(std::vector<LexiconEntry>& entries,
                   const std::set<std::string>& wordlist,
                   bool case_sensitive) {
  for (auto& e : entries) {
    e.anglicism = wordlist.count(normalize_word(e.word, case_sensitive)) > 0;
  }
  const double ratio = positive_ratio(entries);
  MTLG2P_INFO("tagged " << entries.size() << " entries, " << ratio * 100.0
                        << "% positive");
  return ratio;
}

std::vector<LexiconEntry> downsample_balanced(
    const std::vector<LexiconEntry>& entries, std::uint64_t seed) {
  std::vector<std::size_t> positives, negatives;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (!entries[i].anglicism.has_value()) {
      throw ContractError("downsample_balanced requires anglicism flags on "
                          "all entries (entry '" + entries[i].word +
                          "' is untagged)");
    }
    (*entries[i].anglicism ? positives : negatives).push_back(i);
  }
  if (positives.size() > negatives.size()) {
    throw ContractError("downsample_balanced expects positives <= negatives, "
                        "got " + std::to_string(positives.size()) + " vs " +
                        std::to_string(negatives.size()));
  }

  Rng rng(seed);
  // Partial Fisher-Yates: the first positives.size() slots are a uniform
  // sample without replacement.
  const std::size_t want = positives.size();
  for (std::size_t i = 0; i < want; ++i) {
    const std::size_t j = i + rng.uniform_index(negatives.size() - i);
    std::swap(negatives[i], negatives[j]);
  }

  std::vector<std::size_t> keep(positives);
  keep.insert(keep.end(), negatives.begin(),
              negatives.begin() + static_cast<std::ptrdiff_t>(want));
  rng.shuffle(keep);

  std::vector<LexiconEntry> out;
  out.reserve(keep.size());
  for (std::size_t idx : keep) out.push_back(entries[idx]);
  return out;
}

DatasetSplit split_train_valid(const std::vector<LexiconEntry>& entries,
                               std::size_t valid_count, std::uint64_t seed) {
  if (valid_count >= entries.size()) {
    throw ContractError("validation count " + std::to_string(valid_count) +
                        " must be smaller than the entry count " +
                        std::to_string(entries.size()));
  }
  std::vector<std::size_t> order(entries.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed(seed, "split"));
  rng.shuffle(order);

  DatasetSplit split;
  split.seed = seed;
  split.valid.reserve(valid_count);
  split.train.reserve(entries.size() - valid_count);
  for (std::size_t i = 0; i < order.size(); ++i) {
    (i < valid_count ? split.valid : split.train).push_back(entries[order[i]]);
  }
  return split;
}

}  // namespace mtlg2p::lexicon
