// mtlg2p/lexicon/dataset.hpp

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

#ifndef MTLG2P_LEXICON_DATASET_HPP
#define MTLG2P_LEXICON_DATASET_HPP

#include <cstdint>
#include <set>
#include <vector>

#include "mtlg2p/lexicon/lexicon.hpp"

namespace mtlg2p::lexicon {

/// Sets the anglicism flag on every entry from word-list membership and
/// returns the positive ratio. The word list must already be normalized with
/// the same case mode.
double tag_entries(std::vector<LexiconEntry>& entries,
                   const std::set<std::string>& wordlist,
                   bool case_sensitive = false);

/// Keeps all positive entries and a uniformly sampled (without replacement)
/// equal number of negatives, then shuffles the result deterministically.
/// Requires flags to be set and positives <= negatives.
std::vector<LexiconEntry> downsample_balanced(
    const std::vector<LexiconEntry>& entries, std::uint64_t seed);

struct DatasetSplit {
  std::vector<LexiconEntry> train;
  std::vector<LexiconEntry> valid;
  std::uint64_t seed = 0;
};

/// Seeded uniform split: shuffles a copy and peels off the first valid_count
/// entries as the validation set. valid_count must be < entries.size().
DatasetSplit split_train_valid(const std::vector<LexiconEntry>& entries,
                               std::size_t valid_count, std::uint64_t seed);

/// Positive-class ratio of a (tagged) entry list; entries without a flag
/// count as negative.
double positive_ratio(const std::vector<LexiconEntry>& entries);

}  // namespace mtlg2p::lexicon

#endif  // MTLG2P_LEXICON_DATASET_HPP
