// mtlg2p/metrics/edit.hpp

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

#ifndef MTLG2P_METRICS_EDIT_HPP
#define MTLG2P_METRICS_EDIT_HPP

#include <span>
#include <string>
#include <vector>

namespace mtlg2p::metrics {

/// Unit-cost edit script counts. The distance S+D+I is unique; the
/// decomposition follows a fixed tie-breaking order (substitution, then
/// deletion, then insertion) so it is reproducible.
struct EditOps {
  std::size_t substitutions = 0;
  std::size_t deletions = 0;
  std::size_t insertions = 0;

  std::size_t distance() const { return substitutions + deletions + insertions; }
};

/// Minimal edit script between two token sequences (dynamic programming).
EditOps levenshtein(std::span<const std::string> ref,
                    std::span<const std::string> hyp);

enum class AlignOp { kMatch, kSub, kDel, kIns };

/// One slot of a token-level alignment. ref/hyp are empty strings on
/// insertions/deletions respectively.
struct AlignedPair {
  std::string ref;
  std::string hyp;
  AlignOp op = AlignOp::kMatch;
};

/// Full alignment with the same tie-breaking as levenshtein(); the op counts
/// of the result reproduce its EditOps.
std::vector<AlignedPair> align_words(std::span<const std::string> ref,
                                     std::span<const std::string> hyp);

}  // namespace mtlg2p::metrics

#endif  // MTLG2P_METRICS_EDIT_HPP
