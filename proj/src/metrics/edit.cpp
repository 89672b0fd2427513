// mtlg2p/metrics/edit.cpp

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

#include "mtlg2p/metrics/edit.hpp"

#include <algorithm>

namespace mtlg2p::metrics {

namespace {

// Full cost table; entry (i, j) is the distance between ref[0..i) and
// hyp[0..j).
std::vector<std::size_t> cost_table(std::span<const std::string> ref,
                                    std::span<const std::string> hyp) {
  const std::size_t n = ref.size(), m = hyp.size();
  std::vector<std::size_t> d((n + 1) * (m + 1));
  const auto at = [m](std::size_t i, std::size_t j) { return i * (m + 1) + j; };
  for (std::size_t i = 0; i <= n; ++i) d[at(i, 0)] = i;
  for (std::size_t j = 0; j <= m; ++j) d[at(0, j)] = j;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t sub =
          d[at(i - 1, j - 1)] + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      const std::size_t del = d[at(i - 1, j)] + 1;
      const std::size_t ins = d[at(i, j - 1)] + 1;
      d[at(i, j)] = std::min({sub, del, ins});
    }
  }
  return d;
}

// Backtrace with fixed preference on cost ties: match/substitution, then
// deletion, then insertion. The emitted alignment is reversed at the end.
std::vector<AlignedPair> backtrace(std::span<const std::string> ref,
                                   std::span<const std::string> hyp,
                                   const std::vector<std::size_t>& d) {
  const std::size_t m = hyp.size();
  const auto at = [m](std::size_t i, std::size_t j) { return i * (m + 1) + j; };
  std::vector<AlignedPair> out;
  std::size_t i = ref.size(), j = hyp.size();
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0) {
      const bool same = ref[i - 1] == hyp[j - 1];
      if (d[at(i, j)] == d[at(i - 1, j - 1)] + (same ? 0 : 1)) {
        out.push_back({ref[i - 1], hyp[j - 1],
                       same ? AlignOp::kMatch : AlignOp::kSub});
        --i;
        --j;
        continue;
      }
    }
    if (i > 0 && d[at(i, j)] == d[at(i - 1, j)] + 1) {
      out.push_back({ref[i - 1], "", AlignOp::kDel});
      --i;
      continue;
    }
    out.push_back({"", hyp[j - 1], AlignOp::kIns});
    --j;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

}  // namespace

std::vector<AlignedPair> align_words(std::span<const std::string> ref,
                                     std::span<const std::string> hyp) {
  return backtrace(ref, hyp, cost_table(ref, hyp));
}

EditOps levenshtein(std::span<const std::string> ref,
                    std::span<const std::string> hyp) {
  EditOps ops;
  for (const auto& pair : align_words(ref, hyp)) {
    switch (pair.op) {
      case AlignOp::kMatch: break;
      case AlignOp::kSub: ++ops.substitutions; break;
      case AlignOp::kDel: ++ops.deletions; break;
      case AlignOp::kIns: ++ops.insertions; break;
    }
  }
  return ops;
}

}  // namespace mtlg2p::metrics
