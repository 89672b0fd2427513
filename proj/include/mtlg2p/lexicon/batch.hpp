// mtlg2p/lexicon/batch.hpp

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

#ifndef MTLG2P_LEXICON_BATCH_HPP
#define MTLG2P_LEXICON_BATCH_HPP

#include <cstdint>
#include <vector>

#include "mtlg2p/lexicon/vocab.hpp"

namespace mtlg2p::lexicon {

/// A padded mini-batch. Sequences are right-padded with <pad> (index 0) to
/// the per-batch maximum length; masks are 1 on real positions. Matrices are
/// row-major [size x len].
struct Batch {
  std::size_t size = 0;
  std::size_t enc_len = 0;
  std::size_t dec_len = 0;
  std::vector<std::int32_t> enc_in;
  std::vector<std::uint8_t> enc_mask;
  std::vector<std::int32_t> dec_in;
  std::vector<std::int32_t> dec_tgt;
  std::vector<std::uint8_t> dec_mask;
  std::vector<std::uint8_t> labels;
};

/// Splits examples into batches after a deterministic permutation keyed by
/// (seed, epoch). The final partial batch is kept, so the batch count is
/// ceil(N / batch_size).
std::vector<Batch> batch_examples(const std::vector<EncodedExample>& examples,
                                  std::size_t batch_size, std::uint64_t seed,
                                  std::size_t epoch);

/// Batches in the given order without shuffling (validation/evaluation).
std::vector<Batch> batch_in_order(const std::vector<EncodedExample>& examples,
                                  std::size_t batch_size);

}  // namespace mtlg2p::lexicon

#endif  // MTLG2P_LEXICON_BATCH_HPP
