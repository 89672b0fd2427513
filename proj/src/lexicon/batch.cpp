// mtlg2p/lexicon/batch.cpp

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

#include "mtlg2p/lexicon/batch.hpp"

#include <algorithm>
#include <numeric>

#include "mtlg2p/error.hpp"
#include "mtlg2p/rng.hpp"

namespace mtlg2p::lexicon {

namespace {

Batch make_batch(const std::vector<EncodedExample>& examples,
                 const std::vector<std::size_t>& order, std::size_t begin,
                 std::size_t end) {
  Batch batch;
  batch.size = end - begin;
  for (std::size_t i = begin; i < end; ++i) {
    const auto& ex = examples[order[i]];
    batch.enc_len = std::max(batch.enc_len, ex.encoder_input.size());
    batch.dec_len = std::max(batch.dec_len, ex.decoder_input.size());
  }
  batch.enc_in.assign(batch.size * batch.enc_len, Vocabulary::kPadId);
  batch.enc_mask.assign(batch.size * batch.enc_len, 0);
  batch.dec_in.assign(batch.size * batch.dec_len, Vocabulary::kPadId);
  batch.dec_tgt.assign(batch.size * batch.dec_len, Vocabulary::kPadId);
  batch.dec_mask.assign(batch.size * batch.dec_len, 0);
  batch.labels.assign(batch.size, 0);

  for (std::size_t row = 0; row < batch.size; ++row) {
    const auto& ex = examples[order[begin + row]];
    for (std::size_t t = 0; t < ex.encoder_input.size(); ++t) {
      batch.enc_in[row * batch.enc_len + t] = ex.encoder_input[t];
      batch.enc_mask[row * batch.enc_len + t] = 1;
    }
    for (std::size_t t = 0; t < ex.decoder_input.size(); ++t) {
      batch.dec_in[row * batch.dec_len + t] = ex.decoder_input[t];
      batch.dec_tgt[row * batch.dec_len + t] = ex.decoder_target[t];
      batch.dec_mask[row * batch.dec_len + t] = 1;
    }
    batch.labels[row] = ex.label ? 1 : 0;
  }
  return batch;
}

std::vector<Batch> batch_with_order(const std::vector<EncodedExample>& examples,
                                    std::size_t batch_size,
                                    const std::vector<std::size_t>& order) {
  std::vector<Batch> batches;
  batches.reserve((examples.size() + batch_size - 1) / batch_size);
  for (std::size_t begin = 0; begin < examples.size(); begin += batch_size) {
    const std::size_t end = std::min(begin + batch_size, examples.size());
    batches.push_back(make_batch(examples, order, begin, end));
  }
  return batches;
}

}  // namespace

std::vector<Batch> batch_examples(const std::vector<EncodedExample>& examples,
                                  std::size_t batch_size, std::uint64_t seed,
                                  std::size_t epoch) {
  if (batch_size == 0) throw ContractError("batch_size must be >= 1");
  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed(derive_seed(seed, "permutation"),
                      static_cast<std::uint64_t>(epoch)));
  rng.shuffle(order);
  return batch_with_order(examples, batch_size, order);
}

std::vector<Batch> batch_in_order(const std::vector<EncodedExample>& examples,
                                  std::size_t batch_size) {
  if (batch_size == 0) throw ContractError("batch_size must be >= 1");
  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  return batch_with_order(examples, batch_size, order);
}

}  // namespace mtlg2p::lexicon
