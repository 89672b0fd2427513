// mtlg2p/model/gradcheck.hpp

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

#ifndef MTLG2P_MODEL_GRADCHECK_HPP
#define MTLG2P_MODEL_GRADCHECK_HPP

#include <cstdint>

#include "mtlg2p/model/network.hpp"
#include "mtlg2p/numcore/gradcheck.hpp"

// Full-model gradient verification harness.
//
// The 64-bit tape gradients are compared against central differences whose
// loss evaluations run in extended precision (the network code is generic
// over the scalar type). Double-rounded difference quotients bottom out
// around eps*|f|/h, which the relative-error formula amplifies for the
// near-zero gradients that recurrent weight rows naturally produce; the
// extended-precision evaluations push that floor several orders below the
// tolerance. Two forward-value-only point adjustments keep the check on
// differentiable ground: a wide random draw (training-scale init leaves a
// tiny model's states, and therefore many gradients, vanishingly small) and
// a shift of classifier biases off the ReLU kink, where one-sided slopes
// and difference quotients legitimately disagree.

namespace mtlg2p::model {

struct ModelGradCheckResult {
  numcore::GradCheckReport report;
  std::size_t nudged_units = 0;  // classifier units moved off the kink
  double loss = 0.0;
};

/// Runs the finite-difference check for the full multitask loss (train-mode
/// forward with a fixed dropout mask) on the given micro batch at a
/// conditioned random point derived from `seed`.
inline ModelGradCheckResult run_model_gradcheck(const ModelConfig& config,
                                                const lexicon::Batch& batch,
                                                std::uint64_t seed,
                                                double step = 1e-5) {
  const std::uint64_t dropout_seed = derive_seed(seed, "gradcheck-dropout");
  const auto loss_fn = [&config, &batch, dropout_seed](
                           numcore::Tape<double>* tape,
                           std::vector<numcore::Tensor<double>>& tensors) {
    const auto p = ModelParams<double>::from_tensors(config, tensors);
    Rng dropout_rng(dropout_seed);  // identical mask on every evaluation
    return forward_batch<double>(tape, p, config, batch, RunMode::kTrain,
                                 &dropout_rng)
        .total_loss;
  };
  const auto precise_fn =
      [&config, &batch,
       dropout_seed](std::vector<numcore::Tensor<double>>& tensors) {
        std::vector<numcore::Tensor<long double>> wide;
        wide.reserve(tensors.size());
        for (const auto& t : tensors) {
          std::vector<long double> values(t.values().begin(), t.values().end());
          wide.push_back(numcore::Tensor<long double>::from_data(
              t.shape(), std::move(values)));
        }
        const auto p = ModelParams<long double>::from_tensors(config, wide);
        Rng dropout_rng(dropout_seed);  // same mask decisions as loss_fn
        return static_cast<long double>(
            forward_batch<long double>(nullptr, p, config, batch,
                                       RunMode::kTrain, &dropout_rng)
                .total_loss.item());
      };

  ModelGradCheckResult result;
  const auto params = gradcheck_point<double>(config, seed);
  result.nudged_units = nudge_relu_kinks<double>(
      params, config, batch, std::max(1e-3, 50.0 * step));
  auto tensors = params.tensors();
  {
    numcore::Tape<double> tape;
    result.loss = loss_fn(&tape, tensors).item();
  }
  result.report = numcore::finite_difference_gradcheck(loss_fn, tensors, step,
                                                       nullptr, precise_fn);
  return result;
}

/// Micro vocabulary for the oracle: two graphemes, three phonemes plus the
/// specials.
inline lexicon::Vocabulary gradcheck_vocab() {
  return lexicon::Vocabulary::from_symbols(
      {"<pad>", "<s>", "a", "b"},
      {"<pad>", "<os>", "</os>", "p", "q", "r"});
}

/// Tiny configuration for the oracle: hidden size 8 (or smaller), the micro
/// vocabulary, and a classifier head shrunk to the same scale so the check
/// covers every architectural component without the full model's coordinate
/// count.
inline ModelConfig gradcheck_config(const lexicon::Vocabulary& vocab,
                                    std::size_t hidden = 8) {
  ModelConfig config;
  config.embed_dim = hidden;
  config.hidden_dim = hidden;
  config.grapheme_vocab = vocab.grapheme_count();
  config.phoneme_vocab = vocab.phoneme_count();
  config.cls_hidden1 = hidden;
  config.cls_hidden2 = hidden;
  return config;
}

/// The standard two-word micro batch used by the gradcheck entry points.
inline lexicon::Batch gradcheck_micro_batch(const lexicon::Vocabulary& vocab) {
  lexicon::LexiconEntry first{"ab", {"p", "q"}, false};
  lexicon::LexiconEntry second{"ba", {"r"}, true};
  std::vector<lexicon::EncodedExample> examples{
      lexicon::encode_example(first, vocab),
      lexicon::encode_example(second, vocab)};
  return lexicon::batch_in_order(examples, 2).front();
}

}  // namespace mtlg2p::model

#endif  // MTLG2P_MODEL_GRADCHECK_HPP
