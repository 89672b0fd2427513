// mtlg2p/model/config.hpp

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

#ifndef MTLG2P_MODEL_CONFIG_HPP
#define MTLG2P_MODEL_CONFIG_HPP

#include <cstddef>

#include "mtlg2p/error.hpp"

namespace mtlg2p::model {

/// How decoder and classifier losses combine into the total loss:
/// unweighted is the plain sum; weighted is
/// alpha * decoder + (1 - alpha) * classifier.
struct LossMode {
  bool weighted = false;
  double alpha = 0.7;
};

/// Architecture hyperparameters. The defaults are the full-size model
/// (500-dimensional embeddings and hidden layers, two stacked LSTM layers,
/// a 1000->100->100->1 classifier head on the concatenated final cell state
/// and output, dropout 0.2 after the first classifier layer, PReLU slope 1).
struct ModelConfig {
  std::size_t embed_dim = 500;
  std::size_t hidden_dim = 500;
  std::size_t layers = 2;  // fixed by the architecture
  std::size_t grapheme_vocab = 0;
  std::size_t phoneme_vocab = 0;
  std::size_t cls_hidden1 = 100;
  std::size_t cls_hidden2 = 100;
  double dropout = 0.2;
  double prelu_alpha = 1.0;
  LossMode loss;

  std::size_t classifier_input_dim() const { return 2 * hidden_dim; }

  void validate() const {
    if (embed_dim == 0 || hidden_dim == 0 || cls_hidden1 == 0 ||
        cls_hidden2 == 0) {
      throw ContractError("model dimensions must be positive");
    }
    if (layers != 2) {
      throw ContractError("the architecture uses exactly two LSTM layers");
    }
    if (grapheme_vocab < 2 || phoneme_vocab < 3) {
      throw ContractError("vocabulary sizes must include the special tokens");
    }
    if (dropout < 0.0 || dropout >= 1.0) {
      throw ContractError("dropout must be in [0, 1)");
    }
    if (loss.weighted && (loss.alpha < 0.0 || loss.alpha > 1.0)) {
      throw ContractError("loss alpha must be in [0, 1]");
    }
  }

  /// Trainable scalar count:
  ///   embeddings   Vg*E + Vp*E
  ///   encoder      (E*4H + H*4H + 4H) + (H*4H + H*4H + 4H)
  ///   decoder      same as encoder
  ///   projection   H*Vp + Vp
  ///   classifier   (2H*C1 + C1) + (C1*C2 + C2) + (C2 + 1)
  std::size_t parameter_count() const {
    const std::size_t e = embed_dim, h = hidden_dim;
    const std::size_t vg = grapheme_vocab, vp = phoneme_vocab;
    const std::size_t c1 = cls_hidden1, c2 = cls_hidden2;
    const std::size_t lstm_stack =
        (e * 4 * h + h * 4 * h + 4 * h) + (h * 4 * h + h * 4 * h + 4 * h);
    return vg * e + vp * e + 2 * lstm_stack + (h * vp + vp) +
           (2 * h * c1 + c1) + (c1 * c2 + c2) + (c2 + 1);
  }
};

}  // namespace mtlg2p::model

#endif  // MTLG2P_MODEL_CONFIG_HPP
