// mtlg2p/model/network.hpp

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

#ifndef MTLG2P_MODEL_NETWORK_HPP
#define MTLG2P_MODEL_NETWORK_HPP

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "mtlg2p/lexicon/batch.hpp"
#include "mtlg2p/model/params.hpp"
#include "mtlg2p/numcore/ops.hpp"

// The multitask network: a two-layer encoder LSTM over the reversed grapheme
// sequence, a two-layer decoder LSTM initialized from the encoder's final
// states with a log-softmax projection over phonemes, and a binary Anglicism
// classifier head reading the concatenated final cell state and output of
// the top encoder layer.

namespace mtlg2p::model {

using numcore::Tape;

enum class RunMode { kTrain, kEval };

/// Per-layer final (h, c) plus the classifier feature concat(c_top, h_top).
template <typename T>
struct EncoderState {
  std::vector<std::pair<Tensor<T>, Tensor<T>>> layer_hc;  // (h, c) per layer
  Tensor<T> classifier_feature;  // [b x 2H]
};

/// One LSTM cell step over a batch:
///   i = sigmoid(.), f = sigmoid(.), g = tanh(.), o = sigmoid(.)
///   c = f (*) c_prev + i (*) g,  h = o (*) tanh(c)
/// where each gate reads x * w_x + h_prev * w_h + b.
template <typename T>
std::pair<Tensor<T>, Tensor<T>> lstm_cell_step(Tape<T>* tape,
                                               const Tensor<T>& x,
                                               const Tensor<T>& h_prev,
                                               const Tensor<T>& c_prev,
                                               const LstmLayerParams<T>& w) {
  using namespace numcore;
  const std::size_t hidden = h_prev.dim(1);
  auto gates = add(tape, affine(tape, x, w.w_x, w.b), matmul(tape, h_prev, w.w_h));
  auto i_gate = sigmoid(tape, slice_cols(tape, gates, 0, hidden));
  auto f_gate = sigmoid(tape, slice_cols(tape, gates, hidden, 2 * hidden));
  auto g_cell = tanh_act(tape, slice_cols(tape, gates, 2 * hidden, 3 * hidden));
  auto o_gate = sigmoid(tape, slice_cols(tape, gates, 3 * hidden, 4 * hidden));
  auto c = add(tape, mul(tape, f_gate, c_prev), mul(tape, i_gate, g_cell));
  auto h = mul(tape, o_gate, tanh_act(tape, c));
  return {h, c};
}

/// Runs the stacked encoder over a padded batch (row-major [b x len] index
/// matrix plus mask). States freeze at each row's true end, so the final
/// states equal the unpadded computation.
template <typename T>
EncoderState<T> encode_batch(Tape<T>* tape, const ModelParams<T>& params,
                             const ModelConfig& config,
                             std::span<const std::int32_t> enc_in,
                             std::span<const std::uint8_t> enc_mask,
                             std::size_t batch, std::size_t len) {
  using namespace numcore;
  if (batch == 0 || len == 0) {
    throw ContractError("encode_batch requires a non-empty batch");
  }
  const std::size_t h_dim = config.hidden_dim;
  const std::size_t layers = params.encoder.size();

  std::vector<std::pair<Tensor<T>, Tensor<T>>> state;
  state.reserve(layers);
  for (std::size_t l = 0; l < layers; ++l) {
    state.emplace_back(Tensor<T>::zeros({batch, h_dim}),
                       Tensor<T>::zeros({batch, h_dim}));
  }

  std::vector<std::int32_t> column(batch);
  std::vector<std::uint8_t> mask_col(batch);
  for (std::size_t t = 0; t < len; ++t) {
    bool all_live = true;
    for (std::size_t row = 0; row < batch; ++row) {
      column[row] = enc_in[row * len + t];
      mask_col[row] = enc_mask[row * len + t];
      all_live = all_live && mask_col[row];
    }
    Tensor<T> x = embedding(tape, params.grapheme_embed, column);
    for (std::size_t l = 0; l < layers; ++l) {
      auto [h_new, c_new] =
          lstm_cell_step(tape, x, state[l].first, state[l].second,
                         params.encoder[l]);
      if (!all_live) {
        h_new = where_rows(tape, mask_col, h_new, state[l].first);
        c_new = where_rows(tape, mask_col, c_new, state[l].second);
      }
      state[l] = {h_new, c_new};
      x = h_new;
    }
  }

  EncoderState<T> out;
  out.classifier_feature =
      concat_cols(tape, state.back().second, state.back().first);
  out.layer_hc = std::move(state);
  return out;
}

/// Single-sequence wrapper (`<s>` + reversed graphemes).
template <typename T>
EncoderState<T> encode(Tape<T>* tape, const ModelParams<T>& params,
                       const ModelConfig& config,
                       std::span<const std::int32_t> indices,
                       RunMode /*mode*/ = RunMode::kEval) {
  const std::vector<std::uint8_t> mask(indices.size(), 1);
  return encode_batch(tape, params, config, indices, mask, 1, indices.size());
}

/// Teacher-forced decoder over a padded batch. Returns the [len*b x Vp]
/// log-probability matrix with rows grouped by time step (row t*b + i is
/// step t of batch row i), matching flattened t-major targets.
template <typename T>
Tensor<T> decode_teacher_forced_batch(Tape<T>* tape,
                                      const ModelParams<T>& params,
                                      const ModelConfig& config,
                                      const EncoderState<T>& encoder_state,
                                      std::span<const std::int32_t> dec_in,
                                      std::size_t batch, std::size_t len) {
  using namespace numcore;
  if (batch == 0 || len == 0) {
    throw ContractError("decode_teacher_forced requires a non-empty batch");
  }
  // Both h and c of every layer carry over from the encoder.
  std::vector<std::pair<Tensor<T>, Tensor<T>>> state = encoder_state.layer_hc;
  const std::size_t layers = state.size();

  std::vector<Tensor<T>> step_logits;
  step_logits.reserve(len);
  std::vector<std::int32_t> column(batch);
  for (std::size_t t = 0; t < len; ++t) {
    for (std::size_t row = 0; row < batch; ++row) {
      column[row] = dec_in[row * len + t];
    }
    Tensor<T> x = embedding(tape, params.phoneme_embed, column);
    for (std::size_t l = 0; l < layers; ++l) {
      auto [h_new, c_new] = lstm_cell_step(tape, x, state[l].first,
                                           state[l].second, params.decoder[l]);
      state[l] = {h_new, c_new};
      x = h_new;
    }
    step_logits.push_back(affine(tape, x, params.out_w, params.out_b));
  }
  (void)config;
  return log_softmax(tape, vstack(tape, step_logits), 1);
}

/// Single-sequence wrapper: returns the [T x Vp] log-probability matrix for
/// a decoder input of length T.
template <typename T>
Tensor<T> decode_teacher_forced(Tape<T>* tape, const ModelParams<T>& params,
                                const ModelConfig& config,
                                const EncoderState<T>& encoder_state,
                                std::span<const std::int32_t> decoder_input,
                                RunMode /*mode*/ = RunMode::kEval) {
  return decode_teacher_forced_batch(tape, params, config, encoder_state,
                                     decoder_input, 1, decoder_input.size());
}

/// Classifier head: linear(2H -> C1), ReLU, dropout (train mode only),
/// linear(C1 -> C2), PReLU, linear(C2 -> 1), sigmoid. Returns [b x 1]
/// probabilities.
template <typename T>
Tensor<T> classify(Tape<T>* tape, const ModelParams<T>& params,
                   const ModelConfig& config,
                   const EncoderState<T>& encoder_state, RunMode mode,
                   Rng* dropout_rng = nullptr) {
  using namespace numcore;
  auto hidden1 = relu(
      tape, affine(tape, encoder_state.classifier_feature, params.cls1_w,
                   params.cls1_b));
  if (mode == RunMode::kTrain && config.dropout > 0.0) {
    if (dropout_rng == nullptr) {
      throw ContractError("train-mode classify needs a dropout generator");
    }
    hidden1 = dropout(tape, hidden1, config.dropout, *dropout_rng);
  }
  auto hidden2 = prelu(tape, affine(tape, hidden1, params.cls2_w, params.cls2_b),
                       static_cast<T>(config.prelu_alpha));
  return sigmoid(tape,
                 affine(tape, hidden2, params.cls_out_w, params.cls_out_b));
}

/// A well-conditioned random parameter point for finite-difference gradient
/// checking. Training-scale initialization (±0.05) leaves the top-layer
/// states of a tiny model around 1e-3, which parks classifier pre-activations
/// on the ReLU kink and pushes many true gradients below the 1e-8 floor of
/// the relative-error formula, where difference-quotient noise dominates.
/// Drawing every tensor uniform(-0.5, 0.5) gives O(1) activations and
/// healthy gradient magnitudes; the backward rules under test are the same.
template <typename T>
ModelParams<T> gradcheck_point(const ModelConfig& config, std::uint64_t seed) {
  ModelParams<T> params = ModelParams<T>::init(config, seed);
  Rng rng(derive_seed(seed, "gradcheck-point"));
  for (auto& [name, tensor] : params.named()) {
    auto v = tensor.values_mut();
    for (auto& x : v) x = static_cast<T>(rng.uniform_real(-0.5, 0.5));
  }
  return params;
}

/// Conditions a parameter point for finite-difference gradient checking.
/// Central differences are invalid within ~h of the classifier ReLU kink
/// (the tape reports the one-sided slope, the difference quotient straddles
/// the corner), so any first-layer unit whose pre-activation falls inside
/// the margin gets its bias shifted until the whole batch clears it. The
/// adjustment uses forward values only and leaves a perfectly ordinary
/// parameter point, so it cannot mask backward-rule bugs. Returns the
/// number of adjusted units.
template <typename T>
std::size_t nudge_relu_kinks(const ModelParams<T>& params,
                             const ModelConfig& config,
                             const lexicon::Batch& batch, T margin) {
  const auto enc_state =
      encode_batch<T>(nullptr, params, config, batch.enc_in, batch.enc_mask,
                      batch.size, batch.enc_len);
  const auto pre = numcore::affine<T>(nullptr, enc_state.classifier_feature,
                                      params.cls1_w, params.cls1_b);
  const std::size_t units = config.cls_hidden1;
  auto bias = params.cls1_b.values_mut();
  std::size_t adjusted = 0;
  for (std::size_t u = 0; u < units; ++u) {
    bool near_kink = false;
    T lowest = pre.values()[u];
    for (std::size_t row = 0; row < batch.size; ++row) {
      const T v = pre.values()[row * units + u];
      near_kink = near_kink || (v > -margin && v < margin);
      lowest = std::min(lowest, v);
    }
    if (near_kink) {
      bias[u] += T(4) * margin - lowest;
      ++adjusted;
    }
  }
  return adjusted;
}

/// Combines the two task losses: the unweighted sum, or
/// alpha * decoder + (1 - alpha) * classifier when weighted.
template <typename T>
Tensor<T> combined_loss(Tape<T>* tape, const Tensor<T>& decoder_loss,
                        const Tensor<T>& classifier_loss,
                        const LossMode& mode) {
  using namespace numcore;
  if (!mode.weighted) return add(tape, decoder_loss, classifier_loss);
  if (mode.alpha < 0.0 || mode.alpha > 1.0) {
    throw ContractError("loss alpha must be in [0, 1], got " +
                        std::to_string(mode.alpha));
  }
  return add(tape, scale(tape, decoder_loss, static_cast<T>(mode.alpha)),
             scale(tape, classifier_loss, static_cast<T>(1.0 - mode.alpha)));
}

/// Everything one optimization or validation step needs from a batch.
template <typename T>
struct BatchForward {
  Tensor<T> total_loss;
  Tensor<T> decoder_loss;
  Tensor<T> classifier_loss;
  Tensor<T> probabilities;  // [b x 1]
  std::size_t unmasked_tokens = 0;
};

/// Full forward pass over one padded batch: encoder, teacher-forced decoder
/// NLL (mean over unmasked tokens), classifier BCE (mean over rows), and the
/// combined loss.
template <typename T>
BatchForward<T> forward_batch(Tape<T>* tape, const ModelParams<T>& params,
                              const ModelConfig& config,
                              const lexicon::Batch& batch, RunMode mode,
                              Rng* dropout_rng = nullptr) {
  using namespace numcore;
  BatchForward<T> out;

  const auto enc_state =
      encode_batch(tape, params, config, batch.enc_in, batch.enc_mask,
                   batch.size, batch.enc_len);
  const auto log_probs =
      decode_teacher_forced_batch(tape, params, config, enc_state,
                                  batch.dec_in, batch.size, batch.dec_len);

  // Flatten targets and masks t-major to match the stacked log-prob rows.
  std::vector<std::int32_t> targets(batch.size * batch.dec_len);
  std::vector<std::uint8_t> mask(batch.size * batch.dec_len);
  for (std::size_t t = 0; t < batch.dec_len; ++t) {
    for (std::size_t row = 0; row < batch.size; ++row) {
      targets[t * batch.size + row] = batch.dec_tgt[row * batch.dec_len + t];
      mask[t * batch.size + row] = batch.dec_mask[row * batch.dec_len + t];
    }
  }
  for (std::uint8_t m : mask) out.unmasked_tokens += m;

  out.decoder_loss = nll_loss(tape, log_probs, targets, mask);
  out.probabilities = classify(tape, params, config, enc_state, mode, dropout_rng);
  out.classifier_loss = bce_loss(tape, out.probabilities, batch.labels);
  out.total_loss =
      combined_loss(tape, out.decoder_loss, out.classifier_loss, config.loss);
  return out;
}

}  // namespace mtlg2p::model

#endif  // MTLG2P_MODEL_NETWORK_HPP
