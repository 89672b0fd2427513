// mtlg2p/model/params.hpp

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

#ifndef MTLG2P_MODEL_PARAMS_HPP
#define MTLG2P_MODEL_PARAMS_HPP

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mtlg2p/model/config.hpp"
#include "mtlg2p/numcore/tensor.hpp"
#include "mtlg2p/rng.hpp"

namespace mtlg2p::model {

using numcore::Tensor;

/// One LSTM layer: input weights [in x 4H], recurrent weights [H x 4H] and
/// bias [4H]. Gate order along the 4H axis is input, forget, cell, output.
template <typename T>
struct LstmLayerParams {
  Tensor<T> w_x;
  Tensor<T> w_h;
  Tensor<T> b;
};

/// All trainable tensors. Tensor names and their order (named()) are the
/// checkpoint contract.
template <typename T>
struct ModelParams {
  Tensor<T> grapheme_embed;  // [Vg x E]
  Tensor<T> phoneme_embed;   // [Vp x E]
  std::vector<LstmLayerParams<T>> encoder;  // 2 layers
  std::vector<LstmLayerParams<T>> decoder;  // 2 layers
  Tensor<T> out_w;  // [H x Vp]
  Tensor<T> out_b;  // [Vp]
  Tensor<T> cls1_w;     // [2H x C1]
  Tensor<T> cls1_b;     // [C1]
  Tensor<T> cls2_w;     // [C1 x C2]
  Tensor<T> cls2_b;     // [C2]
  Tensor<T> cls_out_w;  // [C2 x 1]
  Tensor<T> cls_out_b;  // [1]

  /// Seeded initialization: weights uniform in (-0.05, 0.05), biases zero
  /// except LSTM forget-gate biases, which start at 1.
  static ModelParams init(const ModelConfig& config, std::uint64_t seed);

  /// Rebuilds the struct from tensors in named() order (checkpoint load,
  /// gradient checking). Shapes are validated against the config.
  static ModelParams from_tensors(const ModelConfig& config,
                                  std::span<const Tensor<T>> tensors);

  std::vector<std::pair<std::string, Tensor<T>>> named() const;
  std::vector<Tensor<T>> tensors() const;

  void set_requires_grad(bool rg) const;

  /// Matches ModelConfig::parameter_count() by construction; asserted in
  /// tests.
  std::size_t total_values() const;
};

namespace detail {

template <typename T>
Tensor<T> uniform_tensor(numcore::Shape shape, Rng& rng, double lo, double hi) {
  std::vector<T> values(numcore::shape_numel(shape));
  for (auto& v : values) v = static_cast<T>(rng.uniform_real(lo, hi));
  return Tensor<T>::from_data(std::move(shape), std::move(values));
}

template <typename T>
LstmLayerParams<T> init_lstm_layer(std::size_t input_dim, std::size_t hidden,
                                   Rng& rng) {
  LstmLayerParams<T> layer;
  layer.w_x = detail::uniform_tensor<T>({input_dim, 4 * hidden}, rng, -0.05, 0.05);
  layer.w_h = detail::uniform_tensor<T>({hidden, 4 * hidden}, rng, -0.05, 0.05);
  layer.b = Tensor<T>::zeros({4 * hidden});
  // Forget-gate slice starts open so early training does not wipe the cell
  // state.
  auto bv = layer.b.values_mut();
  for (std::size_t i = hidden; i < 2 * hidden; ++i) bv[i] = T(1);
  return layer;
}

}  // namespace detail

/// Expected tensor names and shapes for a config, in named() order. The
/// checkpoint loader and from_tensors validate against this list.
inline std::vector<std::pair<std::string, numcore::Shape>>
expected_tensor_layout(const ModelConfig& config) {
  const std::size_t e = config.embed_dim, h = config.hidden_dim;
  std::vector<std::pair<std::string, numcore::Shape>> out;
  out.emplace_back("embed.graphemes", numcore::Shape{config.grapheme_vocab, e});
  out.emplace_back("embed.phonemes", numcore::Shape{config.phoneme_vocab, e});
  for (const char* prefix : {"encoder", "decoder"}) {
    for (std::size_t l = 0; l < 2; ++l) {
      const std::string base = std::string(prefix) + ".l" + std::to_string(l);
      out.emplace_back(base + ".w_x", numcore::Shape{l == 0 ? e : h, 4 * h});
      out.emplace_back(base + ".w_h", numcore::Shape{h, 4 * h});
      out.emplace_back(base + ".b", numcore::Shape{4 * h});
    }
  }
  out.emplace_back("decoder.out.w", numcore::Shape{h, config.phoneme_vocab});
  out.emplace_back("decoder.out.b", numcore::Shape{config.phoneme_vocab});
  out.emplace_back("classifier.l1.w", numcore::Shape{2 * h, config.cls_hidden1});
  out.emplace_back("classifier.l1.b", numcore::Shape{config.cls_hidden1});
  out.emplace_back("classifier.l2.w",
                   numcore::Shape{config.cls_hidden1, config.cls_hidden2});
  out.emplace_back("classifier.l2.b", numcore::Shape{config.cls_hidden2});
  out.emplace_back("classifier.out.w", numcore::Shape{config.cls_hidden2, 1});
  out.emplace_back("classifier.out.b", numcore::Shape{1});
  return out;
}

template <typename T>
ModelParams<T> ModelParams<T>::init(const ModelConfig& config,
                                    std::uint64_t seed) {
  config.validate();
  Rng rng(derive_seed(seed, "init"));
  const std::size_t e = config.embed_dim, h = config.hidden_dim;

  ModelParams<T> p;
  p.grapheme_embed =
      detail::uniform_tensor<T>({config.grapheme_vocab, e}, rng, -0.05, 0.05);
  p.phoneme_embed =
      detail::uniform_tensor<T>({config.phoneme_vocab, e}, rng, -0.05, 0.05);
  p.encoder.push_back(detail::init_lstm_layer<T>(e, h, rng));
  p.encoder.push_back(detail::init_lstm_layer<T>(h, h, rng));
  p.decoder.push_back(detail::init_lstm_layer<T>(e, h, rng));
  p.decoder.push_back(detail::init_lstm_layer<T>(h, h, rng));
  p.out_w = detail::uniform_tensor<T>({h, config.phoneme_vocab}, rng, -0.05, 0.05);
  p.out_b = Tensor<T>::zeros({config.phoneme_vocab});
  p.cls1_w = detail::uniform_tensor<T>({2 * h, config.cls_hidden1}, rng, -0.05, 0.05);
  p.cls1_b = Tensor<T>::zeros({config.cls_hidden1});
  p.cls2_w = detail::uniform_tensor<T>({config.cls_hidden1, config.cls_hidden2},
                                       rng, -0.05, 0.05);
  p.cls2_b = Tensor<T>::zeros({config.cls_hidden2});
  p.cls_out_w = detail::uniform_tensor<T>({config.cls_hidden2, 1}, rng, -0.05, 0.05);
  p.cls_out_b = Tensor<T>::zeros({1});
  p.set_requires_grad(true);
  return p;
}

template <typename T>
std::vector<std::pair<std::string, Tensor<T>>> ModelParams<T>::named() const {
  std::vector<std::pair<std::string, Tensor<T>>> out;
  out.emplace_back("embed.graphemes", grapheme_embed);
  out.emplace_back("embed.phonemes", phoneme_embed);
  const auto add_stack = [&out](const char* prefix,
                                const std::vector<LstmLayerParams<T>>& stack) {
    for (std::size_t l = 0; l < stack.size(); ++l) {
      const std::string base = std::string(prefix) + ".l" + std::to_string(l);
      out.emplace_back(base + ".w_x", stack[l].w_x);
      out.emplace_back(base + ".w_h", stack[l].w_h);
      out.emplace_back(base + ".b", stack[l].b);
    }
  };
  add_stack("encoder", encoder);
  add_stack("decoder", decoder);
  out.emplace_back("decoder.out.w", out_w);
  out.emplace_back("decoder.out.b", out_b);
  out.emplace_back("classifier.l1.w", cls1_w);
  out.emplace_back("classifier.l1.b", cls1_b);
  out.emplace_back("classifier.l2.w", cls2_w);
  out.emplace_back("classifier.l2.b", cls2_b);
  out.emplace_back("classifier.out.w", cls_out_w);
  out.emplace_back("classifier.out.b", cls_out_b);
  return out;
}

template <typename T>
std::vector<Tensor<T>> ModelParams<T>::tensors() const {
  std::vector<Tensor<T>> out;
  for (auto& [name, tensor] : named()) out.push_back(tensor);
  return out;
}

template <typename T>
ModelParams<T> ModelParams<T>::from_tensors(const ModelConfig& config,
                                            std::span<const Tensor<T>> tensors) {
  ModelParams<T> p;
  p.encoder.resize(2);
  p.decoder.resize(2);
  std::vector<Tensor<T>*> slots{
      &p.grapheme_embed, &p.phoneme_embed,
      &p.encoder[0].w_x, &p.encoder[0].w_h, &p.encoder[0].b,
      &p.encoder[1].w_x, &p.encoder[1].w_h, &p.encoder[1].b,
      &p.decoder[0].w_x, &p.decoder[0].w_h, &p.decoder[0].b,
      &p.decoder[1].w_x, &p.decoder[1].w_h, &p.decoder[1].b,
      &p.out_w, &p.out_b,
      &p.cls1_w, &p.cls1_b, &p.cls2_w, &p.cls2_b, &p.cls_out_w, &p.cls_out_b};
  if (tensors.size() != slots.size()) {
    throw ContractError("expected " + std::to_string(slots.size()) +
                        " parameter tensors, got " +
                        std::to_string(tensors.size()));
  }
  for (std::size_t i = 0; i < slots.size(); ++i) *slots[i] = tensors[i];

  const auto expected = expected_tensor_layout(config);
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (tensors[i].shape() != expected[i].second) {
      throw ShapeError(
          "parameter '" + expected[i].first + "' has shape " +
          numcore::shape_to_string(tensors[i].shape()) + ", expected " +
          numcore::shape_to_string(expected[i].second));
    }
  }
  return p;
}

template <typename T>
void ModelParams<T>::set_requires_grad(bool rg) const {
  for (auto& [name, tensor] : named()) tensor.set_requires_grad(rg);
}

template <typename T>
std::size_t ModelParams<T>::total_values() const {
  std::size_t n = 0;
  for (auto& [name, tensor] : named()) n += tensor.size();
  return n;
}

}  // namespace mtlg2p::model

#endif  // MTLG2P_MODEL_PARAMS_HPP
