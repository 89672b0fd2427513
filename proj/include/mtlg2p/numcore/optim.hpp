// mtlg2p/numcore/optim.hpp

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

#ifndef MTLG2P_NUMCORE_OPTIM_HPP
#define MTLG2P_NUMCORE_OPTIM_HPP

#include <cmath>
#include <span>

#include "mtlg2p/numcore/tensor.hpp"

namespace mtlg2p::numcore {

/// Plain gradient descent: value -= lr * grad, then grads are zeroed.
/// Throws ContractError if any parameter has no populated gradient.
template <typename T>
void sgd_step(std::span<Tensor<T>> params, T lr) {
  for (auto& p : params) {
    if (!p.has_grad()) {
      throw ContractError("sgd_step: gradient missing for parameter of shape " +
                          shape_to_string(p.shape()));
    }
  }
  for (auto& p : params) {
    auto v = p.values_mut();
    auto g = p.grad();
    for (std::size_t i = 0; i < v.size(); ++i) v[i] -= lr * g[i];
    p.zero_grad();
  }
}

/// Scales all gradients by max_norm / ||g|| when the global L2 norm exceeds
/// max_norm. Returns the applied scale (1 when nothing was clipped). The norm
/// is accumulated in double in a fixed order so results are deterministic.
template <typename T>
T clip_global_norm(std::span<Tensor<T>> params, T max_norm) {
  double sq = 0.0;
  for (auto& p : params) {
    if (!p.has_grad()) {
      throw ContractError(
          "clip_global_norm: gradient missing for parameter of shape " +
          shape_to_string(p.shape()));
    }
    for (T g : p.grad()) sq += static_cast<double>(g) * static_cast<double>(g);
  }
  const double norm = std::sqrt(sq);
  if (norm <= static_cast<double>(max_norm) || norm == 0.0) return T(1);
  const T factor = static_cast<T>(static_cast<double>(max_norm) / norm);
  for (auto& p : params) {
    auto g = p.ensure_grad();
    for (auto& gi : g) gi *= factor;
  }
  return factor;
}

}  // namespace mtlg2p::numcore

#endif  // MTLG2P_NUMCORE_OPTIM_HPP
