// mtlg2p/numcore/tape.hpp

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

#ifndef MTLG2P_NUMCORE_TAPE_HPP
#define MTLG2P_NUMCORE_TAPE_HPP

#include <functional>
#include <vector>

#include "mtlg2p/error.hpp"
#include "mtlg2p/numcore/tensor.hpp"

namespace mtlg2p::numcore {

/// Wengert list for reverse-mode differentiation. Ops append one closure per
/// executed operation; backward() replays them in reverse, which visits every
/// recorded operation exactly once (execution order is already a topological
/// order of the graph). One tape per training step, single-threaded.
template <typename T>
class Tape {
 public:
  void record(std::function<void()> backward_step) {
    steps_.push_back(std::move(backward_step));
  }

  std::size_t size() const { return steps_.size(); }

  void clear() { steps_.clear(); }

  /// Seeds d(loss)/d(loss) = 1 and propagates. Gradients accumulate
  /// additively, so callers zero parameter grads between steps (sgd_step
  /// does this). Call once per recorded forward pass.
  void backward(Tensor<T> loss) {
    if (loss.size() != 1) {
      throw ContractError("backward requires a scalar loss, got shape " +
                          shape_to_string(loss.shape()));
    }
    auto seed = loss.ensure_grad();
    seed[0] += T(1);
    for (auto it = steps_.rbegin(); it != steps_.rend(); ++it) (*it)();
  }

 private:
  std::vector<std::function<void()>> steps_;
};

}  // namespace mtlg2p::numcore

#endif  // MTLG2P_NUMCORE_TAPE_HPP
