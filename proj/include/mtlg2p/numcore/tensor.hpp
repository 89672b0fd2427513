// mtlg2p/numcore/tensor.hpp

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

#ifndef MTLG2P_NUMCORE_TENSOR_HPP
#define MTLG2P_NUMCORE_TENSOR_HPP

#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "mtlg2p/error.hpp"

namespace mtlg2p::numcore {

using Shape = std::vector<std::size_t>;

inline std::size_t shape_numel(const Shape& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

inline std::string shape_to_string(const Shape& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

/// Dense row-major tensor handle. Copies share the underlying payload, which
/// is what the tape needs: a backward closure and the forward code see the
/// same gradient buffer. Constness is shallow, as for a smart pointer:
/// payload mutators are const members. Element type is float or double;
/// training defaults to float, gradient checking requires double.
template <typename T>
class Tensor {
  static_assert(std::is_floating_point_v<T>);

 public:
  Tensor() = default;

  static Tensor zeros(Shape shape, bool requires_grad = false) {
    return Tensor(std::move(shape), {}, requires_grad, /*fill=*/T(0));
  }

  static Tensor full(Shape shape, T value, bool requires_grad = false) {
    return Tensor(std::move(shape), {}, requires_grad, value);
  }

  static Tensor from_data(Shape shape, std::vector<T> values,
                          bool requires_grad = false) {
    Tensor t(std::move(shape), std::move(values), requires_grad);
    return t;
  }

  static Tensor scalar(T value, bool requires_grad = false) {
    return from_data({1}, {value}, requires_grad);
  }

  bool valid() const { return payload_ != nullptr; }

  const Shape& shape() const { return payload_->shape; }
  std::size_t rank() const { return payload_->shape.size(); }
  std::size_t dim(std::size_t i) const { return payload_->shape[i]; }
  std::size_t size() const { return payload_->values.size(); }

  std::span<const T> values() const { return payload_->values; }
  std::span<T> values_mut() const { return payload_->values; }

  /// Value of a one-element tensor.
  T item() const {
    if (size() != 1) {
      throw ContractError("item() requires a scalar tensor, got shape " +
                          shape_to_string(shape()));
    }
    return payload_->values[0];
  }

  bool requires_grad() const { return payload_->requires_grad; }
  void set_requires_grad(bool rg) const { payload_->requires_grad = rg; }

  bool has_grad() const { return !payload_->grad.empty(); }

  std::span<const T> grad() const {
    if (!has_grad()) {
      throw ContractError("gradient not populated for tensor of shape " +
                          shape_to_string(shape()));
    }
    return payload_->grad;
  }

  /// Gradient buffer, allocated to zeros on first use.
  std::span<T> ensure_grad() const {
    if (payload_->grad.empty()) payload_->grad.assign(size(), T(0));
    return payload_->grad;
  }

  void accumulate_grad(std::span<const T> g) const {
    auto dst = ensure_grad();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += g[i];
  }

  void zero_grad() const {
    if (!payload_->grad.empty()) payload_->grad.assign(size(), T(0));
  }

  void clear_grad() const { payload_->grad.clear(); }

  /// Independent copy of values (gradient buffer not copied).
  Tensor deep_copy() const {
    Tensor t = from_data(shape(), std::vector<T>(payload_->values),
                         requires_grad());
    return t;
  }

  bool same_payload(const Tensor& other) const {
    return payload_ == other.payload_;
  }

  bool all_finite() const {
    for (T v : payload_->values) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  }

 private:
  struct Payload {
    Shape shape;
    std::vector<T> values;
    std::vector<T> grad;
    bool requires_grad = false;
  };

  Tensor(Shape shape, std::vector<T> values, bool requires_grad,
         T fill = T(0)) {
    for (std::size_t d : shape) {
      if (d == 0) {
        throw ShapeError("tensor extents must be positive, got " +
                         shape_to_string(shape));
      }
    }
    const std::size_t n = shape_numel(shape);
    payload_ = std::make_shared<Payload>();
    payload_->shape = std::move(shape);
    if (values.empty()) {
      payload_->values.assign(n, fill);
    } else {
      if (values.size() != n) {
        throw ShapeError("data length " + std::to_string(values.size()) +
                         " does not match shape " +
                         shape_to_string(payload_->shape));
      }
      payload_->values = std::move(values);
    }
    payload_->requires_grad = requires_grad;
  }

  std::shared_ptr<Payload> payload_;
};

}  // namespace mtlg2p::numcore

#endif  // MTLG2P_NUMCORE_TENSOR_HPP
