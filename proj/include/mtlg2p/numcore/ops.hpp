// mtlg2p/numcore/ops.hpp

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

#ifndef MTLG2P_NUMCORE_OPS_HPP
#define MTLG2P_NUMCORE_OPS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "mtlg2p/numcore/kernels.hpp"
#include "mtlg2p/numcore/tape.hpp"
#include "mtlg2p/numcore/tensor.hpp"
#include "mtlg2p/rng.hpp"

// Differentiable tensor operations. Every op computes its forward result,
// and when a tape is supplied and any input requires gradients it records
// one backward closure. Passing tape == nullptr runs inference-only.

namespace mtlg2p::numcore {

namespace detail {

template <typename T>
bool wants_grad(Tape<T>* tape, std::initializer_list<bool> input_flags) {
  if (tape == nullptr) return false;
  for (bool f : input_flags) {
    if (f) return true;
  }
  return false;
}

template <typename T>
void require_rank2(const Tensor<T>& t, const char* what) {
  if (t.rank() != 2) {
    throw ShapeError(std::string(what) + " must be rank 2, got shape " +
                     shape_to_string(t.shape()));
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Linear algebra
// ---------------------------------------------------------------------------

/// out[m x n] = a[m x k] * w[k x n]
template <typename T>
Tensor<T> matmul(Tape<T>* tape, const Tensor<T>& a, const Tensor<T>& w) {
  detail::require_rank2(a, "matmul lhs");
  detail::require_rank2(w, "matmul rhs");
  const std::size_t m = a.dim(0), k = a.dim(1), n = w.dim(1);
  if (w.dim(0) != k) {
    throw ShapeError("matmul inner dimensions disagree: " +
                     shape_to_string(a.shape()) + " vs " +
                     shape_to_string(w.shape()));
  }
  Tensor<T> out = Tensor<T>::zeros({m, n});
  kernels::matmul(a.values().data(), w.values().data(),
                  out.values_mut().data(), m, k, n);
  if (detail::wants_grad(tape, {a.requires_grad(), w.requires_grad()})) {
    out.set_requires_grad(true);
    tape->record([a, w, out, m, k, n]() mutable {
      if (!out.has_grad()) return;
      const T* dy = out.grad().data();
      if (a.requires_grad()) {
        kernels::matmul_a_bt(dy, w.values().data(), a.ensure_grad().data(), m,
                             n, k, /*accumulate=*/true);
      }
      if (w.requires_grad()) {
        kernels::matmul_at_b(a.values().data(), dy, w.ensure_grad().data(), m,
                             k, n, /*accumulate=*/true);
      }
    });
  }
  return out;
}

/// out[b x n] = x[b x m] * w[m x n] + bias[n]
template <typename T>
Tensor<T> affine(Tape<T>* tape, const Tensor<T>& x, const Tensor<T>& w,
                 const Tensor<T>& bias) {
  detail::require_rank2(x, "affine input");
  detail::require_rank2(w, "affine weight");
  const std::size_t b = x.dim(0), m = x.dim(1), n = w.dim(1);
  if (w.dim(0) != m) {
    throw ShapeError("affine inner dimensions disagree: " +
                     shape_to_string(x.shape()) + " vs " +
                     shape_to_string(w.shape()));
  }
  if (bias.rank() != 1 || bias.dim(0) != n) {
    throw ShapeError("affine bias shape " + shape_to_string(bias.shape()) +
                     " does not match weight shape " +
                     shape_to_string(w.shape()));
  }
  Tensor<T> out = Tensor<T>::zeros({b, n});
  T* o = out.values_mut().data();
  const T* bv = bias.values().data();
  for (std::size_t i = 0; i < b; ++i) {
    std::copy(bv, bv + n, o + i * n);
  }
  kernels::matmul(x.values().data(), w.values().data(), o, b, m, n,
                  /*accumulate=*/true);
  if (detail::wants_grad(tape, {x.requires_grad(), w.requires_grad(),
                                bias.requires_grad()})) {
    out.set_requires_grad(true);
    tape->record([x, w, bias, out, b, m, n]() mutable {
      if (!out.has_grad()) return;
      const T* dy = out.grad().data();
      if (x.requires_grad()) {
        kernels::matmul_a_bt(dy, w.values().data(), x.ensure_grad().data(), b,
                             n, m, /*accumulate=*/true);
      }
      if (w.requires_grad()) {
        kernels::matmul_at_b(x.values().data(), dy, w.ensure_grad().data(), b,
                             m, n, /*accumulate=*/true);
      }
      if (bias.requires_grad()) {
        auto db = bias.ensure_grad();
        for (std::size_t i = 0; i < b; ++i) {
          const T* row = dy + i * n;
          for (std::size_t j = 0; j < n; ++j) db[j] += row[j];
        }
      }
    });
  }
  return out;
}

// ---------------------------------------------------------------------------
// Elementwise
// ---------------------------------------------------------------------------

template <typename T>
Tensor<T> add(Tape<T>* tape, const Tensor<T>& a, const Tensor<T>& b) {
  if (a.shape() != b.shape()) {
    throw ShapeError("add shapes disagree: " + shape_to_string(a.shape()) +
                     " vs " + shape_to_string(b.shape()));
  }
  Tensor<T> out = Tensor<T>::zeros(a.shape());
  auto o = out.values_mut();
  auto av = a.values();
  auto bv = b.values();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = av[i] + bv[i];
  if (detail::wants_grad(tape, {a.requires_grad(), b.requires_grad()})) {
    out.set_requires_grad(true);
    tape->record([a, b, out]() mutable {
      if (!out.has_grad()) return;
      auto dy = out.grad();
      if (a.requires_grad()) a.accumulate_grad(dy);
      if (b.requires_grad()) b.accumulate_grad(dy);
    });
  }
  return out;
}

/// Hadamard product.
template <typename T>
Tensor<T> mul(Tape<T>* tape, const Tensor<T>& a, const Tensor<T>& b) {
  if (a.shape() != b.shape()) {
    throw ShapeError("mul shapes disagree: " + shape_to_string(a.shape()) +
                     " vs " + shape_to_string(b.shape()));
  }
  Tensor<T> out = Tensor<T>::zeros(a.shape());
  auto o = out.values_mut();
  auto av = a.values();
  auto bv = b.values();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = av[i] * bv[i];
  if (detail::wants_grad(tape, {a.requires_grad(), b.requires_grad()})) {
    out.set_requires_grad(true);
    tape->record([a, b, out]() mutable {
      if (!out.has_grad()) return;
      auto dy = out.grad();
      if (a.requires_grad()) {
        auto da = a.ensure_grad();
        auto bv2 = b.values();
        for (std::size_t i = 0; i < da.size(); ++i) da[i] += dy[i] * bv2[i];
      }
      if (b.requires_grad()) {
        auto db = b.ensure_grad();
        auto av2 = a.values();
        for (std::size_t i = 0; i < db.size(); ++i) db[i] += dy[i] * av2[i];
      }
    });
  }
  return out;
}

template <typename T>
Tensor<T> scale(Tape<T>* tape, const Tensor<T>& x, T factor) {
  Tensor<T> out = Tensor<T>::zeros(x.shape());
  auto o = out.values_mut();
  auto xv = x.values();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = factor * xv[i];
  if (detail::wants_grad(tape, {x.requires_grad()})) {
    out.set_requires_grad(true);
    tape->record([x, out, factor]() mutable {
      if (!out.has_grad()) return;
      auto dy = out.grad();
      auto dx = x.ensure_grad();
      for (std::size_t i = 0; i < dx.size(); ++i) dx[i] += factor * dy[i];
    });
  }
  return out;
}

template <typename T>
Tensor<T> sum_all(Tape<T>* tape, const Tensor<T>& x) {
  T acc = T(0);
  for (T v : x.values()) acc += v;
  Tensor<T> out = Tensor<T>::scalar(acc);
  if (detail::wants_grad(tape, {x.requires_grad()})) {
    out.set_requires_grad(true);
    tape->record([x, out]() mutable {
      if (!out.has_grad()) return;
      const T g = out.grad()[0];
      auto dx = x.ensure_grad();
      for (std::size_t i = 0; i < dx.size(); ++i) dx[i] += g;
    });
  }
  return out;
}

// ---------------------------------------------------------------------------
// Activations
// ---------------------------------------------------------------------------

template <typename T>
T sigmoid_scalar(T v) {
  if (v >= T(0)) {
    return T(1) / (T(1) + std::exp(-v));
  }
  const T e = std::exp(v);
  return e / (T(1) + e);
}

template <typename T>
Tensor<T> sigmoid(Tape<T>* tape, const Tensor<T>& x) {
  Tensor<T> out = Tensor<T>::zeros(x.shape());
  auto o = out.values_mut();
  auto xv = x.values();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = sigmoid_scalar(xv[i]);
  if (detail::wants_grad(tape, {x.requires_grad()})) {
    out.set_requires_grad(true);
    tape->record([x, out]() mutable {
      if (!out.has_grad()) return;
      auto dy = out.grad();
      auto y = out.values();
      auto dx = x.ensure_grad();
      for (std::size_t i = 0; i < dx.size(); ++i) {
        dx[i] += dy[i] * y[i] * (T(1) - y[i]);
      }
    });
  }
  return out;
}

template <typename T>
Tensor<T> tanh_act(Tape<T>* tape, const Tensor<T>& x) {
  Tensor<T> out = Tensor<T>::zeros(x.shape());
  auto o = out.values_mut();
  auto xv = x.values();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = std::tanh(xv[i]);
  if (detail::wants_grad(tape, {x.requires_grad()})) {
    out.set_requires_grad(true);
    tape->record([x, out]() mutable {
      if (!out.has_grad()) return;
      auto dy = out.grad();
      auto y = out.values();
      auto dx = x.ensure_grad();
      for (std::size_t i = 0; i < dx.size(); ++i) {
        dx[i] += dy[i] * (T(1) - y[i] * y[i]);
      }
    });
  }
  return out;
}

template <typename T>
Tensor<T> relu(Tape<T>* tape, const Tensor<T>& x) {
  Tensor<T> out = Tensor<T>::zeros(x.shape());
  auto o = out.values_mut();
  auto xv = x.values();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = xv[i] > T(0) ? xv[i] : T(0);
  if (detail::wants_grad(tape, {x.requires_grad()})) {
    out.set_requires_grad(true);
    tape->record([x, out]() mutable {
      if (!out.has_grad()) return;
      auto dy = out.grad();
      auto xv2 = x.values();
      auto dx = x.ensure_grad();
      for (std::size_t i = 0; i < dx.size(); ++i) {
        if (xv2[i] > T(0)) dx[i] += dy[i];
      }
    });
  }
  return out;
}

/// PReLU with a constant (non-trainable) slope; alpha = 1 is the identity.
template <typename T>
Tensor<T> prelu(Tape<T>* tape, const Tensor<T>& x, T alpha) {
  Tensor<T> out = Tensor<T>::zeros(x.shape());
  auto o = out.values_mut();
  auto xv = x.values();
  for (std::size_t i = 0; i < o.size(); ++i) {
    o[i] = xv[i] >= T(0) ? xv[i] : alpha * xv[i];
  }
  if (detail::wants_grad(tape, {x.requires_grad()})) {
    out.set_requires_grad(true);
    tape->record([x, out, alpha]() mutable {
      if (!out.has_grad()) return;
      auto dy = out.grad();
      auto xv2 = x.values();
      auto dx = x.ensure_grad();
      for (std::size_t i = 0; i < dx.size(); ++i) {
        dx[i] += dy[i] * (xv2[i] >= T(0) ? T(1) : alpha);
      }
    });
  }
  return out;
}

namespace detail {

// Iteration pattern shared by log_softmax forward and backward: the tensor is
// a set of independent slices along the chosen axis.
struct AxisPlan {
  std::size_t slices;
  std::size_t slice_len;
  std::size_t slice_stride;
  std::size_t elem_stride;
};

template <typename T>
AxisPlan axis_plan(const Tensor<T>& x, std::size_t axis) {
  if (x.rank() == 1) {
    if (axis != 0) {
      throw ShapeError("log_softmax axis " + std::to_string(axis) +
                       " invalid for shape " + shape_to_string(x.shape()));
    }
    return {1, x.dim(0), 0, 1};
  }
  if (x.rank() == 2) {
    if (axis == 1) return {x.dim(0), x.dim(1), x.dim(1), 1};
    if (axis == 0) return {x.dim(1), x.dim(0), 1, x.dim(1)};
  }
  throw ShapeError("log_softmax axis " + std::to_string(axis) +
                   " invalid for shape " + shape_to_string(x.shape()));
}

}  // namespace detail

/// Log-softmax along an axis, computed with max subtraction.
template <typename T>
Tensor<T> log_softmax(Tape<T>* tape, const Tensor<T>& x, std::size_t axis) {
  const auto plan = detail::axis_plan(x, axis);
  Tensor<T> out = Tensor<T>::zeros(x.shape());
  auto o = out.values_mut();
  auto xv = x.values();
  for (std::size_t s = 0; s < plan.slices; ++s) {
    const std::size_t base = s * plan.slice_stride;
    T maxv = xv[base];
    for (std::size_t j = 1; j < plan.slice_len; ++j) {
      maxv = std::max(maxv, xv[base + j * plan.elem_stride]);
    }
    T sum = T(0);
    for (std::size_t j = 0; j < plan.slice_len; ++j) {
      sum += std::exp(xv[base + j * plan.elem_stride] - maxv);
    }
    const T log_z = maxv + std::log(sum);
    for (std::size_t j = 0; j < plan.slice_len; ++j) {
      const std::size_t idx = base + j * plan.elem_stride;
      o[idx] = xv[idx] - log_z;
    }
  }
  if (detail::wants_grad(tape, {x.requires_grad()})) {
    out.set_requires_grad(true);
    tape->record([x, out, plan]() mutable {
      if (!out.has_grad()) return;
      auto dy = out.grad();
      auto y = out.values();
      auto dx = x.ensure_grad();
      for (std::size_t s = 0; s < plan.slices; ++s) {
        const std::size_t base = s * plan.slice_stride;
        T dsum = T(0);
        for (std::size_t j = 0; j < plan.slice_len; ++j) {
          dsum += dy[base + j * plan.elem_stride];
        }
        for (std::size_t j = 0; j < plan.slice_len; ++j) {
          const std::size_t idx = base + j * plan.elem_stride;
          dx[idx] += dy[idx] - std::exp(y[idx]) * dsum;
        }
      }
    });
  }
  return out;
}

// ---------------------------------------------------------------------------
// Structure ops
// ---------------------------------------------------------------------------

/// Row gather: out[i] = table[indices[i]]. The usual embedding lookup.
template <typename T>
Tensor<T> embedding(Tape<T>* tape, const Tensor<T>& table,
                    std::span<const std::int32_t> indices) {
  detail::require_rank2(table, "embedding table");
  const std::size_t v = table.dim(0), e = table.dim(1);
  const std::size_t b = indices.size();
  if (b == 0) throw ContractError("embedding requires at least one index");
  Tensor<T> out = Tensor<T>::zeros({b, e});
  auto o = out.values_mut();
  auto tv = table.values();
  for (std::size_t i = 0; i < b; ++i) {
    const std::int32_t idx = indices[i];
    if (idx < 0 || static_cast<std::size_t>(idx) >= v) {
      throw IndexError("embedding index " + std::to_string(idx) +
                       " out of range for table with " + std::to_string(v) +
                       " rows");
    }
    std::copy(tv.begin() + static_cast<std::ptrdiff_t>(idx * e),
              tv.begin() + static_cast<std::ptrdiff_t>((idx + 1) * e),
              o.begin() + static_cast<std::ptrdiff_t>(i * e));
  }
  if (detail::wants_grad(tape, {table.requires_grad()})) {
    out.set_requires_grad(true);
    std::vector<std::int32_t> idx_copy(indices.begin(), indices.end());
    tape->record([table, out, idx_copy, e]() mutable {
      if (!out.has_grad()) return;
      auto dy = out.grad();
      auto dt = table.ensure_grad();
      for (std::size_t i = 0; i < idx_copy.size(); ++i) {
        const std::size_t row = static_cast<std::size_t>(idx_copy[i]);
        for (std::size_t j = 0; j < e; ++j) {
          dt[row * e + j] += dy[i * e + j];
        }
      }
    });
  }
  return out;
}

/// Concatenates two matrices along columns.
template <typename T>
Tensor<T> concat_cols(Tape<T>* tape, const Tensor<T>& a, const Tensor<T>& b) {
  detail::require_rank2(a, "concat_cols lhs");
  detail::require_rank2(b, "concat_cols rhs");
  if (a.dim(0) != b.dim(0)) {
    throw ShapeError("concat_cols row counts disagree: " +
                     shape_to_string(a.shape()) + " vs " +
                     shape_to_string(b.shape()));
  }
  const std::size_t rows = a.dim(0), na = a.dim(1), nb = b.dim(1);
  Tensor<T> out = Tensor<T>::zeros({rows, na + nb});
  auto o = out.values_mut();
  auto av = a.values();
  auto bv = b.values();
  for (std::size_t i = 0; i < rows; ++i) {
    std::copy(av.begin() + static_cast<std::ptrdiff_t>(i * na),
              av.begin() + static_cast<std::ptrdiff_t>((i + 1) * na),
              o.begin() + static_cast<std::ptrdiff_t>(i * (na + nb)));
    std::copy(bv.begin() + static_cast<std::ptrdiff_t>(i * nb),
              bv.begin() + static_cast<std::ptrdiff_t>((i + 1) * nb),
              o.begin() + static_cast<std::ptrdiff_t>(i * (na + nb) + na));
  }
  if (detail::wants_grad(tape, {a.requires_grad(), b.requires_grad()})) {
    out.set_requires_grad(true);
    tape->record([a, b, out, rows, na, nb]() mutable {
      if (!out.has_grad()) return;
      auto dy = out.grad();
      if (a.requires_grad()) {
        auto da = a.ensure_grad();
        for (std::size_t i = 0; i < rows; ++i) {
          for (std::size_t j = 0; j < na; ++j) {
            da[i * na + j] += dy[i * (na + nb) + j];
          }
        }
      }
      if (b.requires_grad()) {
        auto db = b.ensure_grad();
        for (std::size_t i = 0; i < rows; ++i) {
          for (std::size_t j = 0; j < nb; ++j) {
            db[i * nb + j] += dy[i * (na + nb) + na + j];
          }
        }
      }
    });
  }
  return out;
}

/// Column slice out[i, :] = x[i, begin:end].
template <typename T>
Tensor<T> slice_cols(Tape<T>* tape, const Tensor<T>& x, std::size_t begin,
                     std::size_t end) {
  detail::require_rank2(x, "slice_cols input");
  const std::size_t rows = x.dim(0), cols = x.dim(1);
  if (begin >= end || end > cols) {
    throw ShapeError("slice_cols range [" + std::to_string(begin) + ", " +
                     std::to_string(end) + ") invalid for shape " +
                     shape_to_string(x.shape()));
  }
  const std::size_t width = end - begin;
  Tensor<T> out = Tensor<T>::zeros({rows, width});
  auto o = out.values_mut();
  auto xv = x.values();
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < width; ++j) {
      o[i * width + j] = xv[i * cols + begin + j];
    }
  }
  if (detail::wants_grad(tape, {x.requires_grad()})) {
    out.set_requires_grad(true);
    tape->record([x, out, rows, cols, begin, width]() mutable {
      if (!out.has_grad()) return;
      auto dy = out.grad();
      auto dx = x.ensure_grad();
      for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < width; ++j) {
          dx[i * cols + begin + j] += dy[i * width + j];
        }
      }
    });
  }
  return out;
}

/// Stacks matrices with equal column counts on top of each other.
template <typename T>
Tensor<T> vstack(Tape<T>* tape, const std::vector<Tensor<T>>& blocks) {
  if (blocks.empty()) throw ContractError("vstack requires at least one block");
  const std::size_t cols = blocks.front().dim(1);
  std::size_t rows = 0;
  bool any_grad = false;
  for (const auto& blk : blocks) {
    detail::require_rank2(blk, "vstack block");
    if (blk.dim(1) != cols) {
      throw ShapeError("vstack column counts disagree: " +
                       shape_to_string(blocks.front().shape()) + " vs " +
                       shape_to_string(blk.shape()));
    }
    rows += blk.dim(0);
    any_grad = any_grad || blk.requires_grad();
  }
  Tensor<T> out = Tensor<T>::zeros({rows, cols});
  auto o = out.values_mut();
  std::size_t offset = 0;
  for (const auto& blk : blocks) {
    auto bv = blk.values();
    std::copy(bv.begin(), bv.end(),
              o.begin() + static_cast<std::ptrdiff_t>(offset));
    offset += bv.size();
  }
  if (tape != nullptr && any_grad) {
    out.set_requires_grad(true);
    tape->record([blocks, out]() mutable {
      if (!out.has_grad()) return;
      auto dy = out.grad();
      std::size_t pos = 0;
      for (auto& blk : blocks) {
        const std::size_t len = blk.size();
        if (blk.requires_grad()) {
          blk.accumulate_grad(dy.subspan(pos, len));
        }
        pos += len;
      }
    });
  }
  return out;
}

/// Row-wise select: out[i] = mask[i] ? a[i] : b[i]. Used to freeze recurrent
/// states past each sequence's true end inside padded batches.
template <typename T>
Tensor<T> where_rows(Tape<T>* tape, const std::vector<std::uint8_t>& mask,
                     const Tensor<T>& a, const Tensor<T>& b) {
  detail::require_rank2(a, "where_rows input");
  if (a.shape() != b.shape()) {
    throw ShapeError("where_rows shapes disagree: " +
                     shape_to_string(a.shape()) + " vs " +
                     shape_to_string(b.shape()));
  }
  const std::size_t rows = a.dim(0), cols = a.dim(1);
  if (mask.size() != rows) {
    throw ShapeError("where_rows mask length " + std::to_string(mask.size()) +
                     " does not match rows of " + shape_to_string(a.shape()));
  }
  Tensor<T> out = Tensor<T>::zeros({rows, cols});
  auto o = out.values_mut();
  auto av = a.values();
  auto bv = b.values();
  for (std::size_t i = 0; i < rows; ++i) {
    const auto& src = mask[i] ? av : bv;
    for (std::size_t j = 0; j < cols; ++j) o[i * cols + j] = src[i * cols + j];
  }
  if (detail::wants_grad(tape, {a.requires_grad(), b.requires_grad()})) {
    out.set_requires_grad(true);
    tape->record([a, b, out, mask, rows, cols]() mutable {
      if (!out.has_grad()) return;
      auto dy = out.grad();
      for (std::size_t i = 0; i < rows; ++i) {
        const Tensor<T>& target = mask[i] ? a : b;
        if (!target.requires_grad()) continue;
        auto dst = target.ensure_grad();
        for (std::size_t j = 0; j < cols; ++j) {
          dst[i * cols + j] += dy[i * cols + j];
        }
      }
    });
  }
  return out;
}

/// Inverted dropout; kept units are scaled by 1/(1-p). Mask draws come from
/// the supplied seeded generator, one per element in row-major order.
template <typename T>
Tensor<T> dropout(Tape<T>* tape, const Tensor<T>& x, double p, Rng& rng) {
  if (p < 0.0 || p >= 1.0) {
    throw ContractError("dropout probability must be in [0, 1), got " +
                        std::to_string(p));
  }
  if (p == 0.0) return x;
  std::vector<T> mask(x.size());
  const T keep_scale = T(1.0 / (1.0 - p));
  for (auto& m : mask) {
    m = rng.uniform_real() >= p ? keep_scale : T(0);
  }
  Tensor<T> out = Tensor<T>::zeros(x.shape());
  auto o = out.values_mut();
  auto xv = x.values();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = xv[i] * mask[i];
  if (detail::wants_grad(tape, {x.requires_grad()})) {
    out.set_requires_grad(true);
    tape->record([x, out, mask]() mutable {
      if (!out.has_grad()) return;
      auto dy = out.grad();
      auto dx = x.ensure_grad();
      for (std::size_t i = 0; i < dx.size(); ++i) dx[i] += dy[i] * mask[i];
    });
  }
  return out;
}

// ---------------------------------------------------------------------------
// Losses
// ---------------------------------------------------------------------------

/// Mean negative log-likelihood over unmasked positions of a [N x V]
/// log-probability matrix.
template <typename T>
Tensor<T> nll_loss(Tape<T>* tape, const Tensor<T>& log_probs,
                   std::span<const std::int32_t> targets,
                   std::span<const std::uint8_t> mask) {
  detail::require_rank2(log_probs, "nll_loss log_probs");
  const std::size_t n = log_probs.dim(0), v = log_probs.dim(1);
  if (targets.size() != n || mask.size() != n) {
    throw ShapeError("nll_loss targets/mask length " +
                     std::to_string(targets.size()) + "/" +
                     std::to_string(mask.size()) + " does not match " +
                     shape_to_string(log_probs.shape()));
  }
  std::size_t unmasked = 0;
  T acc = T(0);
  auto lp = log_probs.values();
  for (std::size_t i = 0; i < n; ++i) {
    if (!mask[i]) continue;
    const std::int32_t t = targets[i];
    if (t < 0 || static_cast<std::size_t>(t) >= v) {
      throw IndexError("nll_loss target index " + std::to_string(t) +
                       " out of range for vocabulary of " + std::to_string(v));
    }
    acc -= lp[i * v + static_cast<std::size_t>(t)];
    ++unmasked;
  }
  if (unmasked == 0) {
    throw ContractError("nll_loss requires at least one unmasked position");
  }
  Tensor<T> out = Tensor<T>::scalar(acc / static_cast<T>(unmasked));
  if (detail::wants_grad(tape, {log_probs.requires_grad()})) {
    out.set_requires_grad(true);
    std::vector<std::int32_t> t_copy(targets.begin(), targets.end());
    std::vector<std::uint8_t> m_copy(mask.begin(), mask.end());
    tape->record([log_probs, out, t_copy, m_copy, v, unmasked]() mutable {
      if (!out.has_grad()) return;
      const T g = out.grad()[0] / static_cast<T>(unmasked);
      auto dl = log_probs.ensure_grad();
      for (std::size_t i = 0; i < t_copy.size(); ++i) {
        if (!m_copy[i]) continue;
        dl[i * v + static_cast<std::size_t>(t_copy[i])] -= g;
      }
    });
  }
  return out;
}

inline constexpr double kBceEpsilon = 1e-7;

/// Mean binary cross-entropy over a batch of probabilities in (0, 1).
/// Inputs are clamped to [eps, 1-eps] before the logs.
template <typename T>
Tensor<T> bce_loss(Tape<T>* tape, const Tensor<T>& probs,
                   std::span<const std::uint8_t> labels) {
  const std::size_t n = probs.size();
  if (labels.size() != n) {
    throw ShapeError("bce_loss labels length " + std::to_string(labels.size()) +
                     " does not match predictions of shape " +
                     shape_to_string(probs.shape()));
  }
  if (n == 0) throw ContractError("bce_loss requires at least one prediction");
  const T eps = static_cast<T>(kBceEpsilon);
  auto pv = probs.values();
  T acc = T(0);
  for (std::size_t i = 0; i < n; ++i) {
    const T p = std::clamp(pv[i], eps, T(1) - eps);
    acc -= labels[i] ? std::log(p) : std::log(T(1) - p);
  }
  Tensor<T> out = Tensor<T>::scalar(acc / static_cast<T>(n));
  if (detail::wants_grad(tape, {probs.requires_grad()})) {
    out.set_requires_grad(true);
    std::vector<std::uint8_t> l_copy(labels.begin(), labels.end());
    tape->record([probs, out, l_copy, eps, n]() mutable {
      if (!out.has_grad()) return;
      const T g = out.grad()[0] / static_cast<T>(n);
      auto pv2 = probs.values();
      auto dp = probs.ensure_grad();
      for (std::size_t i = 0; i < n; ++i) {
        // Clamped region contributes no gradient.
        if (pv2[i] < eps || pv2[i] > T(1) - eps) continue;
        const T y = l_copy[i] ? T(1) : T(0);
        dp[i] += g * (pv2[i] - y) / (pv2[i] * (T(1) - pv2[i]));
      }
    });
  }
  return out;
}

}  // namespace mtlg2p::numcore

#endif  // MTLG2P_NUMCORE_OPS_HPP
