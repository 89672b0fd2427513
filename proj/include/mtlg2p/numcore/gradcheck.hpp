// mtlg2p/numcore/gradcheck.hpp

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

#ifndef MTLG2P_NUMCORE_GRADCHECK_HPP
#define MTLG2P_NUMCORE_GRADCHECK_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mtlg2p/numcore/tape.hpp"
#include "mtlg2p/numcore/tensor.hpp"

namespace mtlg2p::numcore {

/// A scalar-valued loss as a function of a parameter list. The closure must
/// compute the loss from the tensors it is handed (not from captured
/// aliases), because finite differencing evaluates it on perturbed copies.
/// It must also be deterministic: any internal randomness (dropout) has to be
/// reseeded identically on every call.
template <typename T>
using LossFunction =
    std::function<Tensor<T>(Tape<T>*, std::vector<Tensor<T>>&)>;

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::size_t worst_param = 0;
  std::size_t worst_coord = 0;
  double tape_grad = 0.0;
  double fd_grad = 0.0;
  std::size_t coords_checked = 0;
};

/// Optional high-precision loss evaluator for the difference quotients.
/// Central differences subtract two nearly equal numbers, so double-rounded
/// loss values limit the measurable gradient to about eps*|f|/h; a caller
/// that can evaluate the same loss in extended precision (the model code is
/// generic over the scalar type) pushes that floor low enough to resolve
/// even near-zero gradients. The tape gradients under test are still the
/// 64-bit ones.
using PreciseLossFunction =
    std::function<long double(std::vector<Tensor<double>>&)>;

namespace detail {

template <typename T>
std::vector<Tensor<T>> clone_params(const std::vector<Tensor<T>>& params) {
  std::vector<Tensor<T>> out;
  out.reserve(params.size());
  for (const auto& p : params) {
    Tensor<T> c = p.deep_copy();
    c.set_requires_grad(false);
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace detail

/// Compares tape gradients of `loss_fn` against central finite differences
/// for every coordinate of every parameter and returns the maximum relative
/// error  |a - b| / max(|a|, |b|, 1e-8).
///
/// Runs in 64-bit only; finite differences are not reliable in float. The
/// optional `corrupt_tape_grads` hook is a test-harness entry point that may
/// tamper with the tape gradients before comparison (negative controls).
inline GradCheckReport finite_difference_gradcheck(
    const LossFunction<double>& loss_fn, std::vector<Tensor<double>>& params,
    double step = 1e-5,
    const std::function<void(std::vector<Tensor<double>>&)>&
        corrupt_tape_grads = nullptr,
    const PreciseLossFunction& precise_loss_fn = nullptr) {
  // Tape pass on the real parameters.
  for (auto& p : params) {
    p.set_requires_grad(true);
    p.clear_grad();
  }
  Tape<double> tape;
  Tensor<double> loss = loss_fn(&tape, params);
  if (!std::isfinite(loss.item())) {
    throw Error("gradcheck: loss is not finite");
  }
  tape.backward(loss);
  if (corrupt_tape_grads) corrupt_tape_grads(params);

  std::vector<std::vector<double>> tape_grads;
  tape_grads.reserve(params.size());
  std::size_t total_coords = 0;
  for (auto& p : params) {
    auto g = p.ensure_grad();
    tape_grads.emplace_back(g.begin(), g.end());
    total_coords += p.size();
  }

  // Flat coordinate list so the FD loop can be parallelized; every entry is
  // independent given its own parameter clone.
  std::vector<std::pair<std::size_t, std::size_t>> coords;
  coords.reserve(total_coords);
  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    for (std::size_t j = 0; j < params[pi].size(); ++j) coords.emplace_back(pi, j);
  }

  std::vector<double> rel_errors(total_coords, 0.0);
  std::vector<double> fd_values(total_coords, 0.0);

  bool nonfinite = false;
#ifdef _OPENMP
#pragma omp parallel
#endif
  {
    std::vector<Tensor<double>> local = detail::clone_params(params);
#ifdef _OPENMP
#pragma omp for schedule(static)
#endif
    for (std::int64_t c = 0; c < static_cast<std::int64_t>(coords.size()); ++c) {
      const auto [pi, j] = coords[static_cast<std::size_t>(c)];
      auto v = local[pi].values_mut();
      const double saved = v[j];
      long double f_plus, f_minus;
      v[j] = saved + step;
      f_plus = precise_loss_fn
                   ? precise_loss_fn(local)
                   : static_cast<long double>(loss_fn(nullptr, local).item());
      v[j] = saved - step;
      f_minus = precise_loss_fn
                    ? precise_loss_fn(local)
                    : static_cast<long double>(loss_fn(nullptr, local).item());
      v[j] = saved;
      if (!std::isfinite(static_cast<double>(f_plus)) ||
          !std::isfinite(static_cast<double>(f_minus))) {
        nonfinite = true;
        continue;
      }
      const double fd = static_cast<double>((f_plus - f_minus) /
                                            (2.0L * static_cast<long double>(step)));
      const double tg = tape_grads[pi][j];
      const double denom = std::max({std::fabs(tg), std::fabs(fd), 1e-8});
      fd_values[static_cast<std::size_t>(c)] = fd;
      rel_errors[static_cast<std::size_t>(c)] = std::fabs(tg - fd) / denom;
    }
  }
  if (nonfinite) throw Error("gradcheck: perturbed loss is not finite");

  GradCheckReport report;
  report.coords_checked = total_coords;
  for (std::size_t c = 0; c < coords.size(); ++c) {
    if (rel_errors[c] > report.max_rel_error) {
      report.max_rel_error = rel_errors[c];
      report.worst_param = coords[c].first;
      report.worst_coord = coords[c].second;
      report.tape_grad = tape_grads[coords[c].first][coords[c].second];
      report.fd_grad = fd_values[c];
    }
  }
  return report;
}

}  // namespace mtlg2p::numcore

#endif  // MTLG2P_NUMCORE_GRADCHECK_HPP
