// tests/numcore_test.cpp

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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "mtlg2p/numcore/gradcheck.hpp"
#include "mtlg2p/numcore/kernels.hpp"
#include "mtlg2p/numcore/ops.hpp"
#include "mtlg2p/numcore/optim.hpp"
#include "mtlg2p/numcore/tape.hpp"
#include "mtlg2p/numcore/tensor.hpp"
#include "mtlg2p/rng.hpp"

using namespace mtlg2p;
using namespace mtlg2p::numcore;

namespace {

// Independent dot-product routine used as the oracle for matmul results.
template <typename T>
std::vector<T> naive_matmul(const std::vector<T>& a, const std::vector<T>& b,
                            std::size_t m, std::size_t k, std::size_t n) {
  std::vector<T> c(m * n, T(0));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      T acc = T(0);
      for (std::size_t kk = 0; kk < k; ++kk) acc += a[i * k + kk] * b[kk * n + j];
      c[i * n + j] = acc;
    }
  }
  return c;
}

std::vector<double> random_values(Rng& rng, std::size_t n, double lo, double hi) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform_real(lo, hi);
  return v;
}

}  // namespace

TEST_CASE("tensor shape and data invariants") {
  auto t = Tensor<double>::from_data({2, 3}, {1, 2, 3, 4, 5, 6});
  CHECK(t.size() == 6);
  CHECK(t.shape() == Shape{2, 3});
  CHECK_THROWS_AS(Tensor<double>::from_data({2, 2}, {1.0, 2.0}), ShapeError);
  CHECK_THROWS_AS(Tensor<double>::zeros({0, 3}), ShapeError);
  CHECK_THROWS_AS(t.item(), ContractError);
  CHECK(Tensor<double>::scalar(7.0).item() == 7.0);
}

TEST_CASE("kernel parallel variants are bit-identical to serial") {
  Rng rng(42);
  for (auto [m, k, n] : {std::tuple<std::size_t, std::size_t, std::size_t>{3, 4, 5},
                         {25, 64, 256},
                         {25, 500, 100},
                         {1, 1, 7}}) {
    const auto a = random_values(rng, m * k, -2.0, 2.0);
    const auto b = random_values(rng, k * n, -2.0, 2.0);
    std::vector<double> serial(m * n), parallel(m * n);
    kernels::matmul_serial(a.data(), b.data(), serial.data(), m, k, n);
    kernels::matmul_parallel(a.data(), b.data(), parallel.data(), m, k, n);
    CHECK(serial == parallel);

    std::vector<double> s2(k * n), p2(k * n);
    const auto dy = random_values(rng, m * n, -1.0, 1.0);
    kernels::matmul_at_b_serial(a.data(), dy.data(), s2.data(), m, k, n);
    kernels::matmul_at_b_parallel(a.data(), dy.data(), p2.data(), m, k, n);
    CHECK(s2 == p2);

    std::vector<double> s3(m * k), p3(m * k);
    kernels::matmul_a_bt_serial(dy.data(), b.data(), s3.data(), m, n, k);
    kernels::matmul_a_bt_parallel(dy.data(), b.data(), p3.data(), m, n, k);
    CHECK(s3 == p3);

    // Against the independent oracle (tolerance: summation order differs).
    const auto oracle = naive_matmul(a, b, m, k, n);
    for (std::size_t i = 0; i < serial.size(); ++i) {
      CHECK(serial[i] == doctest::Approx(oracle[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("affine forward examples") {
  // Identity weight passes input through.
  auto x = Tensor<double>::from_data({1, 2}, {1, 2});
  auto w = Tensor<double>::from_data({2, 2}, {1, 0, 0, 1});
  auto b = Tensor<double>::from_data({2}, {0, 0});
  auto y = affine<double>(nullptr, x, w, b);
  CHECK(y.values()[0] == 1.0);
  CHECK(y.values()[1] == 2.0);

  // Zero input passes the bias.
  auto x0 = Tensor<double>::from_data({1, 2}, {0, 0});
  auto w2 = Tensor<double>::from_data({2, 2}, {5, 6, 7, 8});
  auto b2 = Tensor<double>::from_data({2}, {3, 4});
  auto y2 = affine<double>(nullptr, x0, w2, b2);
  CHECK(y2.values()[0] == 3.0);
  CHECK(y2.values()[1] == 4.0);

  // Hand matrix multiply, checked against the independent oracle.
  auto x3 = Tensor<double>::from_data({1, 2}, {1, 1});
  auto w3 = Tensor<double>::from_data({2, 2}, {2, 3, 4, 5});
  auto b3 = Tensor<double>::from_data({2}, {1, 1});
  auto y3 = affine<double>(nullptr, x3, w3, b3);
  CHECK(y3.values()[0] == 7.0);
  CHECK(y3.values()[1] == 9.0);
  const auto oracle = naive_matmul<double>({1, 1}, {2, 3, 4, 5}, 1, 2, 2);
  CHECK(y3.values()[0] == oracle[0] + 1.0);
  CHECK(y3.values()[1] == oracle[1] + 1.0);

  // Shape mismatch names both shapes.
  auto bad = Tensor<double>::from_data({3, 2}, {1, 2, 3, 4, 5, 6});
  CHECK_THROWS_WITH_AS(affine<double>(nullptr, x, bad, b),
                       doctest::Contains("[1, 2]"), ShapeError);
}

TEST_CASE("activation examples") {
  auto x = Tensor<double>::from_data({3}, {0.0, -1.5, 2.0});
  auto s = sigmoid<double>(nullptr, x);
  CHECK(s.values()[0] == 0.5);

  auto p = prelu<double>(nullptr, x, 1.0);
  for (std::size_t i = 0; i < 3; ++i) CHECK(p.values()[i] == x.values()[i]);

  auto r = relu<double>(nullptr, x);
  CHECK(r.values()[0] == 0.0);
  CHECK(r.values()[1] == 0.0);
  CHECK(r.values()[2] == 2.0);

  // Uniform logits: every entry of log_softmax is -ln K.
  auto u = Tensor<double>::full({5}, 3.7);
  auto ls = log_softmax<double>(nullptr, u, 0);
  for (double v : ls.values()) CHECK(v == doctest::Approx(-std::log(5.0)));
}

TEST_CASE("log_softmax rows exponentiate to one for extreme logits") {
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t rows = 1 + rng.uniform_index(4);
    const std::size_t cols = 2 + rng.uniform_index(6);
    auto x = Tensor<double>::from_data(
        {rows, cols}, random_values(rng, rows * cols, -50.0, 50.0));
    auto y = log_softmax<double>(nullptr, x, 1);
    for (std::size_t i = 0; i < rows; ++i) {
      double sum = 0.0;
      for (std::size_t j = 0; j < cols; ++j) sum += std::exp(y.values()[i * cols + j]);
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));
    }
  }
}

TEST_CASE("nll_loss examples") {
  // Uniform predictive distribution over V=4 gives ln 4 regardless of target.
  const std::size_t v = 4;
  auto lp = log_softmax<double>(nullptr, Tensor<double>::full({2, v}, 0.0), 1);
  std::vector<std::int32_t> targets{1, 3};
  std::vector<std::uint8_t> mask{1, 1};
  auto loss = nll_loss<double>(nullptr, lp, targets, mask);
  CHECK(loss.item() == doctest::Approx(std::log(4.0)));

  // A row assigning log-prob 0 to its target contributes 0; mean semantics.
  auto rows = Tensor<double>::from_data(
      {2, 2}, {0.0, -50.0, -std::log(2.0), -std::log(2.0)});
  std::vector<std::int32_t> t2{0, 1};
  auto l2 = nll_loss<double>(nullptr, rows, t2, mask);
  CHECK(l2.item() == doctest::Approx(std::log(2.0) / 2.0));

  // Mean of ln 2 and ln 4.
  auto rows3 = Tensor<double>::from_data(
      {2, 2}, {-std::log(2.0), 0.0, -std::log(4.0), 0.0});
  std::vector<std::int32_t> t3{0, 0};
  auto l3 = nll_loss<double>(nullptr, rows3, t3, mask);
  CHECK(l3.item() == doctest::Approx((std::log(2.0) + std::log(4.0)) / 2.0));

  // Out-of-range target.
  std::vector<std::int32_t> bad{0, 9};
  CHECK_THROWS_AS(nll_loss<double>(nullptr, rows, bad, mask), IndexError);

  // Masked positions are excluded.
  std::vector<std::uint8_t> one_masked{1, 0};
  auto l4 = nll_loss<double>(nullptr, rows3, t3, one_masked);
  CHECK(l4.item() == doctest::Approx(std::log(2.0)));
}

TEST_CASE("bce_loss examples") {
  std::vector<std::uint8_t> pos{1}, neg{0};
  auto half = Tensor<double>::from_data({1}, {0.5});
  CHECK(bce_loss<double>(nullptr, half, pos).item() ==
        doctest::Approx(std::log(2.0)));
  CHECK(bce_loss<double>(nullptr, half, neg).item() ==
        doctest::Approx(std::log(2.0)));

  // Confident correct prediction: small, epsilon-bounded loss, never NaN.
  auto confident = Tensor<double>::from_data({1}, {1.0});
  const double loss = bce_loss<double>(nullptr, confident, pos).item();
  CHECK(loss >= 0.0);
  CHECK(loss <= -std::log(1.0 - kBceEpsilon) * 1.01);
}

TEST_CASE("backward on sigmoid at zero") {
  auto w = Tensor<double>::scalar(0.0, /*requires_grad=*/true);
  Tape<double> tape;
  auto loss = sigmoid(&tape, w);
  tape.backward(loss);
  CHECK(w.grad()[0] == doctest::Approx(0.25));
}

TEST_CASE("backward rejects non-scalar loss") {
  auto w = Tensor<double>::from_data({2}, {1.0, 2.0}, true);
  Tape<double> tape;
  auto y = scale(&tape, w, 2.0);
  CHECK_THROWS_AS(tape.backward(y), ContractError);
}

TEST_CASE("backward of sum(W.x) has outer-product structure") {
  // loss = sum(W * x) with x fixed: dL/dW[i][j] = x[j], checked two ways.
  auto w = Tensor<double>::from_data({2, 3}, {1, 2, 3, 4, 5, 6}, true);
  auto x = Tensor<double>::from_data({3, 1}, {7, 11, 13});
  Tape<double> tape;
  auto y = matmul(&tape, w, x);
  auto loss = sum_all(&tape, y);
  tape.backward(loss);
  const std::vector<double> expect{7, 11, 13, 7, 11, 13};
  for (std::size_t i = 0; i < expect.size(); ++i) {
    CHECK(w.grad()[i] == doctest::Approx(expect[i]));
  }

  std::vector<Tensor<double>> params{w};
  auto fn = [&x](Tape<double>* t, std::vector<Tensor<double>>& ps) {
    return sum_all(t, matmul(t, ps[0], x));
  };
  auto report = finite_difference_gradcheck(fn, params);
  CHECK(report.max_rel_error < 1e-8);
}

TEST_CASE("gradients accumulate across multiple uses") {
  auto w = Tensor<double>::from_data({1, 2}, {0.3, -0.7}, true);
  auto fn = [](Tape<double>* t, std::vector<Tensor<double>>& ps) {
    auto a = sigmoid(t, ps[0]);
    auto b = tanh_act(t, ps[0]);  // same tensor used twice
    return sum_all(t, mul(t, a, b));
  };
  std::vector<Tensor<double>> params{w};
  auto report = finite_difference_gradcheck(fn, params);
  CHECK(report.max_rel_error < 1e-7);
}

TEST_CASE("gradcheck basics") {
  // f(w) = w^2 at w = 3: tape gradient 6 matches central differences.
  auto w = Tensor<double>::scalar(3.0, true);
  std::vector<Tensor<double>> params{w};
  auto square = [](Tape<double>* t, std::vector<Tensor<double>>& ps) {
    return sum_all(t, mul(t, ps[0], ps[0]));
  };
  auto report = finite_difference_gradcheck(square, params);
  CHECK(report.max_rel_error < 1e-8);
  CHECK(w.grad()[0] == doctest::Approx(6.0));

  // Constant f: all gradients zero, error zero.
  auto w2 = Tensor<double>::scalar(1.0, true);
  std::vector<Tensor<double>> params2{w2};
  auto constant = [](Tape<double>* t, std::vector<Tensor<double>>& ps) {
    return sum_all(t, scale(t, ps[0], 0.0));
  };
  auto r2 = finite_difference_gradcheck(constant, params2);
  CHECK(r2.max_rel_error == 0.0);

  // Corrupted tape gradient is detected (negative control).
  auto w3 = Tensor<double>::scalar(3.0, true);
  std::vector<Tensor<double>> params3{w3};
  auto r3 = finite_difference_gradcheck(
      square, params3, 1e-5, [](std::vector<Tensor<double>>& ps) {
        ps[0].ensure_grad()[0] += 0.5;
      });
  CHECK(r3.max_rel_error > 1e-4);
}

TEST_CASE("sgd_step examples") {
  auto w = Tensor<double>::scalar(1.0, true);
  w.ensure_grad()[0] = 2.0;
  std::vector<Tensor<double>> params{w};
  sgd_step<double>(params, 0.1);
  CHECK(w.values()[0] == doctest::Approx(0.8));
  CHECK(w.grad()[0] == 0.0);

  // lr = 0 leaves parameters unchanged.
  w.ensure_grad()[0] = 5.0;
  sgd_step<double>(params, 0.0);
  CHECK(w.values()[0] == doctest::Approx(0.8));

  // Two steps on f(w) = w^2 from w = 1 with lr 0.1: w -> 0.8 -> 0.64.
  auto v = Tensor<double>::scalar(1.0, true);
  std::vector<Tensor<double>> vp{v};
  for (int i = 0; i < 2; ++i) {
    Tape<double> tape;
    auto loss = sum_all(&tape, mul(&tape, v, v));
    tape.backward(loss);
    sgd_step<double>(vp, 0.1);
  }
  CHECK(v.values()[0] == doctest::Approx(0.64));

  // Missing gradient is a contract error.
  auto u = Tensor<double>::scalar(1.0, true);
  std::vector<Tensor<double>> up{u};
  CHECK_THROWS_AS(sgd_step<double>(up, 0.1), ContractError);
}

TEST_CASE("clip_global_norm examples") {
  auto a = Tensor<double>::from_data({2}, {0.0, 0.0}, true);
  auto b = Tensor<double>::scalar(0.0, true);
  a.ensure_grad()[0] = 6.0;
  a.ensure_grad()[1] = 0.0;
  b.ensure_grad()[0] = 8.0;  // global norm 10
  std::vector<Tensor<double>> params{a, b};
  CHECK(clip_global_norm<double>(params, 5.0) == doctest::Approx(0.5));
  CHECK(a.grad()[0] == doctest::Approx(3.0));
  CHECK(b.grad()[0] == doctest::Approx(4.0));

  // Below the bound: unchanged, scale 1.
  CHECK(clip_global_norm<double>(params, 100.0) == 1.0);
  CHECK(a.grad()[0] == doctest::Approx(3.0));

  // All-zero gradients: scale 1.
  a.zero_grad();
  b.zero_grad();
  CHECK(clip_global_norm<double>(params, 5.0) == 1.0);
}

TEST_CASE("dropout is seeded and scales kept units") {
  auto x = Tensor<double>::full({4, 8}, 1.0);
  Rng rng1(99), rng2(99);
  auto y1 = dropout<double>(nullptr, x, 0.5, rng1);
  auto y2 = dropout<double>(nullptr, x, 0.5, rng2);
  for (std::size_t i = 0; i < y1.size(); ++i) {
    CHECK(y1.values()[i] == y2.values()[i]);
    CHECK((y1.values()[i] == 0.0 || y1.values()[i] == 2.0));
  }
  Rng rng3(1);
  CHECK(dropout<double>(nullptr, x, 0.0, rng3).same_payload(x));
}

TEST_CASE("embedding gathers rows and scatters gradients") {
  auto table = Tensor<double>::from_data({3, 2}, {1, 2, 3, 4, 5, 6}, true);
  std::vector<std::int32_t> idx{2, 0, 2};
  Tape<double> tape;
  auto out = embedding(&tape, table, idx);
  CHECK(out.values()[0] == 5.0);
  CHECK(out.values()[2] == 1.0);
  auto loss = sum_all(&tape, out);
  tape.backward(loss);
  CHECK(table.grad()[0] == 1.0);  // row 0 used once
  CHECK(table.grad()[2] == 0.0);  // row 1 unused
  CHECK(table.grad()[4] == 2.0);  // row 2 used twice

  std::vector<std::int32_t> bad{3};
  CHECK_THROWS_AS(embedding<double>(nullptr, table, bad), IndexError);
}

TEST_CASE("structure ops round numbers through gradcheck") {
  Rng rng(5);
  auto a = Tensor<double>::from_data({2, 3}, random_values(rng, 6, -1, 1), true);
  auto b = Tensor<double>::from_data({2, 2}, random_values(rng, 4, -1, 1), true);
  std::vector<std::uint8_t> mask{1, 0};
  auto fn = [&mask](Tape<double>* t, std::vector<Tensor<double>>& ps) {
    auto cat = concat_cols(t, ps[0], ps[1]);        // [2 x 5]
    auto left = slice_cols(t, cat, 0, 3);           // [2 x 3]
    auto right = slice_cols(t, cat, 3, 5);          // [2 x 2]
    auto sel = where_rows(t, mask, ps[1], right);   // [2 x 2]
    auto narrow = slice_cols(t, ps[0], 0, 1);       // [2 x 1]
    auto stacked = vstack(t, {left, concat_cols(t, sel, narrow)});
    return sum_all(t, mul(t, stacked, stacked));
  };
  std::vector<Tensor<double>> params{a, b};
  auto report = finite_difference_gradcheck(fn, params);
  CHECK(report.max_rel_error < 1e-7);
}

TEST_CASE("losses are non-negative and deterministic") {
  Rng rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 1 + rng.uniform_index(5);
    const std::size_t v = 2 + rng.uniform_index(5);
    auto lp = log_softmax<double>(
        nullptr,
        Tensor<double>::from_data({n, v}, random_values(rng, n * v, -5, 5)), 1);
    std::vector<std::int32_t> targets(n);
    std::vector<std::uint8_t> mask(n, 1);
    for (auto& t : targets) t = static_cast<std::int32_t>(rng.uniform_index(v));
    CHECK(nll_loss<double>(nullptr, lp, targets, mask).item() >= 0.0);

    auto probs = Tensor<double>::from_data({n}, random_values(rng, n, 0, 1));
    std::vector<std::uint8_t> labels(n);
    for (auto& l : labels) l = rng.uniform_index(2) ? 1 : 0;
    CHECK(bce_loss<double>(nullptr, probs, labels).item() >= 0.0);
  }
}
