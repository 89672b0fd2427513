// tools/bench.cpp

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

// Kernel throughput comparison: serial reference vs OpenMP variants on the
// matrix shapes the model actually runs (batch 25, hidden 500 LSTM gates,
// classifier layers). Usage: mtlg2p-bench [iterations]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "mtlg2p/numcore/kernels.hpp"
#include "mtlg2p/rng.hpp"

namespace {

using Clock = std::chrono::steady_clock;
using mtlg2p::Rng;
namespace kernels = mtlg2p::kernels;

struct MatShape {
  const char* name;
  std::size_t m, k, n;
};

std::vector<float> random_values(Rng& rng, std::size_t n) {
  std::vector<float> v(n);
  for (auto& x : v) x = static_cast<float>(rng.uniform_real(-1.0, 1.0));
  return v;
}

template <typename Fn>
double time_ms(std::size_t iters, Fn&& fn) {
  const auto start = Clock::now();
  for (std::size_t i = 0; i < iters; ++i) fn();
  const auto stop = Clock::now();
  return std::chrono::duration<double, std::milli>(stop - start).count() /
         static_cast<double>(iters);
}

}  // namespace

int main(int argc, char** argv) {
  std::size_t iters = 20;
  if (argc > 1) iters = static_cast<std::size_t>(std::strtoul(argv[1], nullptr, 10));

  std::printf("threads available: %d (OpenMP %s)\n", kernels::max_threads(),
              kernels::parallel_available() ? "on" : "off");
  std::printf("%-34s %12s %12s %8s\n", "kernel / shape", "serial ms",
              "parallel ms", "speedup");

  const MatShape shapes[] = {
      {"lstm gates fwd  (25x500)*(500x2000)", 25, 500, 2000},
      {"lstm gates toy  (25x64)*(64x256)", 25, 64, 256},
      {"classifier l2   (25x100)*(100x100)", 25, 100, 100},
      {"output proj     (25x500)*(500x60)", 25, 500, 60},
  };

  Rng rng(1);
  for (const auto& s : shapes) {
    const auto a = random_values(rng, s.m * s.k);
    const auto b = random_values(rng, s.k * s.n);
    std::vector<float> c(s.m * s.n);

    const double serial = time_ms(iters, [&] {
      kernels::matmul_serial(a.data(), b.data(), c.data(), s.m, s.k, s.n);
    });
    const double parallel = time_ms(iters, [&] {
      kernels::matmul_parallel(a.data(), b.data(), c.data(), s.m, s.k, s.n);
    });
    std::printf("%-34s %12.3f %12.3f %7.2fx\n", s.name, serial, parallel,
                serial / parallel);

    // Gradient-shaped variants on the largest case only.
    if (s.m == 25 && s.k == 500 && s.n == 2000) {
      const auto dy = random_values(rng, s.m * s.n);
      std::vector<float> dw(s.k * s.n), dx(s.m * s.k);
      const double s_atb = time_ms(iters, [&] {
        kernels::matmul_at_b_serial(a.data(), dy.data(), dw.data(), s.m, s.k,
                                    s.n);
      });
      const double p_atb = time_ms(iters, [&] {
        kernels::matmul_at_b_parallel(a.data(), dy.data(), dw.data(), s.m, s.k,
                                      s.n);
      });
      std::printf("%-34s %12.3f %12.3f %7.2fx\n",
                  "weight grad     A^T*B same shape", s_atb, p_atb,
                  s_atb / p_atb);
      const double s_abt = time_ms(iters, [&] {
        kernels::matmul_a_bt_serial(dy.data(), b.data(), dx.data(), s.m, s.n,
                                    s.k);
      });
      const double p_abt = time_ms(iters, [&] {
        kernels::matmul_a_bt_parallel(dy.data(), b.data(), dx.data(), s.m, s.n,
                                      s.k);
      });
      std::printf("%-34s %12.3f %12.3f %7.2fx\n",
                  "input grad      A*B^T same shape", s_abt, p_abt,
                  s_abt / p_abt);
    }
  }
  return 0;
}
