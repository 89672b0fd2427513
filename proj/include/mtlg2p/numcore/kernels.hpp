// mtlg2p/numcore/kernels.hpp

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

#ifndef MTLG2P_NUMCORE_KERNELS_HPP
#define MTLG2P_NUMCORE_KERNELS_HPP

#include <cstddef>
#include <cstdint>

#ifdef _OPENMP
#include <omp.h>
#endif

// Dense matrix kernels backing the tensor ops. Every kernel has a serial
// reference implementation and an OpenMP variant. The parallel variants
// split work over output rows only: each output element is produced by
// exactly one thread with the same inner summation order as the serial
// code, so both variants are bit-identical and results do not depend on
// the thread count. The unit tests assert that equivalence and the bench
// tool compares their throughput.

namespace mtlg2p::kernels {

enum class Backend { kSerial, kParallel };

Backend backend();
void set_backend(Backend b);
bool parallel_available();
int max_threads();

// Below this many multiply-adds the dispatchers stay serial; forking
// threads costs more than the loop.
inline constexpr std::size_t kParallelCutoffFlops = 32768;

namespace detail {

inline bool use_parallel(std::size_t flops) {
  return backend() == Backend::kParallel && parallel_available() &&
         flops >= kParallelCutoffFlops;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// C[m x n] = A[m x k] * B[k x n]   (+= when accumulate)
// ---------------------------------------------------------------------------

template <typename T>
void matmul_serial(const T* a, const T* b, T* c, std::size_t m, std::size_t k,
                   std::size_t n, bool accumulate = false) {
  for (std::size_t i = 0; i < m; ++i) {
    T* crow = c + i * n;
    if (!accumulate) {
      for (std::size_t j = 0; j < n; ++j) crow[j] = T(0);
    }
    const T* arow = a + i * k;
    for (std::size_t kk = 0; kk < k; ++kk) {
      const T aik = arow[kk];
      const T* brow = b + kk * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += aik * brow[j];
    }
  }
}

template <typename T>
void matmul_parallel(const T* a, const T* b, T* c, std::size_t m, std::size_t k,
                     std::size_t n, bool accumulate = false) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(m); ++i) {
    T* crow = c + static_cast<std::size_t>(i) * n;
    if (!accumulate) {
      for (std::size_t j = 0; j < n; ++j) crow[j] = T(0);
    }
    const T* arow = a + static_cast<std::size_t>(i) * k;
    for (std::size_t kk = 0; kk < k; ++kk) {
      const T aik = arow[kk];
      const T* brow = b + kk * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += aik * brow[j];
    }
  }
#else
  matmul_serial(a, b, c, m, k, n, accumulate);
#endif
}

template <typename T>
void matmul(const T* a, const T* b, T* c, std::size_t m, std::size_t k,
            std::size_t n, bool accumulate = false) {
  if (detail::use_parallel(m * k * n)) {
    matmul_parallel(a, b, c, m, k, n, accumulate);
  } else {
    matmul_serial(a, b, c, m, k, n, accumulate);
  }
}

// ---------------------------------------------------------------------------
// C[k x n] = A^T * B with A[m x k], B[m x n]   (weight gradients)
// ---------------------------------------------------------------------------

template <typename T>
void matmul_at_b_serial(const T* a, const T* b, T* c, std::size_t m,
                        std::size_t k, std::size_t n, bool accumulate = false) {
  for (std::size_t kk = 0; kk < k; ++kk) {
    T* crow = c + kk * n;
    if (!accumulate) {
      for (std::size_t j = 0; j < n; ++j) crow[j] = T(0);
    }
    for (std::size_t i = 0; i < m; ++i) {
      const T aik = a[i * k + kk];
      const T* brow = b + i * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += aik * brow[j];
    }
  }
}

template <typename T>
void matmul_at_b_parallel(const T* a, const T* b, T* c, std::size_t m,
                          std::size_t k, std::size_t n,
                          bool accumulate = false) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
  for (std::int64_t kk = 0; kk < static_cast<std::int64_t>(k); ++kk) {
    T* crow = c + static_cast<std::size_t>(kk) * n;
    if (!accumulate) {
      for (std::size_t j = 0; j < n; ++j) crow[j] = T(0);
    }
    for (std::size_t i = 0; i < m; ++i) {
      const T aik = a[i * k + static_cast<std::size_t>(kk)];
      const T* brow = b + i * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += aik * brow[j];
    }
  }
#else
  matmul_at_b_serial(a, b, c, m, k, n, accumulate);
#endif
}

template <typename T>
void matmul_at_b(const T* a, const T* b, T* c, std::size_t m, std::size_t k,
                 std::size_t n, bool accumulate = false) {
  if (detail::use_parallel(m * k * n)) {
    matmul_at_b_parallel(a, b, c, m, k, n, accumulate);
  } else {
    matmul_at_b_serial(a, b, c, m, k, n, accumulate);
  }
}

// ---------------------------------------------------------------------------
// C[m x k] = A * B^T with A[m x n], B[k x n]   (input gradients)
// ---------------------------------------------------------------------------

template <typename T>
void matmul_a_bt_serial(const T* a, const T* b, T* c, std::size_t m,
                        std::size_t n, std::size_t k, bool accumulate = false) {
  for (std::size_t i = 0; i < m; ++i) {
    const T* arow = a + i * n;
    T* crow = c + i * k;
    for (std::size_t kk = 0; kk < k; ++kk) {
      const T* brow = b + kk * n;
      T acc = T(0);
      for (std::size_t j = 0; j < n; ++j) acc += arow[j] * brow[j];
      if (accumulate) {
        crow[kk] += acc;
      } else {
        crow[kk] = acc;
      }
    }
  }
}

template <typename T>
void matmul_a_bt_parallel(const T* a, const T* b, T* c, std::size_t m,
                          std::size_t n, std::size_t k,
                          bool accumulate = false) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(m); ++i) {
    const T* arow = a + static_cast<std::size_t>(i) * n;
    T* crow = c + static_cast<std::size_t>(i) * k;
    for (std::size_t kk = 0; kk < k; ++kk) {
      const T* brow = b + kk * n;
      T acc = T(0);
      for (std::size_t j = 0; j < n; ++j) acc += arow[j] * brow[j];
      if (accumulate) {
        crow[kk] += acc;
      } else {
        crow[kk] = acc;
      }
    }
  }
#else
  matmul_a_bt_serial(a, b, c, m, n, k, accumulate);
#endif
}

template <typename T>
void matmul_a_bt(const T* a, const T* b, T* c, std::size_t m, std::size_t n,
                 std::size_t k, bool accumulate = false) {
  if (detail::use_parallel(m * n * k)) {
    matmul_a_bt_parallel(a, b, c, m, n, k, accumulate);
  } else {
    matmul_a_bt_serial(a, b, c, m, n, k, accumulate);
  }
}

}  // namespace mtlg2p::kernels

#endif  // MTLG2P_NUMCORE_KERNELS_HPP
