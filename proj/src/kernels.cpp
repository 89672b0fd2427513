// mtlg2p/kernels.cpp

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

#include "mtlg2p/numcore/kernels.hpp"

#include <atomic>

namespace mtlg2p::kernels {

namespace {

std::atomic<Backend>& backend_storage() {
  static std::atomic<Backend> storage{
      parallel_available() ? Backend::kParallel : Backend::kSerial};
  return storage;
}

}  // namespace

bool parallel_available() {
#ifdef _OPENMP
  return true;
#else
  return false;
#endif
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

Backend backend() { return backend_storage().load(std::memory_order_relaxed); }

void set_backend(Backend b) {
  backend_storage().store(b, std::memory_order_relaxed);
}

}  // namespace mtlg2p::kernels
