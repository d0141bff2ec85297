// Copyright 2026 The relscm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RELSCM_PARALLEL_H_
#define RELSCM_PARALLEL_H_

#include <cstddef>
#include <exception>
#include <mutex>

namespace relscm {

// Selects between the OpenMP kernel and its serial reference. Both produce
// identical results; the serial path exists for testing and benchmarking.
enum class Execution { kSerial, kParallel };

// Sets the OpenMP thread count; a no-op without OpenMP.
void SetNumThreads(int threads);
int MaxThreads();

// Calls body(i) for i in [0, n). Under kParallel the iterations are spread
// over OpenMP threads; the first exception thrown by any iteration is
// rethrown on the calling thread after the loop.
template <typename Body>
void ForEachIndex(size_t n, Execution exec, Body&& body) {
  if (exec == Execution::kSerial) {
    for (size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr error;
  std::mutex mu;
  const long long count = static_cast<long long>(n);
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < count; ++i) {
    try {
      body(static_cast<size_t>(i));
    } catch (...) {
      std::lock_guard<std::mutex> lock(mu);
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace relscm

#endif  // RELSCM_PARALLEL_H_
