// Copyright 2026 The Mutspec Authors
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

#ifndef MUTSPEC_PARALLEL_H_
#define MUTSPEC_PARALLEL_H_

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace mutspec {

// Calls fn(i) for every i in [0, n) on at most `workers` threads, handing
// out indices in increasing order. The first exception thrown stops the
// hand-out and is rethrown once every thread has finished.
template <typename Fn>
void ParallelFor(std::size_t n, int workers, Fn&& fn) {
  std::atomic<std::size_t> next{0};
  std::exception_ptr first;
  std::mutex mu;
  auto body = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!first) first = std::current_exception();
        next = n;
      }
    }
  };
  std::size_t width =
      std::min<std::size_t>(n, static_cast<std::size_t>(std::max(workers, 1)));
  if (width <= 1) {
    body();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < width; ++w) pool.emplace_back(body);
  }
  if (first) std::rethrow_exception(first);
}

}  // namespace mutspec

#endif  // MUTSPEC_PARALLEL_H_
