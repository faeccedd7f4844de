// Copyright 2026 The ttfs-engine Authors. All Rights Reserved.
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

#include "ttfs/threading.hpp"

#include <thread>
#include <vector>

namespace ttfs {

int hardware_workers() {
  unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
}

void parallel_slots(int n, int workers,
                    const std::function<void(int, int, int)>& fn) {
  if (n <= 0) return;
  auto run_slot = [&](int slot) {
    // Contiguous, worker-count independent partition.
    int begin = static_cast<int>(static_cast<long long>(slot) * n /
                                 kReductionSlots);
    int end = static_cast<int>(static_cast<long long>(slot + 1) * n /
                               kReductionSlots);
    if (begin < end) fn(slot, begin, end);
  };
  if (workers <= 1 || n == 1) {
    for (int s = 0; s < kReductionSlots; ++s) run_slot(s);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(workers) - 1);
  for (int w = 1; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (int s = w; s < kReductionSlots; s += workers) run_slot(s);
    });
  }
  for (int s = 0; s < kReductionSlots; s += workers) run_slot(s);
  for (auto& t : pool) t.join();
}

}  // namespace ttfs
