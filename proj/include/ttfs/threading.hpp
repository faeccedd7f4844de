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

#pragma once

#include <functional>

namespace ttfs {

/// Number of reduction slots used for batch fan-out. Fixed so that results
/// do not depend on the worker count: every cross-sample reduction
/// accumulates per slot and combines the slots in order.
inline constexpr int kReductionSlots = 32;

int hardware_workers();

/// Partitions [0, n) into kReductionSlots contiguous ranges and runs
/// fn(slot, begin, end) for each non-empty one, distributing slots over
/// `workers` threads. workers <= 1 runs inline.
void parallel_slots(int n, int workers,
                    const std::function<void(int, int, int)>& fn);

}  // namespace ttfs
