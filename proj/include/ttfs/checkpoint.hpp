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

#include <string>

#include "ttfs/graph.hpp"
#include "ttfs/optimizer.hpp"

namespace ttfs {

/// Binary checkpoint, little-endian throughout:
///   magic "TTFSCK1\0" | u32 version (1) | u32 epoch | u32 config length |
///   ModelConfig JSON | u32 slot count | per slot: u16 name length, name,
///   u8 ndims, u32 per dim, f32 data | u8 has optimizer state |
///   [u64 step, then f32 m and v arrays per slot] | u32 CRC32 of everything
///   after the magic.
/// Parameters are stored f32; a fresh (untrained) model round-trips its
/// forward outputs bit-exactly because initialization draws f32 grid
/// values, and save -> load -> save is byte-identical for any model.
void save_checkpoint(const std::string& path, const Graph& g, int epoch,
                     const AdamState* opt = nullptr);

struct LoadedCheckpoint {
  Graph graph;
  int epoch = 0;
  bool has_optimizer = false;
  AdamState optimizer;
};

/// Rebuilds the graph from the embedded config and overwrites every slot.
/// Version mismatch, a missing/unknown slot, or a shape clash raise
/// IoError; CRC failure raises IntegrityError.
LoadedCheckpoint load_checkpoint(const std::string& path);

}  // namespace ttfs
