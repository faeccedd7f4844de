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

#include <cstdint>
#include <string>
#include <vector>

#include "ttfs/time_tensor.hpp"

namespace ttfs {

/// In-memory labeled image set. Images are (N, C, H, W) real values in
/// [0, 1]; labels are class indices.
struct Dataset {
  TimeTensor images;
  std::vector<std::uint16_t> labels;
  int classes = 0;

  int n() const { return images.batch(); }
};

/// Reads an IDX image/label file pair (big-endian headers, magic 0x00000803
/// for u8 image stacks and 0x00000801 for label vectors). Pixels scale to
/// [0, 1]. Truncation, bad magic (error names the offset), or an
/// image/label count mismatch raise IoError.
Dataset read_idx_dataset(const std::string& images_path,
                         const std::string& labels_path);

/// Binary dataset container:
///   magic "TTFSDS1\0" | u32 sample count | u32 dims count | u32 per dim
///   (one sample's dims) | f32 sample data | u16 labels | u32 CRC32.
/// All integers and floats little-endian; the CRC covers every byte after
/// the magic and before the CRC itself.
void write_dataset(const Dataset& ds, const std::string& path);

/// Round-trips write_dataset exactly; a CRC mismatch raises IntegrityError,
/// structural problems raise IoError. `classes` is recovered as
/// max(label) + 1 (0 when empty).
Dataset read_dataset(const std::string& path);

/// Keeps the first `count` samples (used for reduced-scale runs).
Dataset dataset_head(const Dataset& ds, int count);

}  // namespace ttfs
