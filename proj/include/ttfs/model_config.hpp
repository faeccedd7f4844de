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
#include <vector>

#include "ttfs/common.hpp"

namespace ttfs {

enum class ArchKind { kBaseline, kAddSkip, kConcatSkip, kConcatSkipDelay };

enum class DelayGranularity { kLayer, kChannel, kPixel };

std::string to_string(ArchKind k);
std::string to_string(DelayGranularity g);
ArchKind arch_from_string(const std::string& s);
DelayGranularity granularity_from_string(const std::string& s);

/// Declarative architecture description. The concrete node list is derived
/// from this by build_graph.
struct ModelConfig {
  ArchKind arch = ArchKind::kBaseline;
  int in_channels = 1;
  int in_height = 28;
  int in_width = 28;
  int classes = 10;
  /// Channel count of the first conv stage; the deeper stage doubles it.
  int width = 32;
  DelayGranularity delay_granularity = DelayGranularity::kChannel;
  double delay_init = 0.5;

  bool has_delay() const { return arch == ArchKind::kConcatSkipDelay; }

  std::string to_json() const;
  static ModelConfig from_json(const std::string& text);
};

/// Emits the four-variant CNN family over the given input shape: baseline,
/// addition skip, concatenation skip, and concatenation skip with the
/// learnable delay block.
ModelConfig make_architecture(ArchKind kind, int in_channels, int in_height,
                              int in_width, int classes,
                              DelayGranularity granularity =
                                  DelayGranularity::kChannel,
                              double delay_init = 0.5, int width = 32);

}  // namespace ttfs
