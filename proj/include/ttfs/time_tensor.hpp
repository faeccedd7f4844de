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

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "ttfs/common.hpp"

namespace ttfs {

/// Dense row-major tensor of spike times (or real activations inside the
/// encoder). Shape is (batch, channels, height, width) or (batch, features);
/// spike-time entries are >= 0 with +inf as the "never fired" sentinel.
struct TimeTensor {
  std::vector<int> dims;
  Eigen::ArrayXd v;

  TimeTensor() = default;
  explicit TimeTensor(std::vector<int> d) : dims(std::move(d)) {
    v = Eigen::ArrayXd::Zero(count());
  }

  Eigen::Index count() const {
    Eigen::Index n = 1;
    for (int d : dims) n *= d;
    return dims.empty() ? 0 : n;
  }
  Eigen::Index sample_size() const {
    return dims.empty() ? 0 : count() / dims[0];
  }

  int batch() const { return dims.empty() ? 0 : dims[0]; }
  int channels() const { return dims.size() > 1 ? dims[1] : 1; }
  int height() const { return dims.size() > 2 ? dims[2] : 1; }
  int width() const { return dims.size() > 3 ? dims[3] : 1; }

  double& at(int b, int c, int h, int w) {
    return v[((static_cast<Eigen::Index>(b) * channels() + c) * height() + h) *
                 width() +
             w];
  }
  double at(int b, int c, int h, int w) const {
    return v[((static_cast<Eigen::Index>(b) * channels() + c) * height() + h) *
                 width() +
             w];
  }

  /// Flat view of one sample.
  Eigen::Map<Eigen::ArrayXd> sample(int b) {
    return {v.data() + b * sample_size(), sample_size()};
  }
  Eigen::Map<const Eigen::ArrayXd> sample(int b) const {
    return {v.data() + b * sample_size(), sample_size()};
  }

  bool same_shape(const TimeTensor& o) const { return dims == o.dims; }

  /// Sets dims; reallocates (zero-filled) only when the element count
  /// changes, so workspaces can be recycled across batches.
  void reshape(std::vector<int> d) {
    dims = std::move(d);
    if (v.size() != count()) v = Eigen::ArrayXd::Zero(count());
  }

  void set_zero() { v.setZero(); }
};

}  // namespace ttfs
