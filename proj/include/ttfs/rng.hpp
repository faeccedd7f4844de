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
#include <random>
#include <vector>

namespace ttfs {

/// mt19937_64 with explicit output mappings. std::uniform_*_distribution is
/// implementation-defined, so all draws go through these fixed recipes to
/// keep runs reproducible across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t bits() { return gen_(); }

  /// [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  /// Uniform draw rounded to f32 so freshly initialized parameters survive
  /// an f32 checkpoint round trip bit-exactly.
  double uniform_f32(double a, double b) {
    return static_cast<double>(static_cast<float>(uniform(a, b)));
  }

  /// [0, bound) by masked rejection (exact, no modulo bias).
  std::uint64_t integer(std::uint64_t bound) {
    if (bound <= 1) return 0;
    std::uint64_t mask =
        ~std::uint64_t{0} >> __builtin_clzll((bound - 1) | 1);
    for (;;) {
      std::uint64_t v = gen_() & mask;
      if (v < bound) return v;
    }
  }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i)
      std::swap(v[i - 1], v[integer(i)]);
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace ttfs
