// Copyright 2026 The tierbid Authors
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

#include "tierbid/fixed.hpp"

namespace tierbid {

/// SplitMix64. Small, fast, and fully specified, so seeded runs replay
/// bit-for-bit on every platform (the standard library distributions
/// are implementation-defined and unusable for that).
class Rng {
public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n) { return next() % n; }

  /// Uniform integer in [lo, hi], inclusive.
  std::int64_t range(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(
                    below(static_cast<std::uint64_t>(hi - lo + 1)));
  }

  /// Uniform Fixed on [lo, hi] at full micro resolution.
  Fixed uniform(Fixed lo, Fixed hi) {
    return Fixed::from_raw(range(lo.raw(), hi.raw()));
  }

  bool chance_in(std::uint64_t n) { return below(n) == 0; }

  /// Derives an independent named substream from a master seed.
  static std::uint64_t substream(std::uint64_t seed, std::uint64_t tag) {
    Rng r(seed ^ (0xa0761d6478bd642full * (tag + 1)));
    return r.next();
  }

private:
  std::uint64_t state_;
};

}  // namespace tierbid
