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
#include <compare>
#include <string>

namespace tierbid {

/// Fixed-point decimal with six fractional digits, stored as a scaled
/// 64-bit integer. Currency and bandwidth amounts both use this type so
/// that sort order and charge arithmetic are exact and reproducible
/// across platforms. Multiplication and division round half away from
/// zero at the last digit.
class Fixed {
public:
  static constexpr std::int64_t kScale = 1'000'000;

  constexpr Fixed() = default;

  static constexpr Fixed from_raw(std::int64_t raw) {
    Fixed f;
    f.raw_ = raw;
    return f;
  }
  static constexpr Fixed from_units(std::int64_t units) {
    return from_raw(units * kScale);
  }

  constexpr std::int64_t raw() const { return raw_; }
  constexpr bool is_zero() const { return raw_ == 0; }
  constexpr bool is_negative() const { return raw_ < 0; }

  /// Truncating conversion to whole units.
  constexpr std::int64_t whole_units() const { return raw_ / kScale; }

  friend constexpr Fixed operator+(Fixed a, Fixed b) {
    return from_raw(a.raw_ + b.raw_);
  }
  friend constexpr Fixed operator-(Fixed a, Fixed b) {
    return from_raw(a.raw_ - b.raw_);
  }
  constexpr Fixed operator-() const { return from_raw(-raw_); }
  Fixed& operator+=(Fixed b) {
    raw_ += b.raw_;
    return *this;
  }
  Fixed& operator-=(Fixed b) {
    raw_ -= b.raw_;
    return *this;
  }

  friend constexpr Fixed operator*(Fixed a, Fixed b) {
    __int128 p = static_cast<__int128>(a.raw_) * b.raw_;
    return from_raw(div_round(p, kScale));
  }
  friend constexpr Fixed operator/(Fixed a, Fixed b) {
    __int128 n = static_cast<__int128>(a.raw_) * kScale;
    return from_raw(div_round(n, b.raw_));
  }
  friend constexpr Fixed operator*(Fixed a, std::int64_t n) {
    return from_raw(a.raw_ * n);
  }

  friend constexpr auto operator<=>(Fixed a, Fixed b) = default;

  /// Decimal rendering with all six fractional digits, e.g. "2.500000".
  std::string str() const;

private:
  // Round half away from zero.
  static constexpr std::int64_t div_round(__int128 n, std::int64_t d) {
    __int128 half = d / 2;
    __int128 q = (n >= 0) ? (n + half) / d : (n - half) / d;
    return static_cast<std::int64_t>(q);
  }

  std::int64_t raw_ = 0;
};

/// Currency per slot, per bandwidth unit, or a cumulative charge.
using Currency = Fixed;
/// Bandwidth in rate units (the scenario files use Mbps).
using Bandwidth = Fixed;

}  // namespace tierbid
