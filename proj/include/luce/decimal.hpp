/*
   Copyright 2026 The LUCE Simulator Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace luce {

/// Exact non-negative decimal: mantissa * 10^-scale with a 128-bit mantissa.
/// Covers gas -> Gwei -> ETH -> USD conversions without binary rounding;
/// not a general arithmetic type (multiply, shift, truncate, round only).
class Decimal {
 public:
  Decimal() = default;
  Decimal(std::uint64_t integer) : mant_(integer) {}  // NOLINT(google-explicit-constructor)
  Decimal(unsigned __int128 mantissa, int scale) : mant_(mantissa), scale_(scale) { normalize(); }

  static std::optional<Decimal> parse(std::string_view s) {
    if (s.empty()) return std::nullopt;
    unsigned __int128 mant = 0;
    int scale = 0;
    bool seen_dot = false, seen_digit = false;
    for (char c : s) {
      if (c == '.') {
        if (seen_dot) return std::nullopt;
        seen_dot = true;
        continue;
      }
      if (c < '0' || c > '9') return std::nullopt;
      if (mant > (~static_cast<unsigned __int128>(0) - 9) / 10) return std::nullopt;
      mant = mant * 10 + static_cast<unsigned>(c - '0');
      seen_digit = true;
      if (seen_dot) ++scale;
    }
    if (!seen_digit) return std::nullopt;
    return Decimal(mant, scale);
  }

  bool is_zero() const { return mant_ == 0; }

  Decimal times(const Decimal& other) const {
    return Decimal(mant_ * other.mant_, scale_ + other.scale_);
  }

  /// Multiplies by 10^-k.
  Decimal shifted_down(int k) const { return Decimal(mant_, scale_ + k); }

  /// Truncates toward zero to `digits` fractional digits.
  Decimal truncated(int digits) const {
    Decimal d = *this;
    while (d.scale_ > digits) {
      d.mant_ /= 10;
      --d.scale_;
    }
    d.normalize();
    return d;
  }

  /// Rounds half-up to `digits` fractional digits.
  Decimal rounded_half_up(int digits) const {
    Decimal d = *this;
    while (d.scale_ > digits + 1) {
      d.mant_ /= 10;
      --d.scale_;
    }
    if (d.scale_ == digits + 1) {
      d.mant_ = (d.mant_ + 5) / 10;
      --d.scale_;
    }
    d.normalize();
    return d;
  }

  /// Count of fractional digits after normalization (trailing zeros dropped).
  int scale() const { return scale_; }

  bool operator==(const Decimal& other) const {
    return mant_ == other.mant_ && scale_ == other.scale_;
  }

  /// Shortest decimal string, e.g. "0.042867136", "79.28", "0".
  std::string str() const {
    std::string digits = mant_str();
    if (scale_ == 0) return digits;
    if (static_cast<int>(digits.size()) <= scale_)
      digits.insert(0, static_cast<std::size_t>(scale_) - digits.size() + 1, '0');
    digits.insert(digits.size() - static_cast<std::size_t>(scale_), 1, '.');
    return digits;
  }

  /// Fixed-point string with exactly `digits` fractional digits (truncating).
  std::string fixed(int digits) const {
    Decimal d = truncated(digits);
    std::string s = d.str();
    int have = d.scale_;
    if (have == 0 && digits > 0) s += '.';
    s.append(static_cast<std::size_t>(digits - have), '0');
    return s;
  }

  double to_double() const {
    double v = static_cast<double>(mant_);
    for (int i = 0; i < scale_; ++i) v /= 10.0;
    return v;
  }

 private:
  void normalize() {
    while (scale_ > 0 && mant_ % 10 == 0) {
      mant_ /= 10;
      --scale_;
    }
    if (mant_ == 0) scale_ = 0;
  }

  std::string mant_str() const {
    if (mant_ == 0) return "0";
    std::string s;
    unsigned __int128 v = mant_;
    while (v > 0) {
      s.insert(s.begin(), static_cast<char>('0' + static_cast<int>(v % 10)));
      v /= 10;
    }
    return s;
  }

  unsigned __int128 mant_ = 0;
  int scale_ = 0;
};

}  // namespace luce
