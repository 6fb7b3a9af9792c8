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

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "luce/sha256.hpp"

namespace luce {

/// 20-byte account identifier, rendered as 0x-prefixed lowercase hex.
struct Address {
  std::array<std::uint8_t, 20> bytes{};

  auto operator<=>(const Address&) const = default;

  bool is_zero() const {
    for (auto b : bytes)
      if (b != 0) return false;
    return true;
  }

  std::string str() const { return "0x" + hex_encode(bytes.data(), bytes.size()); }

  static std::optional<Address> parse(std::string_view s) {
    if (s.size() == 42 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) s.remove_prefix(2);
    Address a;
    if (!hex_decode(s, a.bytes.data(), a.bytes.size())) return std::nullopt;
    return a;
  }

  /// Derives an address from arbitrary seed material.
  static Address derive(std::string_view material) {
    Digest d = sha256(material);
    Address a;
    for (std::size_t i = 0; i < a.bytes.size(); ++i) a.bytes[i] = d[i];
    return a;
  }
};

inline constexpr Address kZeroAddress{};

}  // namespace luce
