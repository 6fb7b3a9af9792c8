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
#include <map>
#include <string>
#include <string_view>

#include "luce/sha256.hpp"

namespace luce {

/// Canonical field encoding used for every hashed structure: UTF-8 text,
/// one `name=value` line per field, names sorted lexicographically, lines
/// joined by '\n'. Values have '\\' and '\n' escaped so the line structure
/// is unambiguous.
inline std::string canonical_escape(std::string_view value) {
  std::string out;
  out.reserve(value.size());
  for (char c : value) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

inline std::string canonical_unescape(std::string_view value) {
  std::string out;
  out.reserve(value.size());
  for (std::size_t i = 0; i < value.size(); ++i) {
    if (value[i] == '\\' && i + 1 < value.size()) {
      ++i;
      out.push_back(value[i] == 'n' ? '\n' : value[i]);
    } else {
      out.push_back(value[i]);
    }
  }
  return out;
}

using FieldMap = std::map<std::string, std::string>;

inline std::string canonical_lines(const FieldMap& fields) {
  std::string out;
  bool first = true;
  for (const auto& [name, value] : fields) {
    if (!first) out.push_back('\n');
    first = false;
    out += name;
    out.push_back('=');
    out += canonical_escape(value);
  }
  return out;
}

/// Inverse of canonical_lines for well-formed input.
inline FieldMap parse_canonical_lines(std::string_view text) {
  FieldMap out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? eol : eol - pos);
    if (!line.empty()) {
      std::size_t eq = line.find('=');
      if (eq != std::string_view::npos)
        out[std::string(line.substr(0, eq))] = canonical_unescape(line.substr(eq + 1));
    }
    if (eol == std::string_view::npos) break;
    pos = eol + 1;
  }
  return out;
}

inline Digest hash_fields(const FieldMap& fields) { return sha256(canonical_lines(fields)); }

// Deterministic seed mixing for replication / sub-stream seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag) {
  std::uint64_t h = seed;
  for (char c : tag) h = splitmix64(h ^ static_cast<std::uint8_t>(c));
  return splitmix64(h);
}

}  // namespace luce
