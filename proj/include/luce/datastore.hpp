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
#include <sstream>
#include <string>
#include <vector>

#include "luce/address.hpp"
#include "luce/canonical.hpp"
#include "luce/contracts.hpp"
#include "luce/errors.hpp"
#include "luce/sha256.hpp"

namespace luce {

/// Off-chain dataset: flat string records keyed by anonymized subject id.
struct RecordSet {
  // anonId -> field name -> value
  std::map<std::string, std::map<std::string, std::string>> records;
  std::uint64_t version = 1;

  bool empty() const { return records.empty(); }
  std::size_t size() const { return records.size(); }
};

/// Canonical hashing pre-image: records sorted by anonId, fields sorted by
/// name, one `anonId.field=value` line each, joined by '\n'. Values are
/// escaped like every other canonical encoding in the system.
inline std::string canonical_records_text(const RecordSet& rs) {
  std::string out;
  bool first = true;
  for (const auto& [anonId, fields] : rs.records) {
    for (const auto& [name, value] : fields) {
      if (!first) out.push_back('\n');
      first = false;
      out += anonId;
      out.push_back('.');
      out += name;
      out.push_back('=');
      out += canonical_escape(value);
    }
  }
  return out;
}

/// Provenance digest of a record set.
inline Digest hash_records(const RecordSet& rs) { return sha256(canonical_records_text(rs)); }

/// anonIds and field names feed the dotted canonical encoding, so they must
/// not contain the separator characters.
inline bool valid_identifier(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (c == '.' || c == '=' || c == '\n' || c == ',') return false;
  return true;
}

/// Merges new field values into one record. Identical values leave the
/// digest unchanged.
inline Result<RecordSet> apply_rectify(RecordSet rs, const std::string& anonId,
                                       const std::map<std::string, std::string>& newFields) {
  auto it = rs.records.find(anonId);
  if (it == rs.records.end()) return {Err::UnknownAnonId, anonId};
  for (const auto& [name, value] : newFields) it->second[name] = value;
  return rs;
}

/// Removes one record entirely.
inline Result<RecordSet> apply_erase(RecordSet rs, const std::string& anonId) {
  auto it = rs.records.find(anonId);
  if (it == rs.records.end()) return {Err::UnknownAnonId, anonId};
  rs.records.erase(it);
  return rs;
}

// --- CSV import/export (header: anon_id,field,value) -----------------------

inline std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out.push_back('"');
  return out;
}

inline std::string records_to_csv(const RecordSet& rs) {
  std::string out = "anon_id,field,value\n";
  for (const auto& [anonId, fields] : rs.records)
    for (const auto& [name, value] : fields)
      out += csv_quote(anonId) + "," + csv_quote(name) + "," + csv_quote(value) + "\n";
  return out;
}

/// Quote-aware CSV row parser; quoted cells may span newlines.
inline Result<std::vector<std::vector<std::string>>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string cell;
  bool quoted = false;
  bool cellStarted = false;
  auto endCell = [&] {
    row.push_back(std::move(cell));
    cell.clear();
    cellStarted = false;
  };
  auto endRow = [&] {
    if (!row.empty() || cellStarted || !cell.empty()) {
      endCell();
      rows.push_back(std::move(row));
      row.clear();
    }
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          cell.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cell.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
      cellStarted = true;
    } else if (c == ',') {
      endCell();
      cellStarted = true;  // the next cell exists even if empty
    } else if (c == '\n') {
      endRow();
    } else if (c != '\r') {
      cell.push_back(c);
      cellStarted = true;
    }
  }
  if (quoted) return {Err::MalformedAction, "unterminated quote"};
  endRow();
  return rows;
}

inline Result<RecordSet> records_from_csv(const std::string& csv) {
  auto rows = parse_csv(csv);
  if (!rows) return {rows.error(), rows.detail()};
  if (rows.value().empty() ||
      rows.value()[0] != std::vector<std::string>{"anon_id", "field", "value"})
    return {Err::MalformedAction, "expected header anon_id,field,value"};
  RecordSet rs;
  for (std::size_t i = 1; i < rows.value().size(); ++i) {
    const auto& row = rows.value()[i];
    if (row.size() != 3)
      return {Err::MalformedAction, "row " + std::to_string(i) + ": expected 3 cells"};
    if (!valid_identifier(row[0]) || row[1].empty() ||
        row[1].find_first_of("=\n") != std::string::npos)
      return {Err::MalformedAction, "row " + std::to_string(i) + ": bad identifier"};
    rs.records[row[0]][row[1]] = row[2];
  }
  return rs;
}

// --- storage service --------------------------------------------------------

/// Provider-local mapping from real subject identities to anonymized ids,
/// keyed per dataset. Deliberately kept out of every serialized artifact:
/// it never enters a transaction payload, catalog entry or export.
struct SubjectMapping {
  // datasetId -> subjectIdentity -> anonId
  std::map<std::string, std::map<std::string, std::string>> byDataset;

  std::optional<std::string> anon_id_for(const std::string& datasetId,
                                         const std::string& subject) const {
    auto d = byDataset.find(datasetId);
    if (d == byDataset.end()) return std::nullopt;
    auto s = d->second.find(subject);
    if (s == d->second.end()) return std::nullopt;
    return s->second;
  }
};

/// Secure data storage: serves record sets only against tokens the owning
/// contract would itself accept at the same instant.
class DataStore {
 public:
  /// Persists a record set under a fresh locator namespaced by the owning
  /// contract. Same content twice gives the same digest, distinct links.
  std::pair<std::string, Digest> store(const Address& contract, RecordSet rs) {
    std::string link =
        "luce-store://" + contract.str() + "/" + std::to_string(nextKey_++);
    Digest digest = hash_records(rs);
    stored_[link] = Stored{contract, std::move(rs)};
    return {link, digest};
  }

  /// Replaces the content behind an existing locator (rectify/erase flows);
  /// every token holder fetching that locator sees the new version.
  VoidResult replace(const std::string& link, RecordSet rs) {
    auto it = stored_.find(link);
    if (it == stored_.end()) return {Err::UnknownLink, link};
    it->second.records = std::move(rs);
    return ok_void();
  }

  Result<RecordSet> fetch(const std::string& link, const AccessToken& token,
                          const DatasetContract& contract, SimMillis now) const {
    auto it = stored_.find(link);
    if (it == stored_.end()) return {Err::UnknownLink, link};
    if (token.contract != contract.address() || it->second.owner != contract.address())
      return {Err::TokenInvalid, "wrong-contract"};
    auto gate = contract.check_access(token.owner, now);
    if (!gate.ok()) {
      switch (gate.error()) {
        case Err::NoToken: return {Err::TokenInvalid, "no-token"};
        case Err::TokenExpired: return {Err::TokenInvalid, "expired"};
        case Err::TokenRevoked: return {Err::TokenInvalid, "revoked"};
        default: return {Err::TokenInvalid, std::string(err_name(gate.error()))};
      }
    }
    // A fresh subscription invalidates any previously issued token object.
    auto current = contract.token_of(token.owner);
    if (!current || current->tokenId != token.tokenId) return {Err::TokenInvalid, "not-owner"};
    return it->second.records;
  }

  const RecordSet* peek(const std::string& link) const {
    auto it = stored_.find(link);
    return it == stored_.end() ? nullptr : &it->second.records;
  }

 private:
  struct Stored {
    Address owner;
    RecordSet records;
  };

  std::map<std::string, Stored> stored_;
  std::uint64_t nextKey_ = 1;
};

}  // namespace luce
