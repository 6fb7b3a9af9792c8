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

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "luce/address.hpp"
#include "luce/contracts.hpp"
#include "luce/errors.hpp"

namespace luce {

/// Searchable metadata repository entry for one shared dataset.
struct CatalogEntry {
  std::string datasetId;
  std::string title;
  std::string description;
  std::vector<std::string> keywords;
  std::string licenseType;
  Address contractAddress{};
};

inline std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

/// Off-ledger directory of shared datasets. Search is conjunctive
/// case-insensitive substring match over title, description and keywords;
/// results come back ordered by datasetId.
class Catalog {
 public:
  using DeployedCheck = std::function<bool(const Address&)>;

  Result<Unit> publish_entry(const CatalogEntry& entry, const DeployedCheck& isDeployed) {
    if (entries_.count(entry.datasetId)) return {Err::DuplicateId, entry.datasetId};
    if (!isDeployed || !isDeployed(entry.contractAddress))
      return {Err::UnknownContract, entry.contractAddress.str()};
    entries_.emplace(entry.datasetId, entry);
    return ok_void();
  }

  std::vector<CatalogEntry> search(const std::string& query) const {
    std::vector<std::string> terms;
    std::istringstream in(query);
    std::string term;
    while (in >> term) terms.push_back(lowercase(term));

    std::vector<CatalogEntry> out;
    for (const auto& [id, entry] : entries_) {
      std::string haystack = lowercase(entry.title) + '\n' + lowercase(entry.description);
      for (const auto& kw : entry.keywords) haystack += '\n' + lowercase(kw);
      bool all = true;
      for (const auto& t : terms) {
        if (haystack.find(t) == std::string::npos) {
          all = false;
          break;
        }
      }
      if (all) out.push_back(entry);
    }
    return out;  // map iteration is already datasetId-ascending
  }

  std::optional<CatalogEntry> find(const std::string& datasetId) const {
    auto it = entries_.find(datasetId);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t size() const { return entries_.size(); }
  const std::map<std::string, CatalogEntry>& entries() const { return entries_; }

  /// Persistence: JSON array of entries, stable key order.
  std::string to_json() const {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& [id, e] : entries_) {
      nlohmann::ordered_json je;
      je["datasetId"] = e.datasetId;
      je["title"] = e.title;
      je["description"] = e.description;
      je["keywords"] = e.keywords;
      je["licenseType"] = e.licenseType;
      je["contractAddress"] = e.contractAddress.str();
      arr.push_back(std::move(je));
    }
    return arr.dump(2) + "\n";
  }

  static Result<Catalog> from_json(const std::string& text) {
    auto arr = nlohmann::json::parse(text, nullptr, false);
    if (arr.is_discarded() || !arr.is_array()) return {Err::MalformedAction, "catalog must be a JSON array"};
    Catalog c;
    for (const auto& je : arr) {
      CatalogEntry e;
      try {
        e.datasetId = je.at("datasetId").get<std::string>();
        e.title = je.at("title").get<std::string>();
        e.description = je.at("description").get<std::string>();
        e.keywords = je.at("keywords").get<std::vector<std::string>>();
        e.licenseType = je.at("licenseType").get<std::string>();
        auto addr = Address::parse(je.at("contractAddress").get<std::string>());
        if (!addr) return {Err::MalformedAction, "bad contractAddress"};
        e.contractAddress = *addr;
      } catch (const nlohmann::json::exception& ex) {
        return {Err::MalformedAction, ex.what()};
      }
      if (c.entries_.count(e.datasetId)) return {Err::DuplicateId, e.datasetId};
      c.entries_.emplace(e.datasetId, e);
    }
    return c;
  }

 private:
  std::map<std::string, CatalogEntry> entries_;
};

/// Off-ledger mirror of contract state, rebuilt from event logs rather than
/// by querying contracts directly. Refutable: sync output must equal a
/// direct state read at the same block height.
struct CacheState {
  struct ContractSnapshot {
    std::uint64_t version = 1;
    std::size_t requesterCount = 0;
    std::map<Address, TokenState> tokenStates;
  };

  std::map<Address, ContractSnapshot> contracts;
  std::uint64_t lastSyncedBlock = 0;
};

/// Folds one contract's event log into a snapshot. Token expiry is judged
/// against `now` using the expiry times the events carry.
inline CacheState::ContractSnapshot snapshot_from_events(const std::vector<ContractEvent>& events,
                                                         SimMillis now) {
  CacheState::ContractSnapshot snap;
  std::map<Address, SimMillis> expiries;
  std::map<Address, TokenState> stored;
  for (const ContractEvent& e : events) {
    switch (e.kind) {
      case EventKind::RequesterAdded:
        stored[e.actor] = TokenState::Active;
        expiries[e.actor] = std::stoll(e.payload.at("expiresAtMs"));
        break;
      case EventKind::TokenRenewed:
        expiries[e.actor] = std::stoll(e.payload.at("expiresAtMs"));
        break;
      case EventKind::TokenRevoked:
        stored[e.actor] = TokenState::Revoked;
        break;
      case EventKind::Unsubscribed:
        stored[e.actor] = TokenState::Deleted;
        break;
      case EventKind::UpdateRequested:
        snap.version = std::stoull(e.payload.at("newVersion"));
        break;
      default:
        break;
    }
  }
  for (const auto& [addr, state] : stored) {
    TokenState effective = state;
    if (state == TokenState::Active && now > expiries[addr]) effective = TokenState::Expired;
    snap.tokenStates[addr] = effective;
  }
  snap.requesterCount = stored.size();
  return snap;
}

/// Rebuilds the cache from every contract's event log up to the chain head.
/// Templated on the platform so the cache layer stays independent of the
/// wiring that owns contracts and the ledger.
template <typename PlatformT>
CacheState sync_cache(const PlatformT& platform) {
  CacheState cache;
  cache.lastSyncedBlock = platform.ledger().chain().blocks.size() - 1;
  SimMillis now = platform.clock().now_ms();
  for (const auto& [addr, contract] : platform.contracts())
    cache.contracts[addr] = snapshot_from_events(contract.event_log(), now);
  return cache;
}

/// Direct-read snapshot for coherence checks against sync_cache output.
inline CacheState::ContractSnapshot snapshot_from_state(const DatasetContract& contract,
                                                        SimMillis now) {
  CacheState::ContractSnapshot snap;
  snap.version = contract.version();
  snap.requesterCount = contract.requesters().size();
  for (const auto& [addr, entry] : contract.requesters())
    snap.tokenStates[addr] = entry.token.state_at(now);
  return snap;
}

inline bool operator==(const CacheState::ContractSnapshot& a, const CacheState::ContractSnapshot& b) {
  return a.version == b.version && a.requesterCount == b.requesterCount &&
         a.tokenStates == b.tokenStates;
}

}  // namespace luce
