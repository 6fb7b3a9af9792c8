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
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "luce/address.hpp"
#include "luce/canonical.hpp"
#include "luce/clock.hpp"
#include "luce/errors.hpp"
#include "luce/sha256.hpp"

namespace luce {

enum class Role { DataProvider, DataRequester, DataSubject, SupervisoryAuthority };

inline std::string_view role_name(Role r) {
  switch (r) {
    case Role::DataProvider: return "provider";
    case Role::DataRequester: return "requester";
    case Role::DataSubject: return "subject";
    case Role::SupervisoryAuthority: return "authority";
  }
  return "?";
}

inline std::optional<Role> role_from(std::string_view s) {
  if (s == "provider") return Role::DataProvider;
  if (s == "requester") return Role::DataRequester;
  if (s == "subject") return Role::DataSubject;
  if (s == "authority") return Role::SupervisoryAuthority;
  return std::nullopt;
}

/// On-ledger registry of platform users. Every address registers exactly
/// once with one role; all contract operations are gated on registration.
class UserRegistry {
 public:
  struct Entry {
    Role role;
    std::string identityRef;
  };

  VoidResult register_user(const Address& caller, Role role, const std::string& identityRef) {
    if (users_.count(caller)) return {Err::AlreadyRegistered, caller.str()};
    if (identityRef.empty()) return {Err::MalformedAction, "identityRef must be non-empty"};
    users_.emplace(caller, Entry{role, identityRef});
    return ok_void();
  }

  bool is_registered(const Address& a) const { return users_.count(a) != 0; }

  std::optional<Role> role_of(const Address& a) const {
    auto it = users_.find(a);
    if (it == users_.end()) return std::nullopt;
    return it->second.role;
  }

  /// Identity resolution is reserved for the supervisory authority.
  Result<Entry> resolve(const Address& caller, const Address& target) const {
    auto caller_it = users_.find(caller);
    if (caller_it == users_.end() || caller_it->second.role != Role::SupervisoryAuthority)
      return {Err::NotAuthority, caller.str()};
    auto it = users_.find(target);
    if (it == users_.end()) return {Err::UnknownAddress, target.str()};
    return it->second;
  }

  const std::map<Address, Entry>& users() const { return users_; }

 private:
  std::map<Address, Entry> users_;
};

struct License {
  std::string licenseType;                // short code, e.g. CC-BY-NC
  std::string termsText;
  std::set<std::string> permittedPurposes;  // flat purpose codes, exact match
};

enum class TokenState { Active, Expired, Revoked, Deleted };

inline std::string_view token_state_name(TokenState s) {
  switch (s) {
    case TokenState::Active: return "active";
    case TokenState::Expired: return "expired";
    case TokenState::Revoked: return "revoked";
    case TokenState::Deleted: return "deleted";
  }
  return "?";
}

/// ERC-721-style access credential. Ids are sequential per contract; a
/// token stored as Active is still reported Expired once the clock passes
/// its expiry (state_at), without a separate on-ledger transition.
struct AccessToken {
  std::uint64_t tokenId = 0;
  Address owner{};
  Address contract{};
  SimMillis issuedAtMs = 0;
  SimMillis expiresAtMs = 0;
  TokenState state = TokenState::Active;

  TokenState state_at(SimMillis now) const {
    if (state == TokenState::Active && now > expiresAtMs) return TokenState::Expired;
    return state;
  }
};

struct RequesterEntry {
  std::string purpose;
  AccessToken token;
  std::uint64_t confirmedVersion = 0;
  SimMillis lastRenewalAtMs = 0;
};

enum class EventKind {
  Published,
  LicenseSet,
  RequesterAdded,
  LinkServed,
  UpdateRequested,
  UpdateConfirmed,
  TokenRenewed,
  TokenRevoked,
  Unsubscribed,
};

inline std::string_view event_kind_name(EventKind k) {
  switch (k) {
    case EventKind::Published: return "Published";
    case EventKind::LicenseSet: return "LicenseSet";
    case EventKind::RequesterAdded: return "RequesterAdded";
    case EventKind::LinkServed: return "LinkServed";
    case EventKind::UpdateRequested: return "UpdateRequested";
    case EventKind::UpdateConfirmed: return "UpdateConfirmed";
    case EventKind::TokenRenewed: return "TokenRenewed";
    case EventKind::TokenRevoked: return "TokenRevoked";
    case EventKind::Unsubscribed: return "Unsubscribed";
  }
  return "?";
}

struct ContractEvent {
  EventKind kind;
  Address actor{};
  FieldMap payload;
  Digest txRef{};   // transaction that produced the event
  SimMillis atMs = 0;
};

struct EventFilter {
  std::optional<EventKind> kind;
  std::optional<Address> actor;
  std::optional<SimMillis> fromMs;
  std::optional<SimMillis> toMs;

  bool matches(const ContractEvent& e) const {
    if (kind && e.kind != *kind) return false;
    if (actor && e.actor != *actor) return false;
    if (fromMs && e.atMs < *fromMs) return false;
    if (toMs && e.atMs > *toMs) return false;
    return true;
  }
};

enum class UpdateKind { Rectify, Erase };

inline std::string_view update_kind_name(UpdateKind k) {
  return k == UpdateKind::Rectify ? "rectify" : "erase";
}

inline std::optional<UpdateKind> update_kind_from(std::string_view s) {
  if (s == "rectify") return UpdateKind::Rectify;
  if (s == "erase") return UpdateKind::Erase;
  return std::nullopt;
}

/// Per-dataset agreement contract: provenance hash, license gatekeeping,
/// token lifecycle and the append-only event log. Mutations happen only
/// from transaction execution; callers pass the mined time and tx id so
/// every event carries its provenance.
class DatasetContract {
 public:
  DatasetContract(Address self, Address provider, SimMillis tokenPeriodMs)
      : address_(self), provider_(provider), tokenPeriodMs_(tokenPeriodMs) {}

  const Address& address() const { return address_; }
  const Address& provider() const { return provider_; }
  const Digest& dataset_hash() const { return datasetHash_; }
  const std::string& descriptor() const { return descriptor_; }
  const std::string& link() const { return link_; }
  const std::optional<License>& license() const { return license_; }
  std::uint64_t version() const { return version_; }
  SimMillis token_period_ms() const { return tokenPeriodMs_; }
  const std::map<Address, RequesterEntry>& requesters() const { return requesters_; }
  const std::vector<ContractEvent>& event_log() const { return eventLog_; }

  std::optional<AccessToken> token_of(const Address& requester) const {
    auto it = requesters_.find(requester);
    if (it == requesters_.end()) return std::nullopt;
    return it->second.token;
  }

  VoidResult publish_data(const Address& caller, const std::string& descriptor,
                          const std::string& link, const Digest& hash, SimMillis now,
                          const Digest& txRef) {
    if (caller != provider_) return {Err::NotOwner, caller.str()};
    if (hash == kZeroDigest) return {Err::ZeroHash};
    descriptor_ = descriptor;
    link_ = link;
    datasetHash_ = hash;
    append_event(EventKind::Published, caller, {{"hash", to_hex(hash)}, {"link", link}}, txRef, now);
    return ok_void();
  }

  VoidResult set_license(const Address& caller, const License& license, SimMillis now,
                         const Digest& txRef) {
    if (caller != provider_) return {Err::NotOwner, caller.str()};
    if (license.permittedPurposes.empty()) return {Err::EmptyPurposes};
    license_ = license;
    append_event(EventKind::LicenseSet, caller,
                 {{"licenseType", license.licenseType}, {"purposes", join(license.permittedPurposes)}},
                 txRef, now);
    return ok_void();
  }

  Result<License> get_license() const {
    if (!license_) return {Err::NoLicense};
    return *license_;
  }

  /// Admits a requester under the license and issues a fresh token expiring
  /// at now + T. An existing entry blocks admission only while its token is
  /// still usable; expired, revoked or deleted entries are replaced, which
  /// is how re-subscription with a new purpose works.
  Result<AccessToken> add_data_requester(const Address& caller, const std::string& purpose,
                                         bool licenseAccepted, SimMillis now, const Digest& txRef) {
    if (!license_) return {Err::NoLicense};
    if (!licenseAccepted) return {Err::LicenseNotAccepted};
    if (!license_->permittedPurposes.count(purpose)) return {Err::PurposeIncompatible, purpose};
    auto it = requesters_.find(caller);
    if (it != requesters_.end() && it->second.token.state_at(now) == TokenState::Active)
      return {Err::AlreadySubscribed, caller.str()};

    RequesterEntry entry;
    entry.purpose = purpose;
    entry.confirmedVersion = version_;
    entry.lastRenewalAtMs = now;
    entry.token.tokenId = nextTokenId_++;
    entry.token.owner = caller;
    entry.token.contract = address_;
    entry.token.issuedAtMs = now;
    entry.token.expiresAtMs = now + tokenPeriodMs_;
    entry.token.state = TokenState::Active;
    requesters_[caller] = entry;
    append_event(EventKind::RequesterAdded, caller,
                 {{"purpose", purpose},
                  {"tokenId", std::to_string(entry.token.tokenId)},
                  {"expiresAtMs", std::to_string(entry.token.expiresAtMs)}},
                 txRef, now);
    return entry.token;
  }

  /// The single access gate: link retrieval requires an Active, unexpired
  /// token. Denials carry the precise sub-reason.
  Result<std::string> get_link(const Address& caller, SimMillis now, const Digest& txRef) {
    auto gate = check_access(caller, now);
    if (!gate.ok()) return {gate.error(), gate.detail()};
    append_event(EventKind::LinkServed, caller,
                 {{"tokenId", std::to_string(requesters_.at(caller).token.tokenId)}}, txRef, now);
    return link_;
  }

  /// Access predicate shared with the data store, so off-chain retrieval
  /// can never be more permissive than the contract itself.
  VoidResult check_access(const Address& caller, SimMillis now) const {
    auto it = requesters_.find(caller);
    if (it == requesters_.end() || it->second.token.state == TokenState::Deleted)
      return {Err::NoToken, caller.str()};
    switch (it->second.token.state_at(now)) {
      case TokenState::Revoked: return {Err::TokenRevoked, caller.str()};
      case TokenState::Expired: return {Err::TokenExpired, caller.str()};
      case TokenState::Deleted: return {Err::NoToken, caller.str()};
      case TokenState::Active: return ok_void();
    }
    return {Err::NoToken};
  }

  /// Renewal doubles as the periodic compliance declaration: a requester
  /// current with the dataset version gets a fresh period, anyone behind is
  /// revoked on the spot. Either outcome is a successful transaction.
  Result<AccessToken> renew_token(const Address& caller, SimMillis now, const Digest& txRef) {
    auto it = requesters_.find(caller);
    if (it == requesters_.end() || it->second.token.state == TokenState::Deleted)
      return {Err::NoToken, caller.str()};
    RequesterEntry& entry = it->second;
    if (entry.token.state == TokenState::Revoked) return {Err::TokenRevoked, caller.str()};
    if (entry.token.state_at(now) == TokenState::Expired) return {Err::TokenExpired, caller.str()};

    if (entry.confirmedVersion == version_) {
      entry.token.expiresAtMs = now + tokenPeriodMs_;
      entry.lastRenewalAtMs = now;
      append_event(EventKind::TokenRenewed, caller,
                   {{"tokenId", std::to_string(entry.token.tokenId)},
                    {"expiresAtMs", std::to_string(entry.token.expiresAtMs)}},
                   txRef, now);
    } else {
      entry.token.state = TokenState::Revoked;
      append_event(EventKind::TokenRevoked, caller,
                   {{"tokenId", std::to_string(entry.token.tokenId)},
                    {"confirmedVersion", std::to_string(entry.confirmedVersion)},
                    {"version", std::to_string(version_)}},
                   txRef, now);
    }
    return entry.token;
  }

  /// Bumps the dataset version and notifies every currently-active
  /// requester. Deleted, revoked and expired entries get no notification.
  Result<std::uint64_t> update_data(const Address& caller, const Digest& newHash, UpdateKind kind,
                                    const std::vector<std::string>& anonIds, SimMillis now,
                                    const Digest& txRef) {
    if (caller != provider_) return {Err::NotOwner, caller.str()};
    if (newHash == datasetHash_) return {Err::SameHash};
    ++version_;
    datasetHash_ = newHash;
    std::string recipients;
    for (const auto& [addr, entry] : requesters_) {
      if (entry.token.state_at(now) != TokenState::Active) continue;
      if (!recipients.empty()) recipients.push_back(',');
      recipients += addr.str();
    }
    append_event(EventKind::UpdateRequested, caller,
                 {{"kind", std::string(update_kind_name(kind))},
                  {"anonIds", join_list(anonIds)},
                  {"newVersion", std::to_string(version_)},
                  {"newHash", to_hex(newHash)},
                  {"recipients", recipients}},
                 txRef, now);
    return version_;
  }

  VoidResult confirm_update(const Address& caller, std::uint64_t version, SimMillis now,
                            const Digest& txRef) {
    auto it = requesters_.find(caller);
    if (it == requesters_.end() || it->second.token.state == TokenState::Deleted)
      return {Err::NoEntry, caller.str()};
    if (version != version_)
      return {Err::StaleVersion, std::to_string(version) + " != " + std::to_string(version_)};
    it->second.confirmedVersion = version;
    append_event(EventKind::UpdateConfirmed, caller, {{"version", std::to_string(version)}}, txRef,
                 now);
    return ok_void();
  }

  VoidResult unsubscribe(const Address& caller, SimMillis now, const Digest& txRef) {
    auto it = requesters_.find(caller);
    if (it == requesters_.end() || it->second.token.state == TokenState::Deleted)
      return {Err::NoToken, caller.str()};
    it->second.token.state = TokenState::Deleted;
    append_event(EventKind::Unsubscribed, caller,
                 {{"tokenId", std::to_string(it->second.token.tokenId)}}, txRef, now);
    return ok_void();
  }

  std::vector<ContractEvent> events(const EventFilter& filter = {}) const {
    std::vector<ContractEvent> out;
    for (const auto& e : eventLog_)
      if (filter.matches(e)) out.push_back(e);
    return out;
  }

 private:
  static std::string join(const std::set<std::string>& items) {
    std::string out;
    for (const auto& s : items) {
      if (!out.empty()) out.push_back(',');
      out += s;
    }
    return out;
  }
  static std::string join_list(const std::vector<std::string>& items) {
    std::string out;
    for (const auto& s : items) {
      if (!out.empty()) out.push_back(',');
      out += s;
    }
    return out;
  }

  void append_event(EventKind kind, const Address& actor, FieldMap payload, const Digest& txRef,
                    SimMillis at) {
    eventLog_.push_back(ContractEvent{kind, actor, std::move(payload), txRef, at});
  }

  Address address_;
  Address provider_;
  Digest datasetHash_{};
  std::string descriptor_;
  std::string link_;
  std::optional<License> license_;
  std::uint64_t version_ = 1;
  SimMillis tokenPeriodMs_;
  std::uint64_t nextTokenId_ = 1;
  std::map<Address, RequesterEntry> requesters_;
  std::vector<ContractEvent> eventLog_;
};

/// Minimal comparison contract: stores an integer at an address. Used by
/// the harness to price the platform overhead against bare transactions.
class BaselineContract {
 public:
  void set(const Address& key, std::int64_t value) { slots_[key] = value; }

  std::optional<std::int64_t> get(const Address& key) const {
    auto it = slots_.find(key);
    if (it == slots_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t size() const { return slots_.size(); }

 private:
  std::map<Address, std::int64_t> slots_;
};

}  // namespace luce
