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

#include <cassert>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

namespace luce {

/// Error codes shared by the ledger, contracts and workflow layers.
enum class Err {
  None = 0,
  // ledger
  UnknownSender,
  MalformedAction,
  EmptyMempool,
  UnknownTx,
  InvalidConfig,
  // registry
  AlreadyRegistered,
  NotRegistered,
  NotAuthority,
  UnknownAddress,
  WrongRole,
  // dataset contract
  UnknownContract,
  NotOwner,
  ZeroHash,
  EmptyPurposes,
  NoLicense,
  LicenseNotAccepted,
  PurposeIncompatible,
  AlreadySubscribed,
  NoToken,
  TokenExpired,
  TokenRevoked,
  StaleVersion,
  NoEntry,
  SameHash,
  // catalog
  DuplicateId,
  // datastore
  UnknownAnonId,
  TokenInvalid,
  UnknownLink,
  // costmodel
  UnknownAction,
  // workflows
  UnknownSubject,
  UnknownDataset,
};

inline std::string_view err_name(Err e) {
  switch (e) {
    case Err::None: return "None";
    case Err::UnknownSender: return "UnknownSender";
    case Err::MalformedAction: return "MalformedAction";
    case Err::EmptyMempool: return "EmptyMempool";
    case Err::UnknownTx: return "UnknownTx";
    case Err::InvalidConfig: return "InvalidConfig";
    case Err::AlreadyRegistered: return "AlreadyRegistered";
    case Err::NotRegistered: return "NotRegistered";
    case Err::NotAuthority: return "NotAuthority";
    case Err::UnknownAddress: return "UnknownAddress";
    case Err::WrongRole: return "WrongRole";
    case Err::UnknownContract: return "UnknownContract";
    case Err::NotOwner: return "NotOwner";
    case Err::ZeroHash: return "ZeroHash";
    case Err::EmptyPurposes: return "EmptyPurposes";
    case Err::NoLicense: return "NoLicense";
    case Err::LicenseNotAccepted: return "LicenseNotAccepted";
    case Err::PurposeIncompatible: return "PurposeIncompatible";
    case Err::AlreadySubscribed: return "AlreadySubscribed";
    case Err::NoToken: return "NoToken";
    case Err::TokenExpired: return "TokenExpired";
    case Err::TokenRevoked: return "TokenRevoked";
    case Err::StaleVersion: return "StaleVersion";
    case Err::NoEntry: return "NoEntry";
    case Err::SameHash: return "SameHash";
    case Err::DuplicateId: return "DuplicateId";
    case Err::UnknownAnonId: return "UnknownAnonId";
    case Err::TokenInvalid: return "TokenInvalid";
    case Err::UnknownLink: return "UnknownLink";
    case Err::UnknownAction: return "UnknownAction";
    case Err::UnknownSubject: return "UnknownSubject";
    case Err::UnknownDataset: return "UnknownDataset";
  }
  return "?";
}

/// Value-or-error result. Errors are expected protocol outcomes here, not
/// exceptional conditions, so they travel as values the tests can assert on.
template <typename T>
class Result {
 public:
  Result(T value) : value_(std::move(value)) {}  // NOLINT(google-explicit-constructor)
  Result(Err err, std::string detail = "") : err_(err), detail_(std::move(detail)) {
    assert(err != Err::None);
  }

  bool ok() const { return err_ == Err::None; }
  explicit operator bool() const { return ok(); }

  Err error() const { return err_; }
  const std::string& detail() const { return detail_; }

  const T& value() const& {
    assert(ok());
    return *value_;
  }
  T& value() & {
    assert(ok());
    return *value_;
  }
  T&& value() && {
    assert(ok());
    return std::move(*value_);
  }

  std::string message() const {
    std::string m{err_name(err_)};
    if (!detail_.empty()) {
      m += ": ";
      m += detail_;
    }
    return m;
  }

 private:
  std::optional<T> value_;
  Err err_ = Err::None;
  std::string detail_;
};

struct Unit {};
using VoidResult = Result<Unit>;

inline VoidResult ok_void() { return VoidResult(Unit{}); }

}  // namespace luce
