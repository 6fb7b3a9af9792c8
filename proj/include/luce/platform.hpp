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
#include <string>
#include <vector>

#include "luce/canonical.hpp"
#include "luce/catalog.hpp"
#include "luce/contracts.hpp"
#include "luce/costmodel.hpp"
#include "luce/datastore.hpp"
#include "luce/ledger.hpp"

namespace luce {

/// One simulated LUCE node: the ledger, the registry and baseline
/// contracts, every deployed dataset contract, the off-chain store and the
/// metadata catalog. All contract state changes funnel through mined
/// transactions; views are free reads between blocks.
class Platform {
 public:
  explicit Platform(std::uint64_t seed, std::optional<MiningConfig> mining = std::nullopt)
      : seed_(seed), ledger_(clock_) {
    if (mining) {
      miningCfg_ = *mining;
    } else {
      miningCfg_.seed = derive_seed(seed, "mining");
    }
    ledger_.set_executor(
        [this](const Transaction& tx, SimMillis minedAt) { return execute(tx, minedAt); });
  }

  Platform(const Platform&) = delete;
  Platform& operator=(const Platform&) = delete;

  // Well-known system addresses.
  static Address registry_address() { return Address::derive("luce/registry"); }
  static Address baseline_address() { return Address::derive("luce/baseline"); }

  SimClock& clock() { return clock_; }
  const SimClock& clock() const { return clock_; }
  Ledger& ledger() { return ledger_; }
  const Ledger& ledger() const { return ledger_; }
  const UserRegistry& registry() const { return registry_; }
  DataStore& datastore() { return store_; }
  const DataStore& datastore() const { return store_; }
  Catalog& catalog() { return catalog_; }
  const Catalog& catalog() const { return catalog_; }
  const GasSchedule& schedule() const { return schedule_; }
  void set_schedule(GasSchedule s) { schedule_ = std::move(s); }
  MiningConfig& mining_config() { return miningCfg_; }
  const MiningConfig& mining_config() const { return miningCfg_; }

  const std::map<Address, DatasetContract>& contracts() const { return contracts_; }
  const DatasetContract* contract_at(const Address& a) const {
    auto it = contracts_.find(a);
    return it == contracts_.end() ? nullptr : &it->second;
  }
  bool is_deployed(const Address& a) const { return contracts_.count(a) != 0; }

  Address new_account() {
    Address a = Address::derive("account/" + std::to_string(seed_) + "/" +
                                std::to_string(accountCounter_++));
    ledger_.add_account(a);
    return a;
  }

  // --- submission helpers ---------------------------------------------------

  /// Generic entry point; validates the action name so malformed
  /// submissions are refused before they reach the mempool.
  Result<Digest> submit_action(const Address& sender, const Address& target,
                               const std::string& action, const FieldMap& params) {
    if (!schedule_.has(action)) return {Err::MalformedAction, "unknown action " + action};
    return ledger_.submit(sender, target, action, canonical_lines(params));
  }

  Result<Digest> submit_register(const Address& caller, Role role, const std::string& identityRef) {
    return submit_action(caller, registry_address(), actions::kRegister,
                         {{"role", std::string(role_name(role))}, {"identityRef", identityRef}});
  }

  struct PendingDeploy {
    Digest txId{};
    Address contractAddress{};
  };

  /// The deployed contract address is derived from (provider, nonce), so it
  /// is known at submission time and later transactions in the same block
  /// can already target it.
  Result<PendingDeploy> submit_deploy(const Address& provider,
                                      SimMillis tokenPeriodMs = kDefaultTokenPeriod) {
    Address expected = contract_address_for(provider, ledger_.next_nonce(provider));
    auto tx = submit_action(provider, kZeroAddress, actions::kDeploy,
                            {{"tokenPeriodMs", std::to_string(tokenPeriodMs)}});
    if (!tx) return {tx.error(), tx.detail()};
    return PendingDeploy{tx.value(), expected};
  }

  Result<Digest> submit_publish_data(const Address& provider, const Address& contract,
                                     const std::string& descriptor, const std::string& link,
                                     const Digest& hash) {
    return submit_action(provider, contract, actions::kPublishData,
                         {{"descriptor", descriptor}, {"link", link}, {"hash", to_hex(hash)}});
  }

  Result<Digest> submit_set_license(const Address& provider, const Address& contract,
                                    const License& license) {
    std::string purposes;
    for (const auto& p : license.permittedPurposes) {
      if (!valid_identifier(p)) return {Err::MalformedAction, "bad purpose code: " + p};
      if (!purposes.empty()) purposes.push_back(',');
      purposes += p;
    }
    return submit_action(provider, contract, actions::kSetLicense,
                         {{"licenseType", license.licenseType},
                          {"termsText", license.termsText},
                          {"purposes", purposes}});
  }

  Result<Digest> submit_get_license(const Address& caller, const Address& contract) {
    return submit_action(caller, contract, actions::kGetLicense, {});
  }

  Result<Digest> submit_add_data_requester(const Address& requester, const Address& contract,
                                           const std::string& purpose, bool licenseAccepted) {
    return submit_action(requester, contract, actions::kAddDataRequester,
                         {{"purpose", purpose}, {"licenseAccepted", licenseAccepted ? "true" : "false"}});
  }

  Result<Digest> submit_get_link(const Address& requester, const Address& contract) {
    return submit_action(requester, contract, actions::kGetLink, {});
  }

  Result<Digest> submit_renew_token(const Address& requester, const Address& contract) {
    return submit_action(requester, contract, actions::kRenewToken, {});
  }

  Result<Digest> submit_update_data(const Address& provider, const Address& contract,
                                    const Digest& newHash, UpdateKind kind,
                                    const std::vector<std::string>& anonIds) {
    std::string ids;
    for (const auto& id : anonIds) {
      if (!ids.empty()) ids.push_back(',');
      ids += id;
    }
    return submit_action(provider, contract, actions::kUpdateData,
                         {{"newHash", to_hex(newHash)},
                          {"kind", std::string(update_kind_name(kind))},
                          {"anonIds", ids}});
  }

  Result<Digest> submit_confirm_update(const Address& requester, const Address& contract,
                                       std::uint64_t version) {
    return submit_action(requester, contract, actions::kConfirmUpdate,
                         {{"version", std::to_string(version)}});
  }

  Result<Digest> submit_unsubscribe(const Address& requester, const Address& contract) {
    return submit_action(requester, contract, actions::kUnsubscribe, {});
  }

  Result<Digest> submit_baseline_set(const Address& caller, const Address& key,
                                     std::int64_t value) {
    return submit_action(caller, baseline_address(), actions::kBaselineSet,
                         {{"key", key.str()}, {"value", std::to_string(value)}});
  }

  Result<std::uint64_t> mine() { return ledger_.mine_next(miningCfg_); }
  Result<std::uint64_t> mine(const MiningConfig& cfg) { return ledger_.mine_next(cfg); }

  /// Mines until the mempool is drained (capacity-bounded blocks).
  VoidResult mine_all() {
    while (ledger_.mempool_size() > 0) {
      auto r = mine();
      if (!r) return {r.error(), r.detail()};
    }
    return ok_void();
  }

  // --- submit + mine + decode conveniences -----------------------------------

  Result<ExecOutcome> exec(Result<Digest> submitted) {
    if (!submitted) return {submitted.error(), submitted.detail()};
    auto mined = mine();
    if (!mined) return {mined.error(), mined.detail()};
    const ExecOutcome* o = ledger_.outcome_of(submitted.value());
    if (o == nullptr) return {Err::UnknownTx, "transaction not drained"};
    if (!o->ok()) return {o->code, o->detail};
    return *o;
  }

  VoidResult exec_register(const Address& caller, Role role, const std::string& identityRef) {
    return discard(exec(submit_register(caller, role, identityRef)));
  }

  Result<Address> exec_deploy(const Address& provider, SimMillis tokenPeriodMs = kDefaultTokenPeriod) {
    auto pending = submit_deploy(provider, tokenPeriodMs);
    if (!pending) return {pending.error(), pending.detail()};
    auto out = exec(Result<Digest>(pending.value().txId));
    if (!out) return {out.error(), out.detail()};
    return pending.value().contractAddress;
  }

  VoidResult exec_publish_data(const Address& provider, const Address& contract,
                               const std::string& descriptor, const std::string& link,
                               const Digest& hash) {
    return discard(exec(submit_publish_data(provider, contract, descriptor, link, hash)));
  }

  VoidResult exec_set_license(const Address& provider, const Address& contract,
                              const License& license) {
    return discard(exec(submit_set_license(provider, contract, license)));
  }

  Result<License> exec_get_license(const Address& caller, const Address& contract) {
    auto out = exec(submit_get_license(caller, contract));
    if (!out) return {out.error(), out.detail()};
    const DatasetContract* c = contract_at(contract);
    return c->get_license();
  }

  Result<AccessToken> exec_add_data_requester(const Address& requester, const Address& contract,
                                              const std::string& purpose, bool licenseAccepted) {
    auto out = exec(submit_add_data_requester(requester, contract, purpose, licenseAccepted));
    if (!out) return {out.error(), out.detail()};
    return *contract_at(contract)->token_of(requester);
  }

  Result<std::string> exec_get_link(const Address& requester, const Address& contract) {
    auto out = exec(submit_get_link(requester, contract));
    if (!out) return {out.error(), out.detail()};
    return out.value().output.at("link");
  }

  Result<AccessToken> exec_renew_token(const Address& requester, const Address& contract) {
    auto out = exec(submit_renew_token(requester, contract));
    if (!out) return {out.error(), out.detail()};
    return *contract_at(contract)->token_of(requester);
  }

  Result<std::uint64_t> exec_update_data(const Address& provider, const Address& contract,
                                         const Digest& newHash, UpdateKind kind,
                                         const std::vector<std::string>& anonIds) {
    auto out = exec(submit_update_data(provider, contract, newHash, kind, anonIds));
    if (!out) return {out.error(), out.detail()};
    return std::stoull(out.value().output.at("version"));
  }

  VoidResult exec_confirm_update(const Address& requester, const Address& contract,
                                 std::uint64_t version) {
    return discard(exec(submit_confirm_update(requester, contract, version)));
  }

  VoidResult exec_unsubscribe(const Address& requester, const Address& contract) {
    return discard(exec(submit_unsubscribe(requester, contract)));
  }

  VoidResult exec_baseline_set(const Address& caller, const Address& key, std::int64_t value) {
    return discard(exec(submit_baseline_set(caller, key, value)));
  }

  // --- free views -------------------------------------------------------------

  Result<UserRegistry::Entry> resolve(const Address& caller, const Address& target) const {
    return registry_.resolve(caller, target);
  }

  /// The ledger is public, but the platform only answers registered users.
  Result<std::vector<ContractEvent>> events(const Address& caller, const Address& contract,
                                            const EventFilter& filter = {}) const {
    if (!registry_.is_registered(caller)) return {Err::NotRegistered, caller.str()};
    const DatasetContract* c = contract_at(contract);
    if (c == nullptr) return {Err::UnknownContract, contract.str()};
    return c->events(filter);
  }

  std::optional<std::int64_t> baseline_get(const Address& key) const { return baseline_.get(key); }

  Result<Unit> catalog_publish(const CatalogEntry& entry) {
    return catalog_.publish_entry(entry, [this](const Address& a) { return is_deployed(a); });
  }

  /// Re-executes an exported chain against a fresh platform. Fails if any
  /// recorded transaction does not replay to the same outcome and gas.
  VoidResult replay(const Chain& chain) {
    for (std::size_t i = 1; i < chain.blocks.size(); ++i) {
      const Block& b = chain.blocks[i];
      for (const Transaction& tx : b.txs) {
        ledger_.add_account(tx.sender);
        ExecOutcome out = execute(tx, b.minedAtMs);
        if (!out.ok())
          return {out.code, "replay diverged at tx " + to_hex(tx.txId) + ": " + out.detail};
        if (out.gasUsed != tx.gasUsed)
          return {Err::MalformedAction, "replay gas mismatch at tx " + to_hex(tx.txId)};
      }
      clock_.advance_to(b.minedAtMs);
    }
    return ok_void();
  }

 private:
  static VoidResult discard(const Result<ExecOutcome>& r) {
    if (!r) return {r.error(), r.detail()};
    return ok_void();
  }

  static Address contract_address_for(const Address& provider, std::uint64_t nonce) {
    return Address::derive("contract/" + provider.str() + "/" + std::to_string(nonce));
  }

  ExecOutcome fail(Err code, std::string detail = "") const {
    return ExecOutcome::failure(code, std::move(detail));
  }

  ExecOutcome execute(const Transaction& tx, SimMillis minedAt) {
    const std::string& action = tx.action;
    std::uint64_t gas = schedule_.transaction_gas(action);
    if (gas == 0) return fail(Err::MalformedAction, "unknown action " + action);
    FieldMap params = parse_canonical_lines(tx.payload);

    if (action == actions::kRegister) {
      if (tx.target != registry_address()) return fail(Err::MalformedAction, "wrong target");
      auto role = role_from(params.count("role") ? params.at("role") : "");
      if (!role) return fail(Err::MalformedAction, "bad role");
      auto r = registry_.register_user(tx.sender, *role, value_or(params, "identityRef"));
      if (!r.ok()) return fail(r.error(), r.detail());
      return ExecOutcome::success(gas);
    }

    // Everything else requires registration.
    if (!registry_.is_registered(tx.sender)) return fail(Err::NotRegistered, tx.sender.str());

    if (action == actions::kDeploy) {
      if (!tx.target.is_zero()) return fail(Err::MalformedAction, "deploy targets the zero address");
      if (registry_.role_of(tx.sender) != Role::DataProvider) return fail(Err::WrongRole);
      SimMillis period = kDefaultTokenPeriod;
      if (params.count("tokenPeriodMs")) {
        period = std::stoll(params.at("tokenPeriodMs"));
        if (period <= 0) return fail(Err::MalformedAction, "tokenPeriodMs must be positive");
      }
      Address addr = contract_address_for(tx.sender, tx.nonce);
      contracts_.emplace(addr, DatasetContract(addr, tx.sender, period));
      return ExecOutcome::success(gas, {{"contract", addr.str()}});
    }

    if (action == actions::kBaselineSet) {
      if (tx.target != baseline_address()) return fail(Err::MalformedAction, "wrong target");
      auto key = Address::parse(value_or(params, "key"));
      if (!key || !params.count("value")) return fail(Err::MalformedAction, "baselineSet needs key and value");
      baseline_.set(*key, std::stoll(params.at("value")));
      return ExecOutcome::success(gas);
    }

    // Dataset contract actions.
    auto it = contracts_.find(tx.target);
    if (it == contracts_.end()) return fail(Err::UnknownContract, tx.target.str());
    DatasetContract& contract = it->second;

    if (action == actions::kPublishData) {
      auto hash = digest_from_hex(value_or(params, "hash"));
      if (!hash) return fail(Err::MalformedAction, "bad hash");
      auto r = contract.publish_data(tx.sender, value_or(params, "descriptor"),
                                     value_or(params, "link"), *hash, minedAt, tx.txId);
      if (!r.ok()) return fail(r.error(), r.detail());
      return ExecOutcome::success(gas);
    }

    if (action == actions::kSetLicense) {
      License lic;
      lic.licenseType = value_or(params, "licenseType");
      lic.termsText = value_or(params, "termsText");
      for (const auto& p : split_csv_list(value_or(params, "purposes")))
        lic.permittedPurposes.insert(p);
      auto r = contract.set_license(tx.sender, lic, minedAt, tx.txId);
      if (!r.ok()) return fail(r.error(), r.detail());
      return ExecOutcome::success(gas);
    }

    if (action == actions::kGetLicense) {
      auto r = contract.get_license();
      if (!r.ok()) return fail(r.error(), r.detail());
      std::string purposes;
      for (const auto& p : r.value().permittedPurposes) {
        if (!purposes.empty()) purposes.push_back(',');
        purposes += p;
      }
      return ExecOutcome::success(
          gas, {{"licenseType", r.value().licenseType}, {"purposes", purposes}});
    }

    if (action == actions::kAddDataRequester) {
      if (registry_.role_of(tx.sender) != Role::DataRequester) return fail(Err::WrongRole);
      auto r = contract.add_data_requester(tx.sender, value_or(params, "purpose"),
                                           value_or(params, "licenseAccepted") == "true", minedAt,
                                           tx.txId);
      if (!r.ok()) return fail(r.error(), r.detail());
      return ExecOutcome::success(gas,
                                  {{"tokenId", std::to_string(r.value().tokenId)},
                                   {"expiresAtMs", std::to_string(r.value().expiresAtMs)}});
    }

    if (action == actions::kGetLink) {
      auto r = contract.get_link(tx.sender, minedAt, tx.txId);
      if (!r.ok()) return fail(r.error(), r.detail());
      return ExecOutcome::success(gas, {{"link", r.value()}});
    }

    if (action == actions::kRenewToken) {
      auto r = contract.renew_token(tx.sender, minedAt, tx.txId);
      if (!r.ok()) return fail(r.error(), r.detail());
      return ExecOutcome::success(gas,
                                  {{"state", std::string(token_state_name(r.value().state))},
                                   {"expiresAtMs", std::to_string(r.value().expiresAtMs)}});
    }

    if (action == actions::kUpdateData) {
      auto hash = digest_from_hex(value_or(params, "newHash"));
      if (!hash) return fail(Err::MalformedAction, "bad newHash");
      auto kind = update_kind_from(value_or(params, "kind"));
      if (!kind) return fail(Err::MalformedAction, "bad update kind");
      auto r = contract.update_data(tx.sender, *hash, *kind,
                                    split_csv_list(value_or(params, "anonIds")), minedAt, tx.txId);
      if (!r.ok()) return fail(r.error(), r.detail());
      return ExecOutcome::success(gas, {{"version", std::to_string(r.value())}});
    }

    if (action == actions::kConfirmUpdate) {
      if (!params.count("version")) return fail(Err::MalformedAction, "missing version");
      auto r = contract.confirm_update(tx.sender, std::stoull(params.at("version")), minedAt,
                                       tx.txId);
      if (!r.ok()) return fail(r.error(), r.detail());
      return ExecOutcome::success(gas);
    }

    if (action == actions::kUnsubscribe) {
      auto r = contract.unsubscribe(tx.sender, minedAt, tx.txId);
      if (!r.ok()) return fail(r.error(), r.detail());
      return ExecOutcome::success(gas);
    }

    return fail(Err::MalformedAction, "unhandled action " + action);
  }

  static std::string value_or(const FieldMap& m, const std::string& key) {
    auto it = m.find(key);
    return it == m.end() ? std::string() : it->second;
  }

  static std::vector<std::string> split_csv_list(const std::string& joined) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos <= joined.size() && !joined.empty()) {
      std::size_t comma = joined.find(',', pos);
      out.push_back(joined.substr(pos, comma == std::string::npos ? comma : comma - pos));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    return out;
  }

  std::uint64_t seed_;
  SimClock clock_;
  Ledger ledger_;
  UserRegistry registry_;
  std::map<Address, DatasetContract> contracts_;
  BaselineContract baseline_;
  DataStore store_;
  Catalog catalog_;
  GasSchedule schedule_ = GasSchedule::defaults();
  MiningConfig miningCfg_;
  std::uint64_t accountCounter_ = 0;
};

}  // namespace luce
