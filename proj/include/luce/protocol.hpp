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
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "luce/platform.hpp"

namespace luce::protocol {

/// Deterministic event loop over the simulated clock. Actions fire in
/// (time, insertion) order; each action submits its transactions and mines
/// its own block, so one actor round is one block and reads between rounds
/// always see mined state.
class SimulationLoop {
 public:
  using Action = std::function<void()>;

  explicit SimulationLoop(Platform& platform) : platform_(&platform) {}

  void schedule(SimMillis at, Action fn) {
    at = std::max(at, platform_->clock().now_ms());
    queue_.emplace(std::make_pair(at, seq_++), std::move(fn));
  }

  std::optional<SimMillis> next_due() const {
    if (queue_.empty()) return std::nullopt;
    return queue_.begin()->first.first;
  }

  bool step() {
    if (queue_.empty()) return false;
    auto node = queue_.extract(queue_.begin());
    platform_->clock().advance_to(node.key().first);
    node.mapped()();
    return true;
  }

  /// Runs every action due at or before `until`, then moves the clock there.
  void run_until(SimMillis until) {
    while (!queue_.empty() && queue_.begin()->first.first <= until) step();
    platform_->clock().advance_to(until);
  }

  Platform& platform() { return *platform_; }

 private:
  Platform* platform_;
  std::map<std::pair<SimMillis, std::uint64_t>, Action> queue_;
  std::uint64_t seq_ = 0;
};

// --- actors -----------------------------------------------------------------

struct ProviderAgent {
  Address address{};
  SubjectMapping subjects;

  struct DatasetRef {
    Address contract{};
    std::string link;
  };
  std::map<std::string, DatasetRef> datasets;  // by datasetId
};

/// Misbehaviour knobs for simulated requesters, used to generate the
/// violation traces authority audits must catch.
struct RequesterBehavior {
  bool ignoreUpdates = false;  // renews without confirming pending updates
  bool neverRenew = false;     // lets the token lapse silently
};

struct MaintenanceRecord {
  SimMillis atMs = 0;
  std::string outcome;  // renewed | renewed+confirmed | revoked | expired | stopped
};

struct RequesterAgent {
  Address address{};
  std::string purpose = "research";
  RequesterBehavior behavior;
  std::vector<MaintenanceRecord> log;
};

// --- sharing (provider flow) --------------------------------------------------

struct Descriptor {
  std::string datasetId;
  std::string title;
  std::string description;
  std::vector<std::string> keywords;
};

struct ShareOutcome {
  Address contract{};
  std::string datasetId;
  std::string link;
  Digest hash{};
  std::uint64_t gasUsed = 0;  // deploy + publishData + setLicense
};

/// Deploys the dataset contract, stores the records, publishes descriptor
/// and provenance hash, sets the license and lists the dataset in the
/// catalog — atomically from the catalog's point of view: any failure
/// leaves no entry behind.
inline Result<ShareOutcome> share_dataset(Platform& p, ProviderAgent& provider, RecordSet records,
                                          const Descriptor& desc, const License& license,
                                          SimMillis tokenPeriodMs = kDefaultTokenPeriod) {
  if (license.permittedPurposes.empty()) return {Err::EmptyPurposes};
  if (p.catalog().find(desc.datasetId)) return {Err::DuplicateId, desc.datasetId};

  auto deploy = p.submit_deploy(provider.address, tokenPeriodMs);
  if (!deploy) return {deploy.error(), deploy.detail()};
  const Address contract = deploy.value().contractAddress;

  auto [link, hash] = p.datastore().store(contract, std::move(records));

  auto publish = p.submit_publish_data(provider.address, contract,
                                       desc.title + ": " + desc.description, link, hash);
  if (!publish) return {publish.error(), publish.detail()};
  auto setLic = p.submit_set_license(provider.address, contract, license);
  if (!setLic) return {setLic.error(), setLic.detail()};

  if (auto mined = p.mine_all(); !mined.ok()) return {mined.error(), mined.detail()};

  std::uint64_t gas = 0;
  for (const Digest* id : {&deploy.value().txId, &publish.value(), &setLic.value()}) {
    auto receipt = p.ledger().receipt_of(*id);
    const ExecOutcome* out = p.ledger().outcome_of(*id);
    if (!receipt || receipt.value().status != TxStatus::Mined)
      return {out && !out->ok() ? out->code : Err::MalformedAction,
              out && !out->ok() ? out->detail : "share transaction rejected"};
    gas += receipt.value().gasUsed;
  }

  CatalogEntry entry;
  entry.datasetId = desc.datasetId;
  entry.title = desc.title;
  entry.description = desc.description;
  entry.keywords = desc.keywords;
  entry.licenseType = license.licenseType;
  entry.contractAddress = contract;
  if (auto pub = p.catalog_publish(entry); !pub.ok()) return {pub.error(), pub.detail()};

  provider.datasets[desc.datasetId] = {contract, link};
  return ShareOutcome{contract, desc.datasetId, link, hash, gas};
}

// --- reuse (requester flow) ---------------------------------------------------

struct AcquireOutcome {
  Address contract{};
  std::string link;
  AccessToken token{};
  RecordSet records;
};

/// Query -> read license -> accept and subscribe -> download link -> fetch.
/// The three contract calls ride in one block; the first failure wins.
/// `opCostMs` charges the simulated clock for each of the five platform
/// operations the round performs (query, three contract calls, fetch).
inline Result<AcquireOutcome> acquire(Platform& p, RequesterAgent& requester,
                                      const std::string& datasetId, SimMillis opCostMs = 0) {
  p.clock().advance(opCostMs);
  auto entry = p.catalog().find(datasetId);
  if (!entry) return {Err::UnknownDataset, datasetId};
  const Address contract = entry->contractAddress;

  p.clock().advance(opCostMs);
  auto lic = p.submit_get_license(requester.address, contract);
  if (!lic) return {lic.error(), lic.detail()};
  p.clock().advance(opCostMs);
  auto add = p.submit_add_data_requester(requester.address, contract, requester.purpose, true);
  if (!add) return {add.error(), add.detail()};
  p.clock().advance(opCostMs);
  auto get = p.submit_get_link(requester.address, contract);
  if (!get) return {get.error(), get.detail()};
  if (auto mined = p.mine_all(); !mined.ok()) return {mined.error(), mined.detail()};

  for (const Digest* id : {&lic.value(), &add.value(), &get.value()}) {
    const ExecOutcome* out = p.ledger().outcome_of(*id);
    if (out == nullptr) return {Err::UnknownTx};
    if (!out->ok()) return {out->code, out->detail};
  }

  const DatasetContract* c = p.contract_at(contract);
  AcquireOutcome result;
  result.contract = contract;
  result.link = p.ledger().outcome_of(get.value())->output.at("link");
  result.token = *c->token_of(requester.address);
  p.clock().advance(opCostMs);
  auto fetched =
      p.datastore().fetch(result.link, result.token, *c, p.clock().now_ms());
  if (!fetched) return {fetched.error(), fetched.detail()};
  result.records = std::move(fetched.value());
  return result;
}

// --- compliance maintenance -----------------------------------------------------

/// Schedules the requester's periodic renewals (confirming pending updates
/// first) until `untilMs`. Outcomes append to the agent's log; the driver
/// stops at the first terminal state.
inline void start_maintenance(SimulationLoop& loop, RequesterAgent& agent, Address contract,
                              SimMillis untilMs, SimMillis renewLeadMs = sim_hours(1)) {
  if (agent.behavior.neverRenew) return;
  Platform& p = loop.platform();
  const DatasetContract* c = p.contract_at(contract);
  if (c == nullptr) return;
  auto token = c->token_of(agent.address);
  if (!token) return;

  struct Driver {
    static void fire(SimulationLoop& loop, RequesterAgent& agent, Address contract,
                     SimMillis untilMs, SimMillis leadMs) {
      Platform& p = loop.platform();
      SimMillis now = p.clock().now_ms();
      const DatasetContract* c = p.contract_at(contract);
      auto entry = c->requesters().find(agent.address);
      if (entry == c->requesters().end()) return;
      const AccessToken& token = entry->second.token;
      if (token.state == TokenState::Deleted || token.state == TokenState::Revoked) {
        agent.log.push_back({now, "stopped"});
        return;
      }
      if (token.state_at(now) == TokenState::Expired) {
        agent.log.push_back({now, "expired"});
        return;
      }

      bool confirmed = false;
      if (entry->second.confirmedVersion < c->version() && !agent.behavior.ignoreUpdates) {
        p.submit_confirm_update(agent.address, contract, c->version());
        confirmed = true;
      }
      p.submit_renew_token(agent.address, contract);
      p.mine_all();

      auto after = c->token_of(agent.address);
      if (after->state == TokenState::Revoked) {
        agent.log.push_back({p.clock().now_ms(), "revoked"});
        return;
      }
      agent.log.push_back({p.clock().now_ms(), confirmed ? "renewed+confirmed" : "renewed"});
      SimMillis next = after->expiresAtMs - leadMs;
      if (next <= untilMs)
        loop.schedule(next, [&loop, &agent, contract, untilMs, leadMs] {
          fire(loop, agent, contract, untilMs, leadMs);
        });
    }
  };

  SimMillis first = token->expiresAtMs - renewLeadMs;
  if (first <= untilMs)
    loop.schedule(first, [&loop, &agent, contract, untilMs, renewLeadMs] {
      Driver::fire(loop, agent, contract, untilMs, renewLeadMs);
    });
}

/// Stand-alone maintenance for a single requester: runs its renewals on a
/// private loop up to `untilMs` and returns the log.
inline std::vector<MaintenanceRecord> maintain(Platform& p, RequesterAgent& agent, Address contract,
                                               SimMillis untilMs,
                                               SimMillis renewLeadMs = sim_hours(1)) {
  SimulationLoop loop(p);
  std::size_t before = agent.log.size();
  start_maintenance(loop, agent, contract, untilMs, renewLeadMs);
  loop.run_until(untilMs);
  return {agent.log.begin() + static_cast<std::ptrdiff_t>(before), agent.log.end()};
}

// --- GDPR rights -----------------------------------------------------------------

struct SubjectReport {
  std::string subjectIdentity;
  struct RequesterInfo {
    Address address{};
    std::string purpose;
    TokenState tokenState = TokenState::Active;
  };
  struct Entry {
    std::string datasetId;
    Address contractAddress{};
    std::vector<RequesterInfo> requesters;
  };
  std::vector<Entry> entries;
};

/// Which datasets hold the subject's records, and who is reusing them for
/// what purpose. Built from provider-local mappings plus contract state;
/// no other subject's identity appears.
inline Result<SubjectReport> subject_report(Platform& p, const Address& subjectAddress,
                                            const std::string& subjectIdentity,
                                            std::span<const ProviderAgent* const> providers) {
  if (!p.registry().is_registered(subjectAddress)) return {Err::NotRegistered};
  SubjectReport report;
  report.subjectIdentity = subjectIdentity;
  bool mapped = false;
  SimMillis now = p.clock().now_ms();
  for (const ProviderAgent* provider : providers) {
    for (const auto& [datasetId, ref] : provider->datasets) {
      auto anon = provider->subjects.anon_id_for(datasetId, subjectIdentity);
      if (!anon) continue;
      mapped = true;
      const RecordSet* current = p.datastore().peek(ref.link);
      if (current == nullptr || !current->records.count(*anon)) continue;
      const DatasetContract* c = p.contract_at(ref.contract);
      SubjectReport::Entry entry;
      entry.datasetId = datasetId;
      entry.contractAddress = ref.contract;
      for (const auto& [addr, req] : c->requesters())
        entry.requesters.push_back({addr, req.purpose, req.token.state_at(now)});
      report.entries.push_back(std::move(entry));
    }
  }
  if (!mapped) return {Err::UnknownSubject, subjectIdentity};
  return report;
}

struct PropagationStatus {
  Address requester{};
  std::string status;  // confirmed | revoked | expired | deleted | pending
};

struct UpdateOutcome {
  std::uint64_t newVersion = 0;
  Digest newHash{};
  SimMillis requestedAtMs = 0;
  SimMillis resolvedAtMs = 0;
  bool completedWithinPeriod = false;
  std::vector<PropagationStatus> requesters;  // everyone active at the update
};

namespace detail {

inline std::string propagation_status(const RequesterEntry& entry, std::uint64_t newVersion,
                                      SimMillis now) {
  if (entry.token.state == TokenState::Deleted) return "deleted";
  if (entry.token.state == TokenState::Revoked) return "revoked";
  if (entry.confirmedVersion >= newVersion) return "confirmed";
  if (entry.token.state_at(now) == TokenState::Expired) return "expired";
  return "pending";
}

/// Shared implementation of the rectify/erase flows: apply the change to
/// the provider's copy, replace the stored content, raise updateData, then
/// wait (at most one token period) for every active requester to confirm
/// or lose access.
inline Result<UpdateOutcome> propagate_update(Platform& p, SimulationLoop& loop,
                                              ProviderAgent& provider,
                                              const std::string& datasetId, RecordSet updated,
                                              UpdateKind kind,
                                              const std::vector<std::string>& anonIds) {
  auto ref = provider.datasets.find(datasetId);
  const Address contract = ref->second.contract;
  const std::string& link = ref->second.link;
  const DatasetContract* c = p.contract_at(contract);

  Digest newHash = hash_records(updated);
  if (newHash == c->dataset_hash()) return {Err::SameHash};

  updated.version = c->version() + 1;
  p.datastore().replace(link, std::move(updated));
  auto versionRes = p.exec_update_data(provider.address, contract, newHash, kind, anonIds);
  if (!versionRes) return {versionRes.error(), versionRes.detail()};

  UpdateOutcome outcome;
  outcome.newVersion = versionRes.value();
  outcome.newHash = newHash;
  outcome.requestedAtMs = p.clock().now_ms();

  // Recipients recorded by the update event: everyone active at that instant.
  std::vector<Address> recipients;
  for (const auto& e : c->event_log()) {
    if (e.kind != EventKind::UpdateRequested) continue;
    if (std::stoull(e.payload.at("newVersion")) != outcome.newVersion) continue;
    std::size_t pos = 0;
    const std::string& joined = e.payload.at("recipients");
    while (pos < joined.size()) {
      std::size_t comma = joined.find(',', pos);
      auto addr = Address::parse(joined.substr(pos, comma == std::string::npos ? comma : comma - pos));
      if (addr) recipients.push_back(*addr);
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
  }

  const SimMillis deadline = outcome.requestedAtMs + c->token_period_ms();
  auto unresolved = [&]() {
    SimMillis now = p.clock().now_ms();
    for (const Address& r : recipients) {
      auto it = c->requesters().find(r);
      if (it == c->requesters().end()) continue;
      if (detail::propagation_status(it->second, outcome.newVersion, now) == "pending") return true;
    }
    return false;
  };

  // Poll as the loop advances block by block, bounded by one token period.
  while (p.clock().now_ms() < deadline && unresolved()) {
    auto due = loop.next_due();
    if (!due || *due > deadline) {
      p.clock().advance_to(deadline);
      break;
    }
    loop.step();
  }

  SimMillis now = p.clock().now_ms();
  outcome.resolvedAtMs = now;
  outcome.completedWithinPeriod = !unresolved();
  for (const Address& r : recipients) {
    auto it = c->requesters().find(r);
    if (it == c->requesters().end()) continue;
    outcome.requesters.push_back({r, detail::propagation_status(it->second, outcome.newVersion, now)});
  }
  return outcome;
}

}  // namespace detail

inline Result<UpdateOutcome> request_erasure(Platform& p, SimulationLoop& loop,
                                             ProviderAgent& provider,
                                             const std::string& subjectIdentity,
                                             const std::string& datasetId) {
  if (!provider.datasets.count(datasetId)) return {Err::UnknownDataset, datasetId};
  auto anon = provider.subjects.anon_id_for(datasetId, subjectIdentity);
  if (!anon) return {Err::UnknownSubject, subjectIdentity};
  const RecordSet* current = p.datastore().peek(provider.datasets.at(datasetId).link);
  auto erased = apply_erase(*current, *anon);
  if (!erased) return {Err::UnknownSubject, subjectIdentity};
  return detail::propagate_update(p, loop, provider, datasetId, std::move(erased.value()),
                                  UpdateKind::Erase, {*anon});
}

inline Result<UpdateOutcome> request_rectification(Platform& p, SimulationLoop& loop,
                                                   ProviderAgent& provider,
                                                   const std::string& subjectIdentity,
                                                   const std::string& datasetId,
                                                   const std::map<std::string, std::string>& newFields) {
  if (!provider.datasets.count(datasetId)) return {Err::UnknownDataset, datasetId};
  auto anon = provider.subjects.anon_id_for(datasetId, subjectIdentity);
  if (!anon) return {Err::UnknownSubject, subjectIdentity};
  const RecordSet* current = p.datastore().peek(provider.datasets.at(datasetId).link);
  auto rectified = apply_rectify(*current, *anon, newFields);
  if (!rectified) return {Err::UnknownSubject, subjectIdentity};
  return detail::propagate_update(p, loop, provider, datasetId, std::move(rectified.value()),
                                  UpdateKind::Rectify, {*anon});
}

// --- authority audit ---------------------------------------------------------------

struct ComplianceReport {
  bool compliant = true;
  std::size_t updatesChecked = 0;
  std::vector<Address> offenders;
};

/// Event-log predicate: every recipient of every UpdateRequested whose
/// window has elapsed must show UpdateConfirmed (at the new version or
/// later) or TokenRevoked within one token period of the update.
inline ComplianceReport audit_update_compliance(const DatasetContract& c, SimMillis now) {
  ComplianceReport report;
  const auto& log = c.event_log();
  for (std::size_t i = 0; i < log.size(); ++i) {
    if (log[i].kind != EventKind::UpdateRequested) continue;
    ++report.updatesChecked;
    const std::uint64_t version = std::stoull(log[i].payload.at("newVersion"));
    const SimMillis deadline = log[i].atMs + c.token_period_ms();
    if (deadline > now) continue;  // window still open, nothing to judge yet
    const std::string& joined = log[i].payload.at("recipients");
    std::size_t pos = 0;
    while (pos < joined.size()) {
      std::size_t comma = joined.find(',', pos);
      auto addr = Address::parse(joined.substr(pos, comma == std::string::npos ? comma : comma - pos));
      pos = comma == std::string::npos ? joined.size() : comma + 1;
      if (!addr) continue;
      bool resolved = false;
      for (const auto& e : log) {
        if (e.atMs > deadline) break;
        if (e.actor != *addr) continue;
        if (e.kind == EventKind::UpdateConfirmed && std::stoull(e.payload.at("version")) >= version)
          resolved = true;
        if (e.kind == EventKind::TokenRevoked) resolved = true;
      }
      if (!resolved) {
        report.compliant = false;
        report.offenders.push_back(*addr);
      }
    }
  }
  return report;
}

struct Complaint {
  std::uint64_t complaintId = 0;
  std::string subjectIdentity;
  std::string datasetId;
  SimMillis filedAtMs = 0;
  enum class Outcome { Open, Compliant, NonCompliant } outcome = Outcome::Open;
  std::vector<Address> offenders;
};

inline std::string_view complaint_outcome_name(Complaint::Outcome o) {
  switch (o) {
    case Complaint::Outcome::Open: return "open";
    case Complaint::Outcome::Compliant: return "compliant";
    case Complaint::Outcome::NonCompliant: return "non-compliant";
  }
  return "?";
}

/// Files a complaint and audits the dataset's contract on the subject's
/// behalf. Only the supervisory authority may run the audit.
inline Result<Complaint> file_and_audit(Platform& p, const Address& authority,
                                        const std::string& subjectIdentity,
                                        const std::string& datasetId) {
  if (p.registry().role_of(authority) != Role::SupervisoryAuthority)
    return {Err::NotAuthority, authority.str()};
  auto entry = p.catalog().find(datasetId);
  if (!entry) return {Err::UnknownDataset, datasetId};
  const DatasetContract* c = p.contract_at(entry->contractAddress);
  if (c == nullptr) return {Err::UnknownContract};

  Complaint complaint;
  // Deterministic id: a function of who filed about what, and when.
  complaint.complaintId =
      derive_seed(static_cast<std::uint64_t>(p.clock().now_ms()), subjectIdentity + "/" + datasetId) >> 32;
  complaint.subjectIdentity = subjectIdentity;
  complaint.datasetId = datasetId;
  complaint.filedAtMs = p.clock().now_ms();
  ComplianceReport audit = audit_update_compliance(*c, p.clock().now_ms());
  complaint.outcome = audit.compliant ? Complaint::Outcome::Compliant : Complaint::Outcome::NonCompliant;
  complaint.offenders = audit.offenders;
  return complaint;
}

// --- JSON exports ---------------------------------------------------------------

inline nlohmann::ordered_json subject_report_to_json(const SubjectReport& report) {
  nlohmann::ordered_json j;
  j["subjectIdentity"] = report.subjectIdentity;
  j["entries"] = nlohmann::ordered_json::array();
  for (const auto& e : report.entries) {
    nlohmann::ordered_json je;
    je["datasetId"] = e.datasetId;
    je["contractAddress"] = e.contractAddress.str();
    je["requesters"] = nlohmann::ordered_json::array();
    for (const auto& r : e.requesters) {
      je["requesters"].push_back({{"address", r.address.str()},
                                  {"purpose", r.purpose},
                                  {"tokenState", std::string(token_state_name(r.tokenState))}});
    }
    j["entries"].push_back(std::move(je));
  }
  return j;
}

inline nlohmann::ordered_json complaint_to_json(const Complaint& c) {
  nlohmann::ordered_json j;
  j["complaintId"] = c.complaintId;
  j["subjectIdentity"] = c.subjectIdentity;
  j["datasetId"] = c.datasetId;
  j["filedAtMs"] = c.filedAtMs;
  j["outcome"] = std::string(complaint_outcome_name(c.outcome));
  j["offenders"] = nlohmann::ordered_json::array();
  for (const auto& a : c.offenders) j["offenders"].push_back(a.str());
  return j;
}

}  // namespace luce::protocol
