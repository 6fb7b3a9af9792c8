#include <doctest.h>

#include "luce/protocol.hpp"

using namespace luce;
using namespace luce::protocol;

namespace {

struct Story {
  Platform p{21};
  ProviderAgent provider;
  RequesterAgent r1, r2, r3;
  Address subjectAddr{}, authority{};

  Story() {
    provider.address = p.new_account();
    r1.address = p.new_account();
    r2.address = p.new_account();
    r3.address = p.new_account();
    subjectAddr = p.new_account();
    authority = p.new_account();
    REQUIRE(p.exec_register(provider.address, Role::DataProvider, "prov").ok());
    REQUIRE(p.exec_register(r1.address, Role::DataRequester, "req-1").ok());
    REQUIRE(p.exec_register(r2.address, Role::DataRequester, "req-2").ok());
    REQUIRE(p.exec_register(r3.address, Role::DataRequester, "req-3").ok());
    REQUIRE(p.exec_register(subjectAddr, Role::DataSubject, "subject-1").ok());
    REQUIRE(p.exec_register(authority, Role::SupervisoryAuthority, "nsa").ok());
  }

  static RecordSet records() {
    RecordSet rs;
    rs.records["a-1"] = {{"age", "30"}, {"city", "Aachen"}};
    rs.records["a-2"] = {{"age", "41"}, {"city", "Liege"}};
    rs.records["a-3"] = {{"age", "57"}, {"city", "Hasselt"}};
    return rs;
  }

  static Descriptor descriptor(const std::string& id = "ds-1") {
    Descriptor d;
    d.datasetId = id;
    d.title = "Oncology cohort";
    d.description = "De-identified oncology records";
    d.keywords = {"oncology", "cohort"};
    return d;
  }

  static License license() {
    License lic;
    lic.licenseType = "CC-BY-NC";
    lic.termsText = "research reuse";
    lic.permittedPurposes = {"research"};
    return lic;
  }

  ShareOutcome share(const std::string& id = "ds-1") {
    provider.subjects.byDataset[id] = {{"subject-1", "a-1"}, {"subject-2", "a-2"},
                                       {"subject-3", "a-3"}};
    auto out = share_dataset(p, provider, records(), descriptor(id), license());
    REQUIRE(out.ok());
    return out.value();
  }
};

}  // namespace

TEST_CASE("share_dataset: catalog entry, provenance hash, reference gas total") {
  Story s;
  ShareOutcome out = s.share();
  auto entry = s.p.catalog().find("ds-1");
  REQUIRE(entry.has_value());
  CHECK(entry->contractAddress == out.contract);
  CHECK(s.p.contract_at(out.contract)->dataset_hash() == hash_records(Story::records()));
  CHECK(out.hash == hash_records(Story::records()));
  CHECK(out.gasUsed == 1443451);  // deploy + publishData + setLicense

  // ledger re-summation over exactly those three actions agrees
  std::uint64_t fromChain = 0;
  for (const auto& b : s.p.ledger().chain().blocks)
    for (const auto& tx : b.txs)
      if (tx.action == "deploy" || tx.action == "publishData" || tx.action == "setLicense")
        fromChain += tx.gasUsed;
  CHECK(fromChain == 1443451);
}

TEST_CASE("share_dataset failures leave no catalog entry") {
  Story s;
  License noPurposes;
  noPurposes.licenseType = "X";
  auto out = share_dataset(s.p, s.provider, Story::records(), Story::descriptor(), noPurposes);
  REQUIRE_FALSE(out.ok());
  CHECK(out.error() == Err::EmptyPurposes);
  CHECK_FALSE(s.p.catalog().find("ds-1").has_value());

  // wrong role: the deploy is rejected on-chain, still no catalog entry
  ProviderAgent fake;
  fake.address = s.r1.address;
  auto wrong = share_dataset(s.p, fake, Story::records(), Story::descriptor(), Story::license());
  REQUIRE_FALSE(wrong.ok());
  CHECK(wrong.error() == Err::WrongRole);
  CHECK_FALSE(s.p.catalog().find("ds-1").has_value());
  CHECK(s.p.catalog().size() == 0);
}

TEST_CASE("acquire: token plus records; purpose gate fires before any token") {
  Story s;
  s.share();
  auto got = acquire(s.p, s.r1, "ds-1");
  REQUIRE(got.ok());
  CHECK(got.value().token.tokenId == 1);
  CHECK(got.value().records.records == Story::records().records);

  RequesterAgent marketing;
  marketing.address = s.r2.address;
  marketing.purpose = "marketing";
  auto denied = acquire(s.p, marketing, "ds-1");
  REQUIRE_FALSE(denied.ok());
  CHECK(denied.error() == Err::PurposeIncompatible);
  CHECK_FALSE(s.p.contract_at(got.value().contract)->token_of(s.r2.address).has_value());

  auto second = acquire(s.p, s.r2, "ds-1");
  REQUIRE(second.ok());
  CHECK(second.value().token.tokenId == 2);

  auto missing = acquire(s.p, s.r3, "ds-404");
  REQUIRE_FALSE(missing.ok());
  CHECK(missing.error() == Err::UnknownDataset);
}

TEST_CASE("maintain: three compliant periods give three renewals") {
  Story s;
  ShareOutcome out = s.share();
  REQUIRE(acquire(s.p, s.r1, "ds-1").ok());
  auto log = maintain(s.p, s.r1, out.contract, 3 * kDefaultTokenPeriod);
  REQUIRE(log.size() == 3);
  for (const auto& rec : log) CHECK(rec.outcome == "renewed");

  EventFilter renewals;
  renewals.kind = EventKind::TokenRenewed;
  CHECK(s.p.events(s.r1.address, out.contract, renewals).value().size() == 3);
}

TEST_CASE("maintain: update-ignoring requester is revoked at its next renewal") {
  Story s;
  ShareOutcome out = s.share();
  REQUIRE(acquire(s.p, s.r1, "ds-1").ok());
  s.r1.behavior.ignoreUpdates = true;

  auto updated = apply_erase(Story::records(), "a-2").value();
  REQUIRE(s.p.datastore().replace(out.link, updated).ok());
  REQUIRE(s.p.exec_update_data(s.provider.address, out.contract, hash_records(updated),
                               UpdateKind::Erase, {"a-2"})
              .ok());

  auto log = maintain(s.p, s.r1, out.contract, 3 * kDefaultTokenPeriod);
  REQUIRE(log.size() == 1);
  CHECK(log[0].outcome == "revoked");
  CHECK(s.p.contract_at(out.contract)->token_of(s.r1.address)->state == TokenState::Revoked);
}

TEST_CASE("maintain: horizon before the first expiry yields an empty log") {
  Story s;
  ShareOutcome out = s.share();
  REQUIRE(acquire(s.p, s.r1, "ds-1").ok());
  auto log = maintain(s.p, s.r1, out.contract, sim_days(3));
  CHECK(log.empty());
}

TEST_CASE("subject_report: purposes and token states per dataset") {
  Story s;
  s.share();
  REQUIRE(acquire(s.p, s.r1, "ds-1").ok());
  REQUIRE(acquire(s.p, s.r2, "ds-1").ok());

  const ProviderAgent* providers[] = {&s.provider};
  auto report = subject_report(s.p, s.subjectAddr, "subject-1", providers);
  REQUIRE(report.ok());
  REQUIRE(report.value().entries.size() == 1);
  const auto& entry = report.value().entries[0];
  CHECK(entry.datasetId == "ds-1");
  REQUIRE(entry.requesters.size() == 2);
  for (const auto& r : entry.requesters) {
    CHECK(r.purpose == "research");
    CHECK(r.tokenState == TokenState::Active);
  }

  auto unknown = subject_report(s.p, s.subjectAddr, "subject-404", providers);
  REQUIRE_FALSE(unknown.ok());
  CHECK(unknown.error() == Err::UnknownSubject);
}

TEST_CASE("subject_report: revoked requesters are reported as revoked") {
  Story s;
  ShareOutcome out = s.share();
  REQUIRE(acquire(s.p, s.r1, "ds-1").ok());
  REQUIRE(s.p.exec_update_data(s.provider.address, out.contract, sha256("v2"), UpdateKind::Rectify,
                               {"a-1"})
              .ok());
  REQUIRE(s.p.exec_renew_token(s.r1.address, out.contract).ok());  // revoked

  const ProviderAgent* providers[] = {&s.provider};
  auto report = subject_report(s.p, s.subjectAddr, "subject-1", providers);
  REQUIRE(report.ok());
  CHECK(report.value().entries[0].requesters[0].tokenState == TokenState::Revoked);
}

TEST_CASE("request_erasure: compliant requesters all confirm within one period") {
  Story s;
  ShareOutcome out = s.share();
  for (auto* r : {&s.r1, &s.r2, &s.r3}) REQUIRE(acquire(s.p, *r, "ds-1").ok());

  SimulationLoop loop(s.p);
  for (auto* r : {&s.r1, &s.r2, &s.r3})
    start_maintenance(loop, *r, out.contract, 4 * kDefaultTokenPeriod);

  s.p.clock().advance(sim_days(3));
  auto outcome = request_erasure(s.p, loop, s.provider, "subject-2", "ds-1");
  REQUIRE(outcome.ok());
  CHECK(outcome.value().completedWithinPeriod);
  CHECK(outcome.value().newVersion == 2);
  REQUIRE(outcome.value().requesters.size() == 3);
  for (const auto& st : outcome.value().requesters) CHECK(st.status == "confirmed");
  CHECK(outcome.value().resolvedAtMs - outcome.value().requestedAtMs <= kDefaultTokenPeriod);

  // the erased record is gone from every token-reachable copy
  const DatasetContract* c = s.p.contract_at(out.contract);
  for (auto* r : {&s.r1, &s.r2, &s.r3}) {
    auto token = c->token_of(r->address);
    auto fetched = s.p.datastore().fetch(out.link, *token, *c, s.p.clock().now_ms());
    REQUIRE(fetched.ok());
    CHECK_FALSE(fetched.value().records.count("a-2"));
  }
  // provider-side provenance stays consistent
  CHECK(c->dataset_hash() == hash_records(*s.p.datastore().peek(out.link)));
}

TEST_CASE("request_erasure: ignoring requester revoked, others confirmed") {
  Story s;
  ShareOutcome out = s.share();
  s.r2.behavior.ignoreUpdates = true;
  for (auto* r : {&s.r1, &s.r2, &s.r3}) REQUIRE(acquire(s.p, *r, "ds-1").ok());

  SimulationLoop loop(s.p);
  for (auto* r : {&s.r1, &s.r2, &s.r3})
    start_maintenance(loop, *r, out.contract, 4 * kDefaultTokenPeriod);

  s.p.clock().advance(sim_days(5));
  auto outcome = request_erasure(s.p, loop, s.provider, "subject-3", "ds-1");
  REQUIRE(outcome.ok());
  CHECK(outcome.value().completedWithinPeriod);
  int confirmed = 0, revoked = 0;
  for (const auto& st : outcome.value().requesters) {
    if (st.status == "confirmed") ++confirmed;
    if (st.status == "revoked") {
      ++revoked;
      CHECK(st.requester == s.r2.address);
    }
  }
  CHECK(confirmed == 2);
  CHECK(revoked == 1);
}

TEST_CASE("request_erasure: unmapped subject, no update transaction") {
  Story s;
  s.share();
  SimulationLoop loop(s.p);
  std::size_t blocks = s.p.ledger().chain().blocks.size();
  auto outcome = request_erasure(s.p, loop, s.provider, "subject-404", "ds-1");
  REQUIRE_FALSE(outcome.ok());
  CHECK(outcome.error() == Err::UnknownSubject);
  CHECK(s.p.ledger().chain().blocks.size() == blocks);

  auto noDataset = request_erasure(s.p, loop, s.provider, "subject-1", "ds-404");
  CHECK(noDataset.error() == Err::UnknownDataset);
}

TEST_CASE("request_rectification: confirmed requesters fetch the updated value") {
  Story s;
  ShareOutcome out = s.share();
  REQUIRE(acquire(s.p, s.r1, "ds-1").ok());

  SimulationLoop loop(s.p);
  start_maintenance(loop, s.r1, out.contract, 4 * kDefaultTokenPeriod);

  auto outcome =
      request_rectification(s.p, loop, s.provider, "subject-1", "ds-1", {{"city", "Maastricht"}});
  REQUIRE(outcome.ok());
  CHECK(outcome.value().completedWithinPeriod);

  const DatasetContract* c = s.p.contract_at(out.contract);
  CHECK(c->dataset_hash() == outcome.value().newHash);
  auto token = c->token_of(s.r1.address);
  auto fetched = s.p.datastore().fetch(out.link, *token, *c, s.p.clock().now_ms());
  REQUIRE(fetched.ok());
  CHECK(fetched.value().records.at("a-1").at("city") == "Maastricht");

  // identical values surface SameHash without a version bump
  auto same =
      request_rectification(s.p, loop, s.provider, "subject-2", "ds-1", {{"age", "41"}});
  REQUIRE_FALSE(same.ok());
  CHECK(same.error() == Err::SameHash);
  CHECK(c->version() == 2);

  auto unknown =
      request_rectification(s.p, loop, s.provider, "subject-404", "ds-1", {{"age", "1"}});
  CHECK(unknown.error() == Err::UnknownSubject);
}

TEST_CASE("file_and_audit: propagated erase audits compliant") {
  Story s;
  ShareOutcome out = s.share();
  for (auto* r : {&s.r1, &s.r2}) REQUIRE(acquire(s.p, *r, "ds-1").ok());
  SimulationLoop loop(s.p);
  for (auto* r : {&s.r1, &s.r2}) start_maintenance(loop, *r, out.contract, 4 * kDefaultTokenPeriod);
  REQUIRE(request_erasure(s.p, loop, s.provider, "subject-1", "ds-1").ok());
  loop.run_until(s.p.clock().now_ms() + kDefaultTokenPeriod + sim_hours(2));

  auto complaint = file_and_audit(s.p, s.authority, "subject-1", "ds-1");
  REQUIRE(complaint.ok());
  CHECK(complaint.value().outcome == Complaint::Outcome::Compliant);
  CHECK(complaint.value().offenders.empty());

  auto notAuthority = file_and_audit(s.p, s.r1.address, "subject-1", "ds-1");
  REQUIRE_FALSE(notAuthority.ok());
  CHECK(notAuthority.error() == Err::NotAuthority);
}

TEST_CASE("file_and_audit: silent non-confirmer past the window is named") {
  Story s;
  ShareOutcome out = s.share();
  REQUIRE(acquire(s.p, s.r1, "ds-1").ok());  // holds a valid token, never renews or confirms
  SimulationLoop loop(s.p);
  s.p.clock().advance(sim_days(2));
  auto outcome = request_erasure(s.p, loop, s.provider, "subject-1", "ds-1");
  REQUIRE(outcome.ok());
  // nobody maintained: access lapses by expiry inside the window, but the
  // ledger shows neither a confirmation nor a revocation
  CHECK(outcome.value().completedWithinPeriod);
  REQUIRE(outcome.value().requesters.size() == 1);
  CHECK(outcome.value().requesters[0].status == "expired");

  s.p.clock().advance(sim_hours(1));
  auto complaint = file_and_audit(s.p, s.authority, "subject-1", "ds-1");
  REQUIRE(complaint.ok());
  CHECK(complaint.value().outcome == Complaint::Outcome::NonCompliant);
  REQUIRE(complaint.value().offenders.size() == 1);
  CHECK(complaint.value().offenders[0] == s.r1.address);
}

TEST_CASE("file_and_audit: no updates means trivially compliant") {
  Story s;
  s.share();
  REQUIRE(acquire(s.p, s.r1, "ds-1").ok());
  auto complaint = file_and_audit(s.p, s.authority, "subject-1", "ds-1");
  REQUIRE(complaint.ok());
  CHECK(complaint.value().outcome == Complaint::Outcome::Compliant);
}

TEST_CASE("subject report is reproducible from the event log alone") {
  Story s;
  ShareOutcome out = s.share();
  REQUIRE(acquire(s.p, s.r1, "ds-1").ok());
  REQUIRE(acquire(s.p, s.r2, "ds-1").ok());
  REQUIRE(s.p.exec_update_data(s.provider.address, out.contract, sha256("v2"), UpdateKind::Rectify,
                               {"a-1"})
              .ok());
  REQUIRE(s.p.exec_renew_token(s.r2.address, out.contract).ok());  // revoked

  const ProviderAgent* providers[] = {&s.provider};
  auto report = subject_report(s.p, s.subjectAddr, "subject-1", providers);
  REQUIRE(report.ok());

  // audit oracle: fold the contract event log into (purpose, state) facts
  auto events = s.p.events(s.authority, out.contract).value();
  std::map<Address, std::string> purposeFromEvents;
  std::map<Address, TokenState> stateFromEvents;
  std::map<Address, SimMillis> expiry;
  for (const auto& e : events) {
    switch (e.kind) {
      case EventKind::RequesterAdded:
        purposeFromEvents[e.actor] = e.payload.at("purpose");
        stateFromEvents[e.actor] = TokenState::Active;
        expiry[e.actor] = std::stoll(e.payload.at("expiresAtMs"));
        break;
      case EventKind::TokenRenewed: expiry[e.actor] = std::stoll(e.payload.at("expiresAtMs")); break;
      case EventKind::TokenRevoked: stateFromEvents[e.actor] = TokenState::Revoked; break;
      case EventKind::Unsubscribed: stateFromEvents[e.actor] = TokenState::Deleted; break;
      default: break;
    }
  }
  for (auto& [addr, st] : stateFromEvents)
    if (st == TokenState::Active && s.p.clock().now_ms() > expiry[addr]) st = TokenState::Expired;

  const auto& entry = report.value().entries.at(0);
  REQUIRE(entry.requesters.size() == stateFromEvents.size());
  for (const auto& r : entry.requesters) {
    CHECK(r.purpose == purposeFromEvents.at(r.address));
    CHECK(r.tokenState == stateFromEvents.at(r.address));
  }
}

TEST_CASE("json exports for reports and complaints") {
  Story s;
  s.share();
  REQUIRE(acquire(s.p, s.r1, "ds-1").ok());
  const ProviderAgent* providers[] = {&s.provider};
  auto report = subject_report(s.p, s.subjectAddr, "subject-1", providers);
  auto j = subject_report_to_json(report.value());
  CHECK(j["subjectIdentity"] == "subject-1");
  CHECK(j["entries"][0]["datasetId"] == "ds-1");
  CHECK(j["entries"][0]["requesters"][0]["tokenState"] == "active");

  auto complaint = file_and_audit(s.p, s.authority, "subject-1", "ds-1");
  auto cj = complaint_to_json(complaint.value());
  CHECK(cj["outcome"] == "compliant");
  CHECK(cj["datasetId"] == "ds-1");
}
