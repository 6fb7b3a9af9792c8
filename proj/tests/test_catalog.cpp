#include <doctest.h>

#include <random>

#include "luce/catalog.hpp"
#include "luce/platform.hpp"
#include "support/oracles.hpp"

using namespace luce;

namespace {

CatalogEntry entry(const std::string& id, const std::string& title, const std::string& desc,
                   std::vector<std::string> keywords) {
  CatalogEntry e;
  e.datasetId = id;
  e.title = title;
  e.description = desc;
  e.keywords = std::move(keywords);
  e.licenseType = "CC-BY-NC";
  e.contractAddress = Address::derive("contract-" + id);
  return e;
}

const Catalog::DeployedCheck kAlwaysDeployed = [](const Address&) { return true; };

}  // namespace

TEST_CASE("publish_entry: fresh ids only, contract must exist") {
  Catalog cat;
  REQUIRE(cat.publish_entry(entry("ds-1", "Heart study", "ecg traces", {"cardio"}),
                            kAlwaysDeployed)
              .ok());
  CHECK(cat.search("heart").size() == 1);

  auto dup = cat.publish_entry(entry("ds-1", "Other", "x", {}), kAlwaysDeployed);
  REQUIRE_FALSE(dup.ok());
  CHECK(dup.error() == Err::DuplicateId);

  auto orphan = cat.publish_entry(entry("ds-2", "Orphan", "x", {}),
                                  [](const Address&) { return false; });
  REQUIRE_FALSE(orphan.ok());
  CHECK(orphan.error() == Err::UnknownContract);
}

TEST_CASE("search: conjunctive, case-insensitive, ordered by dataset id") {
  Catalog cat;
  REQUIRE(cat.publish_entry(entry("ds-b", "Oncology cohort", "tumor genomics panel", {"dna"}),
                            kAlwaysDeployed)
              .ok());
  REQUIRE(cat.publish_entry(entry("ds-a", "Oncology imaging", "CT scans", {"imaging"}),
                            kAlwaysDeployed)
              .ok());
  REQUIRE(cat.publish_entry(entry("ds-c", "Cardiology genomics", "SNP panel", {"dna"}),
                            kAlwaysDeployed)
              .ok());

  auto both = cat.search("oncology genomics");
  REQUIRE(both.size() == 1);
  CHECK(both[0].datasetId == "ds-b");

  auto upper = cat.search("ONCOLOGY");
  REQUIRE(upper.size() == 2);
  CHECK(upper[0].datasetId == "ds-a");  // ascending id order
  CHECK(upper[1].datasetId == "ds-b");

  CHECK(cat.search("").size() == 3);          // empty query returns everything
  CHECK(cat.search("positron").empty());      // no match -> empty list
  CHECK(cat.search("dna imaging").empty());   // conjunction across fields of one entry
}

TEST_CASE("search matches a naive scan oracle on random corpora") {
  static const char* kWords[] = {"onco", "gene", "scan", "heart", "lung",
                                 "cohort", "panel", "trial", "mri", "blood"};
  std::mt19937_64 rng(77);
  for (int round = 0; round < 100; ++round) {
    Catalog cat;
    std::vector<oracles::NaiveEntry> corpus;
    int n = 1 + static_cast<int>(rng() % 8);
    for (int i = 0; i < n; ++i) {
      auto word = [&] { return std::string(kWords[rng() % 10]); };
      std::string id = "ds-" + std::to_string(i);
      std::string title = word() + " " + word();
      std::string desc = word() + " records " + word();
      std::vector<std::string> keys{word()};
      REQUIRE(cat.publish_entry(entry(id, title, desc, keys), kAlwaysDeployed).ok());
      corpus.push_back({id, title, desc, keys});
    }
    std::string query;
    int terms = static_cast<int>(rng() % 3);
    for (int t = 0; t < terms; ++t) query += std::string(kWords[rng() % 10]) + " ";

    std::vector<std::string> got;
    for (const auto& e : cat.search(query)) got.push_back(e.datasetId);
    CHECK(got == oracles::naive_search(corpus, query));
  }
}

TEST_CASE("catalog json persistence is stable") {
  Catalog cat;
  REQUIRE(cat.publish_entry(entry("ds-1", "Title", "Desc", {"k1", "k2"}), kAlwaysDeployed).ok());
  REQUIRE(cat.publish_entry(entry("ds-2", "Other", "Text", {}), kAlwaysDeployed).ok());
  std::string text = cat.to_json();
  auto loaded = Catalog::from_json(text);
  REQUIRE(loaded.ok());
  CHECK(loaded.value().size() == 2);
  CHECK(loaded.value().to_json() == text);
  CHECK(loaded.value().find("ds-1")->contractAddress == Address::derive("contract-ds-1"));

  CHECK_FALSE(Catalog::from_json("{}").ok());
  CHECK_FALSE(Catalog::from_json("[{\"datasetId\": 3}]").ok());
}

TEST_CASE("sync: cache mirrors contract state rebuilt from events") {
  Platform p(11);
  Address provider = p.new_account();
  Address requester = p.new_account();
  Address requester2 = p.new_account();
  REQUIRE(p.exec_register(provider, Role::DataProvider, "prov").ok());
  REQUIRE(p.exec_register(requester, Role::DataRequester, "req1").ok());
  REQUIRE(p.exec_register(requester2, Role::DataRequester, "req2").ok());

  // empty chain (no contracts yet) -> empty cache
  CacheState cache0 = sync_cache(p);
  CHECK(cache0.contracts.empty());
  CHECK(cache0.lastSyncedBlock == p.ledger().chain().blocks.size() - 1);

  Address c = p.exec_deploy(provider).value();
  REQUIRE(p.exec_publish_data(provider, c, "d", "luce-store://c/1", sha256("v1")).ok());
  License lic;
  lic.licenseType = "CC";
  lic.permittedPurposes = {"research"};
  REQUIRE(p.exec_set_license(provider, c, lic).ok());
  REQUIRE(p.exec_add_data_requester(requester, c, "research", true).ok());
  REQUIRE(p.exec_add_data_requester(requester2, c, "research", true).ok());
  REQUIRE(p.exec_update_data(provider, c, sha256("v2"), UpdateKind::Rectify, {"a-1"}).ok());
  REQUIRE(p.exec_confirm_update(requester, c, 2).ok());
  REQUIRE(p.exec_renew_token(requester, c).ok());   // stays active
  REQUIRE(p.exec_renew_token(requester2, c).ok());  // revoked, unconfirmed

  CacheState cache = sync_cache(p);
  const auto& snap = cache.contracts.at(c);
  CHECK(snap.version == 2);
  CHECK(snap.requesterCount == p.contract_at(c)->requesters().size());
  CHECK(snap.tokenStates.at(requester) == TokenState::Active);
  CHECK(snap.tokenStates.at(requester2) == TokenState::Revoked);
  CHECK(snap == snapshot_from_state(*p.contract_at(c), p.clock().now_ms()));

  // expiry shows up through the cache as well
  p.clock().advance(kDefaultTokenPeriod + sim_hours(2));
  CacheState late = sync_cache(p);
  CHECK(late.contracts.at(c).tokenStates.at(requester) == TokenState::Expired);
  CHECK(late.contracts.at(c) == snapshot_from_state(*p.contract_at(c), p.clock().now_ms()));

  // no new blocks -> identical cache
  CacheState again = sync_cache(p);
  CHECK(again.lastSyncedBlock == late.lastSyncedBlock);
  CHECK(again.contracts.at(c) == late.contracts.at(c));
}
