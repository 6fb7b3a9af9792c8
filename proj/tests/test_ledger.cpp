#include <doctest.h>

#include <sstream>

#include "luce/chainio.hpp"
#include "luce/ledger.hpp"

using namespace luce;

namespace {

Address acct(Ledger& ledger, int i) {
  Address a = Address::derive("ledger-test-" + std::to_string(i));
  ledger.add_account(a);
  return a;
}

}  // namespace

TEST_CASE("submit: well-formed transactions pend in order") {
  SimClock clock;
  Ledger ledger(clock);
  Address a = acct(ledger, 1);
  auto tx = ledger.submit(a, kZeroAddress, "deploy", "tokenPeriodMs=1000");
  REQUIRE(tx.ok());
  auto receipt = ledger.receipt_of(tx.value());
  REQUIRE(receipt.ok());
  CHECK(receipt.value().status == TxStatus::Pending);
  CHECK_FALSE(receipt.value().blockIndex.has_value());
  CHECK(receipt.value().gasUsed == 0);
  CHECK(clock.now_ms() == 0);  // submission leaves the clock alone
}

TEST_CASE("submit: unknown sender is refused") {
  SimClock clock;
  Ledger ledger(clock);
  Address stranger = Address::derive("never-created");
  auto tx = ledger.submit(stranger, kZeroAddress, "deploy", "");
  REQUIRE_FALSE(tx.ok());
  CHECK(tx.error() == Err::UnknownSender);
}

TEST_CASE("submit: 5000 submissions keep mempool order") {
  SimClock clock;
  Ledger ledger(clock);
  Address a = acct(ledger, 2);
  std::vector<Digest> ids;
  for (int i = 0; i < 5000; ++i) {
    auto tx = ledger.submit(a, kZeroAddress, "baselineSet", "value=" + std::to_string(i));
    REQUIRE(tx.ok());
    ids.push_back(tx.value());
  }
  REQUIRE(ledger.mempool_size() == 5000);
  std::size_t i = 0;
  for (const auto& tx : ledger.mempool()) CHECK(tx.txId == ids[i++]);
}

TEST_CASE("mine_next: empty mempool is an error") {
  SimClock clock;
  Ledger ledger(clock);
  MiningConfig cfg;
  auto r = ledger.mine_next(cfg);
  REQUIRE_FALSE(r.ok());
  CHECK(r.error() == Err::EmptyMempool);
}

TEST_CASE("mine_next: single-thread latency lies within the configured range") {
  SimClock clock;
  Ledger ledger(clock);
  Address a = acct(ledger, 3);
  MiningConfig cfg;
  cfg.seed = 42;
  for (int i = 0; i < 20; ++i) {
    REQUIRE(ledger.submit(a, kZeroAddress, "baselineSet", "i=" + std::to_string(i)).ok());
    SimMillis before = clock.now_ms();
    REQUIRE(ledger.mine_next(cfg).ok());
    SimMillis latency = clock.now_ms() - before;
    CHECK(latency >= 10000);
    CHECK(latency <= 20000);
  }
}

TEST_CASE("mine_next: sixteen threads beat one on every block") {
  auto run = [](unsigned threads) {
    SimClock clock;
    Ledger ledger(clock);
    Address a = Address::derive("speedup");
    ledger.add_account(a);
    MiningConfig cfg;
    cfg.seed = 7;
    cfg.threads = threads;
    std::vector<SimMillis> latencies;
    for (int i = 0; i < 10; ++i) {
      REQUIRE(ledger.submit(a, kZeroAddress, "baselineSet", std::to_string(i)).ok());
      SimMillis before = clock.now_ms();
      REQUIRE(ledger.mine_next(cfg).ok());
      latencies.push_back(clock.now_ms() - before);
    }
    return latencies;
  };
  auto lat1 = run(1);
  auto lat16 = run(16);
  for (std::size_t i = 0; i < lat1.size(); ++i) CHECK(lat16[i] < lat1[i]);
}

TEST_CASE("mining speedup model") {
  MiningConfig cfg;
  CHECK(mining_speedup(1, cfg) == doctest::Approx(1.0));
  CHECK(mining_speedup(8, cfg) == doctest::Approx(8.0));
  CHECK(mining_speedup(16, cfg) == doctest::Approx(16.0));
  CHECK(mining_speedup(32, cfg) == doctest::Approx(3.2));
  cfg.threads = 400;  // penalty would drive speedup negative
  CHECK_FALSE(cfg.validate().ok());
}

TEST_CASE("mine_next: capacity bounds the block and order is preserved") {
  SimClock clock;
  Ledger ledger(clock);
  Address a = acct(ledger, 4);
  for (int i = 0; i < 450; ++i)
    REQUIRE(ledger.submit(a, kZeroAddress, "baselineSet", std::to_string(i)).ok());
  MiningConfig cfg;
  cfg.seed = 1;
  REQUIRE(ledger.mine_next(cfg).ok());
  CHECK(ledger.chain().blocks.back().txs.size() == 200);
  CHECK(ledger.mempool_size() == 250);
  REQUIRE(ledger.mine_next(cfg).ok());
  REQUIRE(ledger.mine_next(cfg).ok());
  CHECK(ledger.mempool_size() == 0);
  CHECK(ledger.chain().blocks.back().txs.size() == 50);
  // submission order preserved across blocks
  std::uint64_t expected = 0;
  for (std::size_t b = 1; b < ledger.chain().blocks.size(); ++b)
    for (const auto& tx : ledger.chain().blocks[b].txs) CHECK(tx.nonce == expected++);
}

TEST_CASE("rejected transactions stay out of the block") {
  SimClock clock;
  Ledger ledger(clock);
  ledger.set_executor([](const Transaction& tx, SimMillis) {
    if (tx.payload == "bad") return ExecOutcome::failure(Err::NotOwner);
    return ExecOutcome::success(30000);
  });
  Address a = acct(ledger, 5);
  auto good = ledger.submit(a, kZeroAddress, "x", "good");
  auto bad = ledger.submit(a, kZeroAddress, "x", "bad");
  MiningConfig cfg;
  REQUIRE(ledger.mine_next(cfg).ok());
  CHECK(ledger.chain().blocks.back().txs.size() == 1);
  CHECK(ledger.receipt_of(good.value()).value().status == TxStatus::Mined);
  CHECK(ledger.receipt_of(good.value()).value().gasUsed == 30000);
  auto rejected = ledger.receipt_of(bad.value()).value();
  CHECK(rejected.status == TxStatus::Rejected);
  CHECK_FALSE(rejected.blockIndex.has_value());
  CHECK(ledger.outcome_of(bad.value())->code == Err::NotOwner);
  CHECK(ledger.verify());
}

TEST_CASE("receipt_of: unknown digest") {
  SimClock clock;
  Ledger ledger(clock);
  auto r = ledger.receipt_of(sha256("no such tx"));
  REQUIRE_FALSE(r.ok());
  CHECK(r.error() == Err::UnknownTx);
}

TEST_CASE("verify_chain: genesis-only chain verifies") {
  SimClock clock;
  Ledger ledger(clock);
  CHECK(ledger.verify());
  CHECK(ledger.chain().blocks.size() == 1);
  CHECK(ledger.chain().blocks[0].prevHash == kZeroDigest);
}

TEST_CASE("verify_chain: any mutated field breaks verification") {
  SimClock clock;
  Ledger ledger(clock);
  Address a = acct(ledger, 6);
  MiningConfig cfg;
  cfg.seed = 3;
  for (int i = 0; i < 5; ++i) {
    REQUIRE(ledger.submit(a, kZeroAddress, "baselineSet", "payload-" + std::to_string(i)).ok());
    REQUIRE(ledger.mine_next(cfg).ok());
  }
  REQUIRE(ledger.verify());

  auto tampered = [&](auto mutate) {
    Chain copy = ledger.chain();
    mutate(copy);
    return verify_chain(copy);
  };
  CHECK_FALSE(tampered([](Chain& c) { c.blocks[2].txs[0].payload[0] ^= 0x01; }));
  CHECK_FALSE(tampered([](Chain& c) { c.blocks[2].txs[0].gasUsed += 1; }));
  CHECK_FALSE(tampered([](Chain& c) { c.blocks[2].txs[0].submittedAtMs += 1; }));
  CHECK_FALSE(tampered([](Chain& c) { c.blocks[2].txs[0].sender.bytes[0] ^= 0x80; }));
  CHECK_FALSE(tampered([](Chain& c) { c.blocks[2].txs[0].nonce += 1; }));
  CHECK_FALSE(tampered([](Chain& c) { c.blocks[3].prevHash[5] ^= 0x10; }));
  CHECK_FALSE(tampered([](Chain& c) { c.blocks[3].minedAtMs += 1; }));
  CHECK_FALSE(tampered([](Chain& c) { c.blocks[4].blockHash[0] ^= 0x01; }));
  CHECK_FALSE(tampered([](Chain& c) { c.blocks[1].txs[0].action = "renamed"; }));
}

TEST_CASE("append-only: earlier hash sequences are prefixes of later ones") {
  SimClock clock;
  Ledger ledger(clock);
  Address a = acct(ledger, 7);
  MiningConfig cfg;
  cfg.seed = 9;
  std::vector<Digest> seen;
  for (int i = 0; i < 8; ++i) {
    for (const auto& b : ledger.chain().blocks) {
      if (b.index < seen.size())
        CHECK(seen[b.index] == b.blockHash);  // prefix unchanged
      else
        seen.push_back(b.blockHash);
    }
    REQUIRE(ledger.submit(a, kZeroAddress, "baselineSet", std::to_string(i)).ok());
    REQUIRE(ledger.mine_next(cfg).ok());
  }
}

TEST_CASE("clock monotonicity and strictly increasing block times") {
  SimClock clock;
  Ledger ledger(clock);
  Address a = acct(ledger, 8);
  MiningConfig cfg;
  cfg.seed = 5;
  cfg.latencyLowS = 0;
  cfg.latencyHighS = 0;  // even at zero latency, block times must increase
  SimMillis last = ledger.chain().blocks.back().minedAtMs;
  for (int i = 0; i < 5; ++i) {
    REQUIRE(ledger.submit(a, kZeroAddress, "baselineSet", std::to_string(i)).ok());
    REQUIRE(ledger.mine_next(cfg).ok());
    SimMillis minedAt = ledger.chain().blocks.back().minedAtMs;
    CHECK(minedAt > last);
    last = minedAt;
  }
  CHECK(ledger.verify());
}

TEST_CASE("determinism: same seed and submissions give byte-identical chains") {
  auto build = [] {
    SimClock clock;
    Ledger ledger(clock);
    Address a = Address::derive("determinism");
    ledger.add_account(a);
    MiningConfig cfg;
    cfg.seed = 1234;
    for (int i = 0; i < 20; ++i) {
      REQUIRE(ledger.submit(a, kZeroAddress, "baselineSet", "v=" + std::to_string(i)).ok());
      if (i % 3 == 0) REQUIRE(ledger.mine_next(cfg).ok());
    }
    while (ledger.mempool_size() > 0) REQUIRE(ledger.mine_next(cfg).ok());
    return chain_to_jsonl(ledger.chain());
  };
  CHECK(build() == build());
}

TEST_CASE("chain jsonl round trip") {
  SimClock clock;
  Ledger ledger(clock);
  Address a = acct(ledger, 9);
  MiningConfig cfg;
  cfg.seed = 77;
  for (int i = 0; i < 4; ++i) {
    REQUIRE(ledger.submit(a, kZeroAddress, "baselineSet", "p" + std::to_string(i)).ok());
    REQUIRE(ledger.mine_next(cfg).ok());
  }
  std::string text = chain_to_jsonl(ledger.chain());
  std::istringstream in(text);
  auto parsed = read_chain_jsonl(in);
  REQUIRE(parsed.ok());
  CHECK(verify_chain(parsed.value()));
  CHECK(chain_to_jsonl(parsed.value()) == text);
}
