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

#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "luce/address.hpp"
#include "luce/canonical.hpp"
#include "luce/clock.hpp"
#include "luce/errors.hpp"
#include "luce/sha256.hpp"

namespace luce {

enum class TxStatus { Pending, Mined, Rejected };

inline std::string_view tx_status_name(TxStatus s) {
  switch (s) {
    case TxStatus::Pending: return "pending";
    case TxStatus::Mined: return "mined";
    case TxStatus::Rejected: return "rejected";
  }
  return "?";
}

inline std::optional<TxStatus> tx_status_from(std::string_view s) {
  if (s == "pending") return TxStatus::Pending;
  if (s == "mined") return TxStatus::Mined;
  if (s == "rejected") return TxStatus::Rejected;
  return std::nullopt;
}

struct Transaction {
  Digest txId{};
  Address sender{};
  Address target{};
  std::string action;   // action name, e.g. "publishData"
  std::string payload;  // canonically encoded parameters
  std::uint64_t nonce = 0;
  SimMillis submittedAtMs = 0;
  std::uint64_t gasUsed = 0;  // filled in when mined
  TxStatus status = TxStatus::Pending;

  static Digest compute_id(const Address& sender, const Address& target, std::string_view action,
                           std::string_view payload, std::uint64_t nonce) {
    return hash_fields({{"action", std::string(action)},
                        {"nonce", std::to_string(nonce)},
                        {"payload", std::string(payload)},
                        {"sender", sender.str()},
                        {"target", target.str()}});
  }

  /// Digest over every field; block hashes commit to these records so that
  /// mutating any mined transaction breaks verification.
  Digest record_digest() const {
    return hash_fields({{"action", action},
                        {"gasUsed", std::to_string(gasUsed)},
                        {"nonce", std::to_string(nonce)},
                        {"payload", payload},
                        {"sender", sender.str()},
                        {"status", std::string(tx_status_name(status))},
                        {"submittedAtMs", std::to_string(submittedAtMs)},
                        {"target", target.str()},
                        {"txId", to_hex(txId)}});
  }
};

struct Block {
  std::uint64_t index = 0;
  Digest prevHash{};
  SimMillis minedAtMs = 0;
  std::vector<Transaction> txs;
  Digest blockHash{};

  Digest compute_hash() const {
    std::string records;
    records.reserve(64 * txs.size());
    for (const auto& tx : txs) records += to_hex(tx.record_digest());
    return hash_fields({{"index", std::to_string(index)},
                        {"minedAtMs", std::to_string(minedAtMs)},
                        {"prevHash", to_hex(prevHash)},
                        {"txRecords", records}});
  }
};

/// Append-only block list. Plain value type; the ledger only ever hands out
/// const references to its own chain.
struct Chain {
  std::vector<Block> blocks;

  static Chain with_genesis() {
    Chain c;
    Block genesis;
    genesis.index = 0;
    genesis.prevHash = kZeroDigest;
    genesis.minedAtMs = 0;
    genesis.blockHash = genesis.compute_hash();
    c.blocks.push_back(std::move(genesis));
    return c;
  }
};

/// True iff every transaction id recomputes, every block hash recomputes,
/// every prev-hash link holds and block times strictly increase.
inline bool verify_chain(const Chain& chain) {
  if (chain.blocks.empty()) return false;
  for (std::size_t i = 0; i < chain.blocks.size(); ++i) {
    const Block& b = chain.blocks[i];
    if (b.index != i) return false;
    if (i == 0) {
      if (b.prevHash != kZeroDigest) return false;
    } else {
      if (b.prevHash != chain.blocks[i - 1].blockHash) return false;
      if (b.minedAtMs <= chain.blocks[i - 1].minedAtMs) return false;
    }
    for (const Transaction& tx : b.txs) {
      if (tx.status != TxStatus::Mined) return false;
      if (tx.txId != Transaction::compute_id(tx.sender, tx.target, tx.action, tx.payload, tx.nonce))
        return false;
    }
    if (b.blockHash != b.compute_hash()) return false;
  }
  return true;
}

struct MiningConfig {
  unsigned threads = 1;
  double latencyLowS = 10.0;
  double latencyHighS = 20.0;
  unsigned contentionCap = 16;
  double contentionPenalty = 0.05;  // per thread beyond the cap
  std::uint64_t seed = 0;
  std::size_t blockCapacity = 200;

  VoidResult validate() const;
};

/// Effective mining speedup: linear up to the contention cap, then a linear
/// penalty beyond it (thrashing regime).
inline double mining_speedup(unsigned threads, const MiningConfig& cfg) {
  double base = static_cast<double>(std::min(threads, cfg.contentionCap));
  double over = static_cast<double>(threads > cfg.contentionCap ? threads - cfg.contentionCap : 0);
  return base - cfg.contentionPenalty * over * base;
}

inline VoidResult MiningConfig::validate() const {
  if (threads < 1) return {Err::InvalidConfig, "threads must be >= 1"};
  if (latencyLowS < 0 || latencyHighS < latencyLowS)
    return {Err::InvalidConfig, "latency range must satisfy 0 <= low <= high"};
  if (contentionCap < 1) return {Err::InvalidConfig, "contentionCap must be >= 1"};
  if (contentionPenalty < 0) return {Err::InvalidConfig, "contentionPenalty must be >= 0"};
  if (blockCapacity < 1) return {Err::InvalidConfig, "blockCapacity must be >= 1"};
  if (mining_speedup(threads, *this) <= 0)
    return {Err::InvalidConfig, "contention penalty drives speedup to zero"};
  return ok_void();
}

/// Result of executing one transaction against the contract world.
struct ExecOutcome {
  Err code = Err::None;
  std::string detail;
  std::uint64_t gasUsed = 0;
  FieldMap output;

  bool ok() const { return code == Err::None; }

  static ExecOutcome success(std::uint64_t gas, FieldMap out = {}) {
    ExecOutcome o;
    o.gasUsed = gas;
    o.output = std::move(out);
    return o;
  }
  static ExecOutcome failure(Err code, std::string detail = "") {
    ExecOutcome o;
    o.code = code;
    o.detail = std::move(detail);
    return o;
  }
};

using Executor = std::function<ExecOutcome(const Transaction&, SimMillis minedAtMs)>;

struct Receipt {
  TxStatus status = TxStatus::Pending;
  std::optional<std::uint64_t> blockIndex;  // present iff mined
  std::uint64_t gasUsed = 0;
};

/// Single-mempool simulated blockchain. Transactions are ordered FIFO,
/// mined in capacity-bounded blocks under a seeded latency model, and
/// executed through a pluggable executor whose verdict decides whether a
/// transaction lands in the block (Mined) or is dropped (Rejected).
class Ledger {
 public:
  explicit Ledger(SimClock& clock) : clock_(&clock), chain_(Chain::with_genesis()) {
    executor_ = [](const Transaction&, SimMillis) { return ExecOutcome::success(21000); };
  }

  void set_executor(Executor exec) { executor_ = std::move(exec); }

  void add_account(const Address& a) { accounts_.insert(a); }
  bool has_account(const Address& a) const { return accounts_.count(a) != 0; }

  /// Nonce the next submission from this sender will carry.
  std::uint64_t next_nonce(const Address& a) const {
    auto it = nonces_.find(a);
    return it == nonces_.end() ? 0 : it->second;
  }

  Result<Digest> submit(const Address& sender, const Address& target, std::string action,
                        std::string payload) {
    if (!has_account(sender)) return {Err::UnknownSender, sender.str()};
    if (action.empty()) return {Err::MalformedAction, "empty action name"};
    Transaction tx;
    tx.sender = sender;
    tx.target = target;
    tx.action = std::move(action);
    tx.payload = std::move(payload);
    tx.nonce = nonces_[sender]++;
    tx.submittedAtMs = clock_->now_ms();
    tx.txId = Transaction::compute_id(tx.sender, tx.target, tx.action, tx.payload, tx.nonce);
    Digest id = tx.txId;
    records_.emplace(id, TxRecord{tx, std::nullopt, {}});
    mempool_.push_back(std::move(tx));
    return id;
  }

  /// Drains up to blockCapacity pending transactions into one block and
  /// advances the simulated clock by the drawn mining latency (>= 1 ms so
  /// block times stay strictly increasing even at zero configured latency).
  Result<std::uint64_t> mine_next(const MiningConfig& cfg) {
    if (auto v = cfg.validate(); !v.ok()) return {v.error(), v.detail()};
    if (mempool_.empty()) return {Err::EmptyMempool};
    ensure_stream(cfg.seed);

    double unit = static_cast<double>(rng_() >> 11) * (1.0 / 9007199254740992.0);
    double latencyS = cfg.latencyLowS + (cfg.latencyHighS - cfg.latencyLowS) * unit;
    latencyS /= mining_speedup(cfg.threads, cfg);
    SimMillis latencyMs = std::max<SimMillis>(1, std::llround(latencyS * 1000.0));
    clock_->advance(latencyMs);
    SimMillis minedAt = clock_->now_ms();

    Block block;
    block.index = chain_.blocks.size();
    block.prevHash = chain_.blocks.back().blockHash;
    block.minedAtMs = minedAt;

    std::size_t count = std::min(cfg.blockCapacity, mempool_.size());
    for (std::size_t i = 0; i < count; ++i) {
      Transaction tx = std::move(mempool_.front());
      mempool_.pop_front();
      ExecOutcome outcome = executor_(tx, minedAt);
      auto& rec = records_.at(tx.txId);
      rec.outcome = outcome;
      if (outcome.ok()) {
        tx.status = TxStatus::Mined;
        tx.gasUsed = outcome.gasUsed;
        rec.blockIndex = block.index;
        rec.tx = tx;
        totalGasMined_ += tx.gasUsed;
        block.txs.push_back(std::move(tx));
      } else {
        tx.status = TxStatus::Rejected;
        rec.tx = tx;
      }
    }
    block.blockHash = block.compute_hash();
    chain_.blocks.push_back(std::move(block));
    return chain_.blocks.back().index;
  }

  bool verify() const { return verify_chain(chain_); }

  Result<Receipt> receipt_of(const Digest& txId) const {
    auto it = records_.find(txId);
    if (it == records_.end()) return {Err::UnknownTx, to_hex(txId)};
    Receipt r;
    r.status = it->second.tx.status;
    r.blockIndex = it->second.blockIndex;
    r.gasUsed = it->second.tx.gasUsed;
    return r;
  }

  /// Execution outcome of a drained transaction; nullptr while pending or unknown.
  const ExecOutcome* outcome_of(const Digest& txId) const {
    auto it = records_.find(txId);
    if (it == records_.end() || it->second.tx.status == TxStatus::Pending) return nullptr;
    return &it->second.outcome;
  }

  const Chain& chain() const { return chain_; }
  std::size_t mempool_size() const { return mempool_.size(); }
  const std::deque<Transaction>& mempool() const { return mempool_; }
  std::uint64_t total_gas_mined() const { return totalGasMined_; }

 private:
  struct TxRecord {
    Transaction tx;
    std::optional<std::uint64_t> blockIndex;
    ExecOutcome outcome;
  };

  // One latency stream per seed; switching seeds restarts the stream, which
  // lets a harness align draws across runs it wants to compare.
  void ensure_stream(std::uint64_t seed) {
    if (!streamSeed_ || *streamSeed_ != seed) {
      rng_.seed(seed);
      streamSeed_ = seed;
    }
  }

  SimClock* clock_;
  Executor executor_;
  std::deque<Transaction> mempool_;
  Chain chain_;
  std::map<Digest, TxRecord> records_;
  std::map<Address, std::uint64_t> nonces_;
  std::set<Address> accounts_;
  std::mt19937_64 rng_;
  std::optional<std::uint64_t> streamSeed_;
  std::uint64_t totalGasMined_ = 0;
};

}  // namespace luce
