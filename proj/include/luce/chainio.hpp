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

#include <istream>
#include <ostream>
#include <string>

#include <json.hpp>

#include "luce/ledger.hpp"

namespace luce {

/// Chain export: JSON Lines, one block per line, stable key order.
inline void write_chain_jsonl(const Chain& chain, std::ostream& out) {
  for (const Block& b : chain.blocks) {
    nlohmann::ordered_json jb;
    jb["index"] = b.index;
    jb["prevHash"] = to_hex(b.prevHash);
    jb["minedAtMs"] = b.minedAtMs;
    jb["blockHash"] = to_hex(b.blockHash);
    nlohmann::ordered_json txs = nlohmann::ordered_json::array();
    for (const Transaction& tx : b.txs) {
      nlohmann::ordered_json jt;
      jt["txId"] = to_hex(tx.txId);
      jt["sender"] = tx.sender.str();
      jt["target"] = tx.target.str();
      jt["action"] = tx.action;
      jt["payload"] = tx.payload;
      jt["nonce"] = tx.nonce;
      jt["submittedAtMs"] = tx.submittedAtMs;
      jt["gasUsed"] = tx.gasUsed;
      jt["status"] = std::string(tx_status_name(tx.status));
      txs.push_back(std::move(jt));
    }
    jb["txs"] = std::move(txs);
    out << jb.dump() << '\n';
  }
}

inline std::string chain_to_jsonl(const Chain& chain) {
  std::ostringstream os;
  write_chain_jsonl(chain, os);
  return os.str();
}

/// Parses a JSONL chain export. Structural errors fail here; hash and link
/// integrity is the business of verify_chain().
inline Result<Chain> read_chain_jsonl(std::istream& in) {
  Chain chain;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json jb = nlohmann::json::parse(line, nullptr, false);
    if (jb.is_discarded() || !jb.is_object())
      return {Err::MalformedAction, "bad JSON on line " + std::to_string(lineno)};
    Block b;
    try {
      b.index = jb.at("index").get<std::uint64_t>();
      b.minedAtMs = jb.at("minedAtMs").get<SimMillis>();
      auto prev = digest_from_hex(jb.at("prevHash").get<std::string>());
      auto hash = digest_from_hex(jb.at("blockHash").get<std::string>());
      if (!prev || !hash) return {Err::MalformedAction, "bad digest on line " + std::to_string(lineno)};
      b.prevHash = *prev;
      b.blockHash = *hash;
      for (const auto& jt : jb.at("txs")) {
        Transaction tx;
        auto id = digest_from_hex(jt.at("txId").get<std::string>());
        auto sender = Address::parse(jt.at("sender").get<std::string>());
        auto target = Address::parse(jt.at("target").get<std::string>());
        auto status = tx_status_from(jt.at("status").get<std::string>());
        if (!id || !sender || !target || !status)
          return {Err::MalformedAction, "bad transaction on line " + std::to_string(lineno)};
        tx.txId = *id;
        tx.sender = *sender;
        tx.target = *target;
        tx.action = jt.at("action").get<std::string>();
        tx.payload = jt.at("payload").get<std::string>();
        tx.nonce = jt.at("nonce").get<std::uint64_t>();
        tx.submittedAtMs = jt.at("submittedAtMs").get<SimMillis>();
        tx.gasUsed = jt.at("gasUsed").get<std::uint64_t>();
        tx.status = *status;
        b.txs.push_back(std::move(tx));
      }
    } catch (const nlohmann::json::exception& e) {
      return {Err::MalformedAction, "line " + std::to_string(lineno) + ": " + e.what()};
    }
    chain.blocks.push_back(std::move(b));
  }
  if (chain.blocks.empty()) return {Err::MalformedAction, "empty chain file"};
  return chain;
}

}  // namespace luce
