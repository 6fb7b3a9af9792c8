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
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "luce/luce.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitVerifyFailed = 2;

int cmd_run(const std::string& scenarioPath, std::optional<std::uint64_t> seed,
            const std::string& outPath, const std::string& chainOutPath,
            const std::string& catalogOutPath) {
  std::ifstream in(scenarioPath);
  if (!in) {
    std::cerr << "cannot open scenario file: " << scenarioPath << "\n";
    return kExitError;
  }
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) {
    std::cerr << "scenario file is not valid JSON\n";
    return kExitError;
  }
  auto cfg = luce::harness::parse_scenario(j);
  if (!cfg) {
    std::cerr << "bad scenario: " << cfg.message() << "\n";
    return kExitError;
  }
  if (seed) cfg.value().seed = *seed;

  auto result = luce::harness::run(cfg.value());
  if (!result) {
    std::cerr << "run failed: " << result.message() << "\n";
    return kExitError;
  }

  std::string csv = luce::harness::metrics_to_csv(result.value().rows);
  if (outPath.empty()) {
    std::cout << csv;
  } else {
    std::ofstream out(outPath);
    if (!out) {
      std::cerr << "cannot write " << outPath << "\n";
      return kExitError;
    }
    out << csv;
  }
  if (!chainOutPath.empty()) {
    std::ofstream out(chainOutPath);
    if (!out) {
      std::cerr << "cannot write " << chainOutPath << "\n";
      return kExitError;
    }
    out << result.value().chainJsonl;
  }
  if (!catalogOutPath.empty()) {
    std::ofstream out(catalogOutPath);
    if (!out) {
      std::cerr << "cannot write " << catalogOutPath << "\n";
      return kExitError;
    }
    out << result.value().catalogJson;
  }
  return kExitOk;
}

int cmd_costs(const std::string& gasPrice, const std::string& ethUsd, const std::string& format,
              const std::string& configPath) {
  luce::CostConfig cost;
  if (!configPath.empty()) {
    std::ifstream in(configPath);
    if (!in) {
      std::cerr << "cannot open config file: " << configPath << "\n";
      return kExitError;
    }
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) {
      std::cerr << "config file is not valid JSON\n";
      return kExitError;
    }
    auto loaded = luce::load_cost_config(j);
    if (!loaded) {
      std::cerr << "bad config: " << loaded.message() << "\n";
      return kExitError;
    }
    cost = loaded.value();
  }
  if (!gasPrice.empty()) {
    auto d = luce::Decimal::parse(gasPrice);
    if (!d) {
      std::cerr << "bad --gas-price value\n";
      return kExitError;
    }
    cost.rates.gasPriceGwei = *d;
  }
  if (!ethUsd.empty()) {
    auto d = luce::Decimal::parse(ethUsd);
    if (!d) {
      std::cerr << "bad --eth-usd value\n";
      return kExitError;
    }
    cost.rates.ethUsd = *d;
  }

  auto rows = luce::cost_report(cost.schedule, cost.rates);
  std::cout << (format == "csv" ? luce::render_cost_csv(rows) : luce::render_cost_table(rows));
  return kExitOk;
}

int cmd_verify(const std::string& chainPath, const std::string& gdprContract) {
  std::ifstream in(chainPath);
  if (!in) {
    std::cerr << "cannot open chain file: " << chainPath << "\n";
    return kExitError;
  }
  auto chain = luce::read_chain_jsonl(in);
  if (!chain) {
    std::cerr << "unreadable chain: " << chain.message() << "\n";
    return kExitVerifyFailed;
  }
  if (!luce::verify_chain(chain.value())) {
    std::cout << "chain: FAIL (hash chain does not verify)\n";
    return kExitVerifyFailed;
  }
  std::cout << "chain: OK (" << chain.value().blocks.size() << " blocks)\n";

  luce::Platform replayed(0);
  if (auto r = replayed.replay(chain.value()); !r.ok()) {
    std::cout << "replay: FAIL (" << r.message() << ")\n";
    return kExitVerifyFailed;
  }
  std::cout << "replay: OK (" << replayed.contracts().size() << " contracts)\n";

  // State cache coherence against the replayed contracts.
  luce::CacheState cache = luce::sync_cache(replayed);
  for (const auto& [addr, contract] : replayed.contracts()) {
    if (!(cache.contracts.at(addr) ==
          luce::snapshot_from_state(contract, replayed.clock().now_ms()))) {
      std::cout << "cache: FAIL (" << addr.str() << " incoherent)\n";
      return kExitVerifyFailed;
    }
  }
  std::cout << "cache: OK\n";

  if (!gdprContract.empty()) {
    auto addr = luce::Address::parse(gdprContract);
    if (!addr) {
      std::cerr << "bad --gdpr address\n";
      return kExitError;
    }
    const luce::DatasetContract* c = replayed.contract_at(*addr);
    if (c == nullptr) {
      std::cout << "gdpr: FAIL (no such contract on this chain)\n";
      return kExitVerifyFailed;
    }
    auto audit = luce::protocol::audit_update_compliance(*c, replayed.clock().now_ms());
    if (!audit.compliant) {
      std::cout << "gdpr: FAIL (" << audit.offenders.size() << " unresolved recipient(s)";
      for (const auto& a : audit.offenders) std::cout << " " << a.str();
      std::cout << ")\n";
      return kExitVerifyFailed;
    }
    std::cout << "gdpr: OK (" << audit.updatesChecked << " update(s) checked)\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"luce-sim: deterministic simulator for the LUCE data-sharing protocol"};
  app.require_subcommand(1);

  // run
  std::string scenarioPath;
  std::optional<std::uint64_t> seed;
  std::string outPath, chainOutPath, catalogOutPath;
  CLI::App* runCmd = app.add_subcommand("run", "run a scenario and emit metrics CSV");
  runCmd->add_option("--scenario", scenarioPath, "scenario JSON file")->required();
  runCmd->add_option("--seed", seed, "override the scenario seed");
  runCmd->add_option("--out", outPath, "metrics CSV path (default: stdout)");
  runCmd->add_option("--chain-out", chainOutPath, "chain JSONL export path");
  runCmd->add_option("--catalog-out", catalogOutPath, "catalog JSON export path");

  // costs
  std::string gasPrice, ethUsd, format = "table", costConfig;
  CLI::App* costsCmd = app.add_subcommand("costs", "print the gas/fiat cost table");
  costsCmd->add_option("--gas-price", gasPrice, "gas price in Gwei (default 32)");
  costsCmd->add_option("--eth-usd", ethUsd, "USD per ETH (default 1849.44)");
  costsCmd->add_option("--format", format, "table|csv")
      ->check(CLI::IsMember({"table", "csv"}));
  costsCmd->add_option("--config", costConfig, "JSON file with schedule/rate overrides");

  // verify
  std::string chainPath, gdprContract;
  CLI::App* verifyCmd = app.add_subcommand("verify", "verify a chain export");
  verifyCmd->add_option("--chain", chainPath, "chain JSONL file")->required();
  verifyCmd->add_option("--gdpr", gdprContract, "audit update compliance of this contract");

  CLI11_PARSE(app, argc, argv);

  if (runCmd->parsed()) return cmd_run(scenarioPath, seed, outPath, chainOutPath, catalogOutPath);
  if (costsCmd->parsed()) return cmd_costs(gasPrice, ethUsd, format, costConfig);
  if (verifyCmd->parsed()) return cmd_verify(chainPath, gdprContract);
  return kExitError;
}
