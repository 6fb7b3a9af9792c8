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

#include <cstdio>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "luce/chainio.hpp"
#include "luce/costmodel.hpp"
#include "luce/protocol.hpp"
#include "luce/scenario.hpp"

namespace luce::harness {

/// One measurement point. Replicated runs report the mean of each numeric
/// column, so everything is carried as double.
struct MetricsRow {
  std::string experiment;
  std::int64_t paramValue = 0;
  double totalSimulatedSeconds = 0;
  double totalSubmissionOps = 0;
  double totalGas = 0;
  double tokensIssued = 0;
  double tokensRevoked = 0;
  double chainLength = 0;
};

inline std::string fmt3(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

inline constexpr const char* kMetricsCsvHeader =
    "experiment,param_value,total_simulated_seconds,total_submission_ops,total_gas,"
    "tokens_issued,tokens_revoked,chain_length";

inline std::string metrics_to_csv(std::span<const MetricsRow> rows) {
  std::string out = kMetricsCsvHeader;
  out += '\n';
  for (const auto& r : rows) {
    out += r.experiment + ',' + std::to_string(r.paramValue) + ',' + fmt3(r.totalSimulatedSeconds) +
           ',' + fmt3(r.totalSubmissionOps) + ',' + fmt3(r.totalGas) + ',' + fmt3(r.tokensIssued) +
           ',' + fmt3(r.tokensRevoked) + ',' + fmt3(r.chainLength) + '\n';
  }
  return out;
}

struct RunOutput {
  std::vector<MetricsRow> rows;
  std::string chainJsonl;   // ledger of replication 0, last parameter point
  std::string catalogJson;  // catalog of the same platform
};

/// Reference cost table, the golden-file artifact.
inline std::string cost_table(const GasSchedule& schedule = GasSchedule::defaults(),
                              const FiatRates& rates = FiatRates::defaults()) {
  return render_cost_table(cost_report(schedule, rates));
}

namespace detail {

struct World {
  std::unique_ptr<Platform> platform;
  Address provider{};
  protocol::ProviderAgent providerAgent;
  std::vector<protocol::RequesterAgent> requesters;
  Address authority{};
  std::map<std::string, Address> subjectAddrs;  // identity -> address
  std::vector<protocol::ShareOutcome> shares;   // one per dataset
};

inline RecordSet make_records(unsigned datasetIndex, unsigned subjects) {
  static const char* kCities[] = {"Aachen", "Maastricht", "Liege", "Heerlen", "Hasselt"};
  RecordSet rs;
  for (unsigned k = 1; k <= subjects; ++k) {
    std::string anon = "a-" + std::to_string(datasetIndex + 1) + "-" + std::to_string(k);
    rs.records[anon] = {{"age", std::to_string(21 + (7 * k + datasetIndex) % 50)},
                        {"city", kCities[k % 5]}};
  }
  return rs;
}

inline License research_license() {
  License lic;
  lic.licenseType = "CC-BY-NC";
  lic.termsText = "Non-commercial reuse; access renewal certifies continued license compliance.";
  lic.permittedPurposes = {"research", "teaching"};
  return lic;
}

/// Builds a platform with registered actors and, unless `nDatasets` is 0,
/// shared datasets ds-1..ds-N populated with mapped subjects.
inline Result<World> make_world(const ScenarioConfig& cfg, std::uint64_t repSeed,
                                unsigned nRequesters, unsigned nDatasets, bool demoActors) {
  World w;
  MiningConfig mining = cfg.mining;
  mining.seed = derive_seed(repSeed, "mining");
  w.platform = std::make_unique<Platform>(repSeed, mining);
  Platform& p = *w.platform;

  w.provider = p.new_account();
  w.providerAgent.address = w.provider;
  auto reg = p.submit_register(w.provider, Role::DataProvider, "provider-1");
  if (!reg) return {reg.error(), reg.detail()};

  for (unsigned i = 0; i < nRequesters; ++i) {
    protocol::RequesterAgent agent;
    agent.address = p.new_account();
    agent.purpose = "research";
    if (cfg.ignoreUpdates.count(i)) agent.behavior.ignoreUpdates = true;
    if (cfg.neverRenew.count(i)) agent.behavior.neverRenew = true;
    auto r = p.submit_register(agent.address, Role::DataRequester,
                               "requester-" + std::to_string(i + 1));
    if (!r) return {r.error(), r.detail()};
    w.requesters.push_back(std::move(agent));
  }

  if (demoActors) {
    w.authority = p.new_account();
    auto a = p.submit_register(w.authority, Role::SupervisoryAuthority, "authority-1");
    if (!a) return {a.error(), a.detail()};
    for (unsigned k = 1; k <= cfg.counts.subjects; ++k) {
      std::string identity = "subject-" + std::to_string(k);
      Address addr = p.new_account();
      auto s = p.submit_register(addr, Role::DataSubject, identity);
      if (!s) return {s.error(), s.detail()};
      w.subjectAddrs[identity] = addr;
    }
  }
  if (auto mined = p.mine_all(); !mined.ok()) return {mined.error(), mined.detail()};

  for (unsigned d = 0; d < nDatasets; ++d) {
    protocol::Descriptor desc;
    desc.datasetId = "ds-" + std::to_string(d + 1);
    desc.title = "Clinical study records " + std::to_string(d + 1);
    desc.description = "De-identified subject records shared for secondary research";
    desc.keywords = {"clinical", "research", "cohort-" + std::to_string(d + 1)};
    RecordSet records = make_records(d, cfg.counts.subjects);
    for (unsigned k = 1; k <= cfg.counts.subjects; ++k)
      w.providerAgent.subjects.byDataset[desc.datasetId]["subject-" + std::to_string(k)] =
          "a-" + std::to_string(d + 1) + "-" + std::to_string(k);
    auto share = protocol::share_dataset(p, w.providerAgent, std::move(records), desc,
                                         research_license(), cfg.tokenPeriodMs);
    if (!share) return {share.error(), share.detail()};
    w.shares.push_back(share.value());
  }
  return w;
}

inline void count_tokens(const Platform& p, MetricsRow& row) {
  for (const auto& [addr, contract] : p.contracts()) {
    for (const auto& e : contract.event_log()) {
      if (e.kind == EventKind::RequesterAdded) row.tokensIssued += 1;
      if (e.kind == EventKind::TokenRevoked) row.tokensRevoked += 1;
    }
  }
}

inline void finish_row(const Platform& p, MetricsRow& row) {
  row.totalGas = static_cast<double>(p.ledger().total_gas_mined());
  row.chainLength = static_cast<double>(p.ledger().chain().blocks.size());
  count_tokens(p, row);
}

inline void capture_outputs(const Platform& p, std::string* chainOut, std::string* catalogOut) {
  if (chainOut) *chainOut = chain_to_jsonl(p.ledger().chain());
  if (catalogOut) *catalogOut = p.catalog().to_json();
}

/// Mined acquisition experiment: n sequential requester rounds against one
/// (or round-robin over several) shared datasets, one block per round. The
/// latency stream is reseeded at measurement start so paired runs draw
/// identical mining times and differ only by per-operation actor cost.
inline Result<MetricsRow> acquisition_once(const ScenarioConfig& cfg, unsigned n,
                                           std::uint64_t repSeed, unsigned nDatasets, bool baseline,
                                           unsigned threads, const std::string& label,
                                           std::string* chainOut = nullptr,
                                           std::string* catalogOut = nullptr) {
  ScenarioConfig local = cfg;
  local.mining.threads = threads;
  auto world = make_world(local, repSeed, n, baseline ? 0 : nDatasets, false);
  if (!world) return {world.error(), world.detail()};
  World& w = world.value();
  Platform& p = *w.platform;

  p.mining_config().seed = derive_seed(repSeed, "measure");
  const SimMillis t0 = p.clock().now_ms();
  double ops = 0;

  for (unsigned i = 0; i < n; ++i) {
    if (baseline) {
      p.clock().advance(cfg.actorOpCostMs);
      auto r = p.exec_baseline_set(w.requesters[i].address, w.requesters[i].address,
                                   static_cast<std::int64_t>(i));
      if (!r.ok()) return {r.error(), r.detail()};
      ops += 1;
    } else {
      const std::string datasetId = "ds-" + std::to_string(i % nDatasets + 1);
      auto r = protocol::acquire(p, w.requesters[i], datasetId, cfg.actorOpCostMs);
      if (!r) return {r.error(), r.detail()};
      ops += 5;
    }
  }

  MetricsRow row;
  row.experiment = label;
  row.paramValue = static_cast<std::int64_t>(n);
  row.totalSimulatedSeconds = static_cast<double>(p.clock().now_ms() - t0) / 1000.0;
  row.totalSubmissionOps = ops;
  finish_row(p, row);
  capture_outputs(p, chainOut, catalogOut);
  return row;
}

/// Submission-only experiment: the whole batch is submitted without waiting
/// on mining (zero-latency blocks execute the state machines afterwards).
/// The interesting outputs are operation counts; wall-clock is the caller's
/// concern.
inline Result<MetricsRow> submit_only_once(const ScenarioConfig& cfg, unsigned n,
                                           std::uint64_t repSeed, bool baseline,
                                           std::string* chainOut = nullptr,
                                           std::string* catalogOut = nullptr) {
  ScenarioConfig local = cfg;
  local.mining.latencyLowS = 0;
  local.mining.latencyHighS = 0;
  auto world = make_world(local, repSeed, n, baseline ? 0 : 1, false);
  if (!world) return {world.error(), world.detail()};
  World& w = world.value();
  Platform& p = *w.platform;

  const SimMillis t0 = p.clock().now_ms();
  double ops = 0;
  std::vector<Digest> gets;

  for (unsigned i = 0; i < n; ++i) {
    const Address requester = w.requesters[i].address;
    if (baseline) {
      auto r = p.submit_baseline_set(requester, requester, static_cast<std::int64_t>(i));
      if (!r) return {r.error(), r.detail()};
      ops += 1;
    } else {
      if (!p.catalog().find("ds-1")) return {Err::UnknownDataset, "ds-1"};
      ops += 1;  // query
      auto lic = p.submit_get_license(requester, w.shares[0].contract);
      auto add = p.submit_add_data_requester(requester, w.shares[0].contract, "research", true);
      auto get = p.submit_get_link(requester, w.shares[0].contract);
      if (!lic || !add || !get) return {Err::MalformedAction, "submission failed"};
      gets.push_back(get.value());
      ops += 3;
    }
  }
  if (auto mined = p.mine_all(); !mined.ok()) return {mined.error(), mined.detail()};

  if (!baseline) {
    const DatasetContract* c = p.contract_at(w.shares[0].contract);
    for (unsigned i = 0; i < n; ++i) {
      const ExecOutcome* out = p.ledger().outcome_of(gets[i]);
      if (out == nullptr || !out->ok()) return {Err::NoToken, "getLink rejected"};
      auto token = c->token_of(w.requesters[i].address);
      auto fetched = p.datastore().fetch(w.shares[0].link, *token, *c, p.clock().now_ms());
      if (!fetched) return {fetched.error(), fetched.detail()};
      ops += 1;  // fetch
    }
  }

  MetricsRow row;
  row.experiment = baseline ? "submit_only_baseline" : "submit_only_luce";
  row.paramValue = static_cast<std::int64_t>(n);
  row.totalSimulatedSeconds = static_cast<double>(p.clock().now_ms() - t0) / 1000.0;
  row.totalSubmissionOps = ops;
  finish_row(p, row);
  capture_outputs(p, chainOut, catalogOut);
  return row;
}

/// Demo story: share, acquire, maintain, one scripted GDPR flow, audit.
inline Result<MetricsRow> demo_once(const ScenarioConfig& cfg, std::uint64_t repSeed,
                                    std::string* chainOut = nullptr,
                                    std::string* catalogOut = nullptr) {
  auto world = make_world(cfg, repSeed, cfg.counts.requesters, cfg.counts.datasets, true);
  if (!world) return {world.error(), world.detail()};
  World& w = world.value();
  Platform& p = *w.platform;
  double ops = 1 + cfg.counts.requesters + 1 + cfg.counts.subjects;  // registrations
  ops += 3.0 * static_cast<double>(w.shares.size());                 // share transactions

  for (auto& agent : w.requesters) {
    auto r = protocol::acquire(p, agent, "ds-1", cfg.actorOpCostMs);
    if (!r) return {r.error(), r.detail()};
    ops += 5;
  }

  protocol::SimulationLoop loop(p);
  for (auto& agent : w.requesters)
    protocol::start_maintenance(loop, agent, w.shares[0].contract, cfg.horizonMs, cfg.renewLeadMs);

  struct ScriptResult {
    EventScriptItem item;
    Result<protocol::UpdateOutcome> outcome{Err::InvalidConfig, "never ran"};
  };
  std::vector<ScriptResult> scriptResults;
  scriptResults.reserve(cfg.eventScript.size());
  for (const auto& item : cfg.eventScript) scriptResults.push_back({item, {Err::InvalidConfig, "pending"}});

  for (auto& sr : scriptResults) {
    loop.schedule(sr.item.atMs, [&p, &loop, &w, &sr] {
      if (sr.item.action == "erase") {
        sr.outcome = protocol::request_erasure(p, loop, w.providerAgent, sr.item.subject,
                                               sr.item.dataset);
      } else {
        sr.outcome = protocol::request_rectification(p, loop, w.providerAgent, sr.item.subject,
                                                     sr.item.dataset, sr.item.fields);
      }
    });
  }

  loop.run_until(cfg.horizonMs);

  // Post-conditions: every scripted flow completed inside one token period.
  for (const auto& sr : scriptResults) {
    if (!sr.outcome)
      return {Err::InvalidConfig, "scripted " + sr.item.action + " failed: " +
                                      std::string(err_name(sr.outcome.error()))};
    if (!sr.outcome.value().completedWithinPeriod)
      return {Err::InvalidConfig, "scripted " + sr.item.action + " not propagated within T"};
    ops += 1;
    // Erased records must be unreachable through any still-valid token.
    if (sr.item.action == "erase") {
      auto anon = w.providerAgent.subjects.anon_id_for(sr.item.dataset, sr.item.subject);
      const auto& ref = w.providerAgent.datasets.at(sr.item.dataset);
      const DatasetContract* c = p.contract_at(ref.contract);
      for (const auto& agent : w.requesters) {
        auto token = c->token_of(agent.address);
        if (!token) continue;
        auto fetched = p.datastore().fetch(ref.link, *token, *c, p.clock().now_ms());
        if (fetched && fetched.value().records.count(*anon))
          return {Err::InvalidConfig, "erased record still reachable"};
      }
    }
  }

  for (const auto& agent : w.requesters) ops += static_cast<double>(agent.log.size());

  // The authority audits the dataset on the scripted subject's behalf.
  if (!scriptResults.empty() && cfg.neverRenew.empty()) {
    auto complaint = protocol::file_and_audit(p, w.authority, scriptResults[0].item.subject,
                                              scriptResults[0].item.dataset);
    if (!complaint) return {complaint.error(), complaint.detail()};
    if (complaint.value().outcome != protocol::Complaint::Outcome::Compliant)
      return {Err::InvalidConfig, "demo audit reported non-compliance"};
  }

  if (!p.ledger().verify()) return {Err::InvalidConfig, "chain verification failed"};
  CacheState cache = sync_cache(p);
  for (const auto& [addr, contract] : p.contracts()) {
    if (!(cache.contracts.at(addr) == snapshot_from_state(contract, p.clock().now_ms())))
      return {Err::InvalidConfig, "cache incoherent with contract state"};
  }

  MetricsRow row;
  row.experiment = "demo";
  row.paramValue = static_cast<std::int64_t>(cfg.counts.requesters);
  row.totalSimulatedSeconds = p.clock().now_s();
  row.totalSubmissionOps = ops;
  finish_row(p, row);
  capture_outputs(p, chainOut, catalogOut);
  return row;
}

inline std::vector<MetricsRow> average_rows(const std::vector<std::vector<MetricsRow>>& perRep) {
  std::vector<MetricsRow> out;
  if (perRep.empty()) return out;
  const std::size_t nRows = perRep[0].size();
  for (std::size_t i = 0; i < nRows; ++i) {
    MetricsRow mean = perRep[0][i];
    for (std::size_t r = 1; r < perRep.size(); ++r) {
      const MetricsRow& row = perRep[r][i];
      mean.totalSimulatedSeconds += row.totalSimulatedSeconds;
      mean.totalSubmissionOps += row.totalSubmissionOps;
      mean.totalGas += row.totalGas;
      mean.tokensIssued += row.tokensIssued;
      mean.tokensRevoked += row.tokensRevoked;
      mean.chainLength += row.chainLength;
    }
    const double k = static_cast<double>(perRep.size());
    mean.totalSimulatedSeconds /= k;
    mean.totalSubmissionOps /= k;
    mean.totalGas /= k;
    mean.tokensIssued /= k;
    mean.tokensRevoked /= k;
    mean.chainLength /= k;
    out.push_back(std::move(mean));
  }
  return out;
}

}  // namespace detail

/// Runs a scenario: `replications` runs with derived seeds per parameter
/// point, reporting the mean of each metric. Deterministic: identical
/// config and seed give byte-identical CSV and chain export.
inline Result<RunOutput> run(const ScenarioConfig& cfg) {
  if (auto v = cfg.validate(); !v.ok()) return {v.error(), v.detail()};
  RunOutput output;
  std::vector<std::vector<MetricsRow>> perRep;

  const std::vector<unsigned> points = cfg.parameter_points();
  for (unsigned r = 0; r < cfg.replications; ++r) {
    const std::uint64_t repSeed = derive_seed(cfg.seed, "rep/" + std::to_string(r));
    std::vector<MetricsRow> rows;
    const bool capture = r == 0;  // rep 0, last parameter point
    for (std::size_t pi = 0; pi < points.size(); ++pi) {
      const unsigned param = points[pi];
      const bool last = pi + 1 == points.size();
      std::string* chainOut = capture && last ? &output.chainJsonl : nullptr;
      std::string* catalogOut = capture && last ? &output.catalogJson : nullptr;
      switch (cfg.experiment) {
        case Experiment::Demo: {
          auto row = detail::demo_once(cfg, repSeed, chainOut, catalogOut);
          if (!row) return {row.error(), row.detail()};
          rows.push_back(row.value());
          break;
        }
        case Experiment::SameDataset:
        case Experiment::ManyDatasets: {
          const bool many = cfg.experiment == Experiment::ManyDatasets;
          const unsigned nDatasets = many ? cfg.counts.datasets : 1;
          const std::string base = std::string(experiment_name(cfg.experiment));
          auto luce = detail::acquisition_once(cfg, param, repSeed, nDatasets, false,
                                               cfg.mining.threads, base + "_luce", chainOut,
                                               catalogOut);
          if (!luce) return {luce.error(), luce.detail()};
          auto baseline = detail::acquisition_once(cfg, param, repSeed, nDatasets, true,
                                                   cfg.mining.threads, base + "_baseline");
          if (!baseline) return {baseline.error(), baseline.detail()};
          rows.push_back(luce.value());
          rows.push_back(baseline.value());
          break;
        }
        case Experiment::SubmitOnly: {
          auto luce = detail::submit_only_once(cfg, param, repSeed, false, chainOut, catalogOut);
          if (!luce) return {luce.error(), luce.detail()};
          auto baseline = detail::submit_only_once(cfg, param, repSeed, true);
          if (!baseline) return {baseline.error(), baseline.detail()};
          rows.push_back(luce.value());
          rows.push_back(baseline.value());
          break;
        }
        case Experiment::ThreadSweep: {
          auto row = detail::acquisition_once(cfg, cfg.counts.requesters, repSeed, 1, false, param,
                                              "thread_sweep", chainOut, catalogOut);
          if (!row) return {row.error(), row.detail()};
          row.value().paramValue = static_cast<std::int64_t>(param);
          rows.push_back(row.value());
          break;
        }
      }
    }
    perRep.push_back(std::move(rows));
  }

  output.rows = detail::average_rows(perRep);
  return output;
}

}  // namespace luce::harness
