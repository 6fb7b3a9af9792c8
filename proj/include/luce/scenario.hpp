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
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "luce/clock.hpp"
#include "luce/errors.hpp"
#include "luce/ledger.hpp"
#include "luce/protocol.hpp"

namespace luce::harness {

enum class Experiment { Demo, SameDataset, ManyDatasets, SubmitOnly, ThreadSweep };

inline std::string_view experiment_name(Experiment e) {
  switch (e) {
    case Experiment::Demo: return "demo";
    case Experiment::SameDataset: return "same_dataset";
    case Experiment::ManyDatasets: return "many_datasets";
    case Experiment::SubmitOnly: return "submit_only";
    case Experiment::ThreadSweep: return "thread_sweep";
  }
  return "?";
}

inline std::optional<Experiment> experiment_from(std::string_view s) {
  if (s == "demo") return Experiment::Demo;
  if (s == "same_dataset") return Experiment::SameDataset;
  if (s == "many_datasets") return Experiment::ManyDatasets;
  if (s == "submit_only") return Experiment::SubmitOnly;
  if (s == "thread_sweep") return Experiment::ThreadSweep;
  return std::nullopt;
}

/// Timed scripted action, e.g. a subject exercising erasure mid-run.
struct EventScriptItem {
  SimMillis atMs = 0;
  std::string action;   // "erase" | "rectify"
  std::string subject;  // e.g. "subject-2"
  std::string dataset;  // e.g. "ds-1"
  std::map<std::string, std::string> fields;  // rectification payload
};

struct ScenarioConfig {
  Experiment experiment = Experiment::Demo;
  std::uint64_t seed = 42;
  unsigned replications = 4;

  struct Counts {
    unsigned providers = 1;
    unsigned requesters = 3;
    unsigned subjects = 3;
    unsigned datasets = 1;
  } counts;

  std::vector<unsigned> sweep;    // requester counts per parameter point
  std::vector<unsigned> threads;  // thread counts (thread sweep)

  MiningConfig mining;
  SimMillis tokenPeriodMs = kDefaultTokenPeriod;
  SimMillis renewLeadMs = sim_hours(1);
  SimMillis actorOpCostMs = 50;  // simulated cost of one platform operation
  SimMillis horizonMs = sim_days(45);

  std::vector<EventScriptItem> eventScript;
  std::set<unsigned> ignoreUpdates;  // requester indices (0-based)
  std::set<unsigned> neverRenew;

  VoidResult validate() const {
    if (counts.providers < 1) return {Err::InvalidConfig, "need at least one provider"};
    if (counts.datasets < 1) return {Err::InvalidConfig, "need at least one dataset"};
    if (experiment == Experiment::Demo && counts.requesters < 1)
      return {Err::InvalidConfig, "demo needs at least one requester"};
    if (experiment == Experiment::ThreadSweep && threads.empty())
      return {Err::InvalidConfig, "thread_sweep needs a threads list"};
    for (unsigned n : sweep)
      if (n < 1) return {Err::InvalidConfig, "sweep points must be positive"};
    if (replications < 1) return {Err::InvalidConfig, "replications must be >= 1"};
    if (tokenPeriodMs <= 0) return {Err::InvalidConfig, "tokenPeriodMs must be positive"};
    if (renewLeadMs <= 0 || renewLeadMs >= tokenPeriodMs)
      return {Err::InvalidConfig, "renewLeadMs must lie inside the token period"};
    if (actorOpCostMs < 0) return {Err::InvalidConfig, "actorOpCostMs must be >= 0"};
    if (auto m = mining.validate(); !m.ok()) return m;
    for (unsigned i : ignoreUpdates)
      if (i >= counts.requesters) return {Err::InvalidConfig, "ignoreUpdates index out of range"};
    for (unsigned i : neverRenew)
      if (i >= counts.requesters) return {Err::InvalidConfig, "neverRenew index out of range"};
    for (const auto& item : eventScript) {
      if (item.action != "erase" && item.action != "rectify")
        return {Err::InvalidConfig, "unknown scripted action " + item.action};
      if (item.atMs < 0) return {Err::InvalidConfig, "scripted action time must be >= 0"};
    }
    return ok_void();
  }

  /// Parameter points this run will visit.
  std::vector<unsigned> parameter_points() const {
    if (experiment == Experiment::ThreadSweep) return threads;
    if (!sweep.empty()) return sweep;
    switch (experiment) {
      case Experiment::SameDataset:
      case Experiment::ManyDatasets: {
        std::vector<unsigned> pts;
        for (unsigned n = 5; n <= 100; n += 5) pts.push_back(n);
        return pts;
      }
      case Experiment::SubmitOnly: return {100, 500, 1000, 2000, 5000};
      case Experiment::Demo: return {counts.requesters};
      case Experiment::ThreadSweep: break;
    }
    return {counts.requesters};
  }
};

inline Result<ScenarioConfig> parse_scenario(const nlohmann::json& j) {
  if (!j.is_object()) return {Err::InvalidConfig, "scenario root must be an object"};
  ScenarioConfig cfg;
  try {
    if (j.contains("experiment")) {
      auto e = experiment_from(j["experiment"].get<std::string>());
      if (!e) return {Err::InvalidConfig, "unknown experiment " + j["experiment"].dump()};
      cfg.experiment = *e;
    }
    cfg.seed = j.value("seed", cfg.seed);
    cfg.replications = j.value("replications", cfg.experiment == Experiment::Demo ? 1u : 4u);
    if (j.contains("counts")) {
      const auto& c = j["counts"];
      cfg.counts.providers = c.value("providers", cfg.counts.providers);
      cfg.counts.requesters = c.value("requesters", cfg.counts.requesters);
      cfg.counts.subjects = c.value("subjects", cfg.counts.subjects);
      cfg.counts.datasets = c.value("datasets", cfg.counts.datasets);
    }
    if (j.contains("sweep")) cfg.sweep = j["sweep"].get<std::vector<unsigned>>();
    if (j.contains("threads")) cfg.threads = j["threads"].get<std::vector<unsigned>>();
    if (j.contains("mining")) {
      const auto& m = j["mining"];
      cfg.mining.threads = m.value("threads", cfg.mining.threads);
      cfg.mining.latencyLowS = m.value("latencyLowS", cfg.mining.latencyLowS);
      cfg.mining.latencyHighS = m.value("latencyHighS", cfg.mining.latencyHighS);
      cfg.mining.contentionCap = m.value("contentionCap", cfg.mining.contentionCap);
      cfg.mining.contentionPenalty = m.value("contentionPenalty", cfg.mining.contentionPenalty);
      cfg.mining.blockCapacity = m.value("blockCapacity", cfg.mining.blockCapacity);
    }
    if (j.contains("tokenPeriodS")) cfg.tokenPeriodMs = sim_seconds(j["tokenPeriodS"].get<double>());
    if (j.contains("renewLeadS")) cfg.renewLeadMs = sim_seconds(j["renewLeadS"].get<double>());
    if (j.contains("actorOpCostMs")) cfg.actorOpCostMs = j["actorOpCostMs"].get<SimMillis>();
    if (j.contains("horizonDays")) cfg.horizonMs = sim_days(j["horizonDays"].get<double>());
    if (j.contains("eventScript")) {
      for (const auto& je : j["eventScript"]) {
        EventScriptItem item;
        item.atMs = sim_seconds(je.at("atS").get<double>());
        item.action = je.at("action").get<std::string>();
        item.subject = je.value("subject", "");
        item.dataset = je.value("dataset", "");
        if (je.contains("fields"))
          item.fields = je["fields"].get<std::map<std::string, std::string>>();
        cfg.eventScript.push_back(std::move(item));
      }
    }
    if (j.contains("behaviors")) {
      const auto& b = j["behaviors"];
      if (b.contains("ignoreUpdates"))
        for (unsigned i : b["ignoreUpdates"].get<std::vector<unsigned>>()) cfg.ignoreUpdates.insert(i);
      if (b.contains("neverRenew"))
        for (unsigned i : b["neverRenew"].get<std::vector<unsigned>>()) cfg.neverRenew.insert(i);
    }
  } catch (const nlohmann::json::exception& e) {
    return {Err::InvalidConfig, e.what()};
  }
  // The demo always completes one erase flow; default the script if absent.
  if (cfg.experiment == Experiment::Demo && cfg.eventScript.empty()) {
    EventScriptItem erase;
    erase.atMs = sim_days(20);
    erase.action = "erase";
    erase.subject = "subject-2";
    erase.dataset = "ds-1";
    cfg.eventScript.push_back(std::move(erase));
  }
  if (auto v = cfg.validate(); !v.ok()) return {v.error(), v.detail()};
  return cfg;
}

}  // namespace luce::harness
