#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "cellwarm/dfn/parameters.hpp"
#include "cellwarm/env/env.hpp"
#include "cellwarm/exp/energy.hpp"
#include "cellwarm/rl/trainer.hpp"
#include "cellwarm/thermal/model.hpp"
#include "cellwarm/thermal/ptc.hpp"

namespace cellwarm::experiments {

enum class Scenario { PtcOnly, PulseOnly, Combined };

Scenario scenario_from_string(const std::string& name);
std::string to_string(Scenario s);

// One experiment definition: chemistry plus every runtime section. The
// chemistry file named by `run.params` is resolved relative to the config
// file's own directory.
struct RunConfig {
  dfn::DfnParameters cell;
  thermal::ThermalParameters thermal;
  thermal::PtcParameters ptc;
  env::PreheatEnv::Config env;
  rl::TrainerConfig trainer;
  long train_episodes = 500;
  int checkpoint_every = 50;
  int eval_episodes = 10;
  std::uint64_t seed = 1;
  bool trace_substeps = false;  // emit every solver substep instead of hold ends
  std::vector<double> sweep_v_max = {10.0, 8.0, 6.0, 4.0};
  int sweep_threads = 0;  // 0 = hardware concurrency
  std::string scenario;                // default scenario for one-shot runs
  std::filesystem::path checkpoint;    // default policy checkpoint, may be empty

  static RunConfig load(const std::filesystem::path& config_path);
};

struct ScenarioResult {
  EnergyReport report;
  std::vector<TraceRecord> rows;  // the emitted rows the report was computed from
  double episode_return = 0.0;
  double net_electrical_j = 0.0;  // terminal energy drawn from the cell, auxiliary
  bool failed = false;
  int holds = 0;
};

env::PreheatEnv make_env(const RunConfig& cfg, std::uint64_t seed);

// Rows that survive the granularity choice: the anchor plus hold boundaries,
// or everything when substeps are kept.
std::vector<TraceRecord> emitted_rows(const std::vector<TraceRecord>& all, bool substeps);

// Runs one episode from the configured (low) initial condition and, when
// out_dir is non-empty, writes trace.csv and report.json there. `checkpoint`
// is only read for the combined scenario.
ScenarioResult run_scenario(const RunConfig& cfg, Scenario which,
                            const std::filesystem::path& checkpoint,
                            const std::filesystem::path& out_dir, std::uint64_t seed);

void write_report_json(const std::filesystem::path& path, const RunConfig& cfg, Scenario which,
                       std::uint64_t seed, const ScenarioResult& result);

}  // namespace cellwarm::experiments
