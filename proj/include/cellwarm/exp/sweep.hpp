#pragma once

#include <filesystem>
#include <vector>

#include "cellwarm/exp/scenario.hpp"

namespace cellwarm::experiments {

struct SweepPoint {
  double v_max = 0.0;
  std::uint64_t seed = 0;
  EnergyReport report;
  double mean_rtr_k_s = 0.0;  // average warming rate over the whole episode
  double pulse_share = 0.0;   // pulse energy / total energy
  double mean_v_ptc = 0.0;    // mean applied film voltage over holds
  double v_saturation_frac = 0.0;  // fraction of holds at >= 95% of the cap
  bool failed = false;
};

struct SweepResult {
  std::vector<SweepPoint> points;  // in the order the levels were given
};

// Combined heating evaluated at each heater-voltage cap. With a checkpoint
// the stored policy acts (its proposals clamped to the level's cap by the
// supervisor); without one, both actuators are driven at their limits.
// Points run in parallel, each with its own environment and seed + index;
// per-point traces land in out_dir/vmax_<level>/, the roll-up in
// out_dir/summary.json.
SweepResult run_vmax_sweep(const RunConfig& cfg, const std::vector<double>& v_max_levels,
                           const std::filesystem::path& checkpoint,
                           const std::filesystem::path& out_dir, std::uint64_t seed,
                           int threads = 0);

void write_sweep_json(const std::filesystem::path& path, const RunConfig& cfg,
                      const SweepResult& result);

}  // namespace cellwarm::experiments
