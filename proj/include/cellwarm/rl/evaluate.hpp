#pragma once

#include <array>
#include <vector>

#include "cellwarm/env/env.hpp"
#include "cellwarm/rl/policy.hpp"

namespace cellwarm::rl {

struct EpisodeOutcome {
  bool success = false;  // reached the target temperature
  bool failed = false;   // solver failure ended the episode
  double ret = 0.0;      // undiscounted reward sum
  double time_s = 0.0;
  double final_range_k = 0.0;
  double t0_k = 0.0;
  double soc0 = 0.0;
};

struct EvalStats {
  int episodes = 0;
  int successes = 0;
  double success_rate = 0.0;
  double mean_return = 0.0;
  double mean_time_to_target_s = 0.0;  // successful episodes only
  double mean_final_range_k = 0.0;
  // Mean heater input power and mean internal heat power (both per modeled
  // half stack, W) over the first, middle, and last third of successful
  // episodes.
  std::array<double, 3> ptc_power_w{};
  std::array<double, 3> pulse_power_w{};
  std::vector<EpisodeOutcome> detail;
};

// Rolls out n episodes using the environment's own initial-condition
// sampling. Deterministic mode acts at the distribution mode; otherwise
// actions are sampled and `rng` must be supplied.
EvalStats evaluate_policy(env::PreheatEnv& env, const GaussianPolicy& policy, int n_episodes,
                          bool deterministic = true, Rng* rng = nullptr);

// Action for one observation: mode of the squashed policy.
control::ActionProposal greedy_action(const GaussianPolicy& policy, const env::Observation& obs);

}  // namespace cellwarm::rl
