#include "cellwarm/rl/evaluate.hpp"

#include <algorithm>

#include "cellwarm/errors.hpp"

namespace cellwarm::rl {

control::ActionProposal greedy_action(const GaussianPolicy& policy, const env::Observation& obs) {
  const Eigen::VectorXd x = env::PreheatEnv::normalize(obs);
  const Eigen::VectorXd a = policy.box().squash(policy.mode_u(x));
  control::ActionProposal p;
  p.v_ptc = a[0];
  p.i_charge_a = a[1];
  p.i_discharge_a = a[2];
  return p;
}

EvalStats evaluate_policy(env::PreheatEnv& env, const GaussianPolicy& policy, int n_episodes,
                          bool deterministic, Rng* rng) {
  if (n_episodes < 1) throw ConfigError("need at least one evaluation episode");
  if (!deterministic && rng == nullptr) {
    throw ConfigError("stochastic evaluation needs a generator");
  }
  EvalStats stats;
  stats.episodes = n_episodes;
  const double t_des = env.config().episode.t_des_k;
  const double hold_s = env.config().pulse.hold_s;
  std::array<double, 3> energy_ptc{}, energy_pulse{}, span_s{};

  for (int e = 0; e < n_episodes; ++e) {
    env::Observation obs = env.reset();
    EpisodeOutcome out;
    out.t0_k = obs.t_m;
    out.soc0 = obs.soc;
    std::vector<double> hold_ptc, hold_pulse;
    env::StepResult sr;
    while (!env.done()) {
      control::ActionProposal prop;
      if (deterministic) {
        prop = greedy_action(policy, obs);
      } else {
        const Eigen::VectorXd x = env::PreheatEnv::normalize(obs);
        const Eigen::VectorXd a = policy.box().squash(policy.sample_u(x, *rng));
        prop = {a[0], a[1], a[2]};
      }
      sr = env.step(prop);
      obs = sr.obs;
      out.ret += sr.reward;
      hold_ptc.push_back(sr.ptc_energy_j);
      hold_pulse.push_back(sr.pulse_energy_j);
    }
    out.failed = sr.failed;
    out.time_s = sr.time_s;
    out.final_range_k = sr.t_range;
    out.success = !sr.failed && sr.t_avg >= t_des - 1e-12;
    if (out.success) {
      ++stats.successes;
      stats.mean_time_to_target_s += out.time_s;
      const std::size_t h_n = hold_ptc.size();
      for (std::size_t h = 0; h < h_n; ++h) {
        const std::size_t third = std::min<std::size_t>(2, 3 * h / h_n);
        energy_ptc[third] += hold_ptc[h];
        energy_pulse[third] += hold_pulse[h];
        span_s[third] += hold_s;
      }
    }
    stats.mean_return += out.ret;
    stats.mean_final_range_k += out.final_range_k;
    stats.detail.push_back(out);
  }

  stats.mean_return /= n_episodes;
  stats.mean_final_range_k /= n_episodes;
  stats.success_rate = static_cast<double>(stats.successes) / n_episodes;
  if (stats.successes > 0) stats.mean_time_to_target_s /= stats.successes;
  for (int k = 0; k < 3; ++k) {
    if (span_s[k] > 0.0) {
      stats.ptc_power_w[k] = energy_ptc[k] / span_s[k];
      stats.pulse_power_w[k] = energy_pulse[k] / span_s[k];
    }
  }
  return stats;
}

}  // namespace cellwarm::rl
