#include "cellwarm/exp/train.hpp"

#include <cstdio>
#include <fstream>

#include "cellwarm/errors.hpp"
#include "cellwarm/rl/checkpoint.hpp"

namespace cellwarm::experiments {

namespace fs = std::filesystem;

namespace {

const char* kMetricsHeader =
    "episode,return,steps,time_s,final_t_avg_k,final_t_range_k,success,critic_loss,"
    "policy_objective,kl_mean,kl_cov,eta,alpha_mean,alpha_cov,mean_q,buffer_size,updates";

void append_metrics(std::ofstream& out, long episode, double ret, int steps, double time_s,
                    double t_avg, double t_range, bool success, const rl::TrainMetrics& m,
                    std::size_t buffer_size) {
  char line[512];
  std::snprintf(line, sizeof line,
                "%ld,%.10g,%d,%.10g,%.10g,%.10g,%d,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,"
                "%.10g,%zu,%ld",
                episode, ret, steps, time_s, t_avg, t_range, success ? 1 : 0, m.critic_loss,
                m.policy_objective, m.kl_mean, m.kl_cov, m.eta, m.alpha_mean, m.alpha_cov,
                m.mean_q, buffer_size, m.updates);
  out << line << '\n';
  out.flush();
}

}  // namespace

TrainResult train_policy(const RunConfig& cfg, const fs::path& out_dir, std::uint64_t seed,
                         const fs::path& resume_from) {
  fs::create_directories(out_dir);
  env::PreheatEnv env = make_env(cfg, seed);

  rl::TrainSession s;
  if (!resume_from.empty()) {
    s = rl::load_checkpoint(resume_from);
    env.rng() = s.env_rng;
  } else {
    Rng base(seed);
    s.loop_rng = base.fork(1);
    rl::ActionBox box;
    const double i_ub = env.supervisor().config().i_upper_a;
    const double bias = env.supervisor().config().discharge_bias;
    box.lo = Eigen::Vector3d::Zero();
    box.hi = Eigen::Vector3d(cfg.ptc.v_max, i_ub, i_ub * (1.0 + bias));
    s.trainer = rl::make_trainer(cfg.trainer, 5, box, s.loop_rng);
  }

  const fs::path metrics_path = out_dir / "metrics.csv";
  const bool fresh_log = resume_from.empty() || !fs::exists(metrics_path);
  std::ofstream metrics(metrics_path, fresh_log ? std::ios::trunc : std::ios::app);
  if (!metrics) throw ConfigError("cannot open " + metrics_path.string() + " for writing");
  if (fresh_log) metrics << kMetricsHeader << '\n';

  const rl::ActionBox& box = s.trainer->policy().box();
  const double t_des = cfg.env.episode.t_des_k;
  rl::TrainMetrics last_m;
  last_m.updates = s.trainer->update_count();

  while (s.episodes_done < cfg.train_episodes) {
    env::Observation obs = env.reset();
    double ep_return = 0.0;
    int ep_steps = 0;
    env::StepResult sr;
    while (!env.done()) {
      const Eigen::VectorXd x = env::PreheatEnv::normalize(obs);
      const Eigen::VectorXd u = s.trainer->policy().sample_u(x, s.loop_rng);
      const Eigen::VectorXd a = box.squash(u);
      sr = env.step({a[0], a[1], a[2]});

      rl::Transition t;
      t.obs = x;
      t.u = u;
      t.reward = sr.reward;
      t.next_obs = env::PreheatEnv::normalize(sr.obs);
      t.done = sr.done;
      t.behavior_log_prob = s.trainer->policy().squashed_log_prob(x, u);
      s.buffer.push(t);

      obs = sr.obs;
      ep_return += sr.reward;
      ++ep_steps;
      ++s.env_steps;
      if (s.buffer.size() >= cfg.trainer.min_buffer &&
          s.env_steps % cfg.trainer.update_every == 0) {
        last_m = s.trainer->update(s.buffer, s.loop_rng);
      }
    }
    ++s.episodes_done;
    const bool success = !sr.failed && sr.t_avg >= t_des - 1e-12;
    append_metrics(metrics, s.episodes_done, ep_return, ep_steps, sr.time_s, sr.t_avg,
                   sr.t_range, success, last_m, s.buffer.size());

    if (s.episodes_done % cfg.checkpoint_every == 0 && s.episodes_done < cfg.train_episodes) {
      s.env_rng = env.rng();
      char name[64];
      std::snprintf(name, sizeof name, "checkpoint_ep%ld.ckpt", s.episodes_done);
      rl::save_checkpoint(out_dir / name, s);
    }
  }

  s.env_rng = env.rng();
  const fs::path final_path = out_dir / "checkpoint_final.ckpt";
  rl::save_checkpoint(final_path, s);

  TrainResult r;
  r.final_checkpoint = final_path;
  r.episodes_done = s.episodes_done;
  r.env_steps = s.env_steps;
  r.updates = s.trainer->update_count();
  return r;
}

}  // namespace cellwarm::experiments
