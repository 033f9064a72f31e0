#include "cellwarm/exp/scenario.hpp"

#include <fstream>
#include <json.hpp>

#include "cellwarm/errors.hpp"
#include "cellwarm/rl/checkpoint.hpp"
#include "cellwarm/rl/evaluate.hpp"

namespace cellwarm::experiments {

namespace fs = std::filesystem;

Scenario scenario_from_string(const std::string& name) {
  if (name == "ptc-only") return Scenario::PtcOnly;
  if (name == "pulse-only") return Scenario::PulseOnly;
  if (name == "combined-policy") return Scenario::Combined;
  throw ConfigError("unknown scenario: " + name +
                    " (expected ptc-only, pulse-only, or combined-policy)");
}

std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::PtcOnly:
      return "ptc-only";
    case Scenario::PulseOnly:
      return "pulse-only";
    case Scenario::Combined:
      return "combined-policy";
  }
  throw ConfigError("bad scenario value");
}

RunConfig RunConfig::load(const fs::path& config_path) {
  const KvFile kv = KvFile::load(config_path.string());
  RunConfig rc;

  fs::path params_path(kv.get_string("run.params"));
  if (params_path.is_relative()) {
    params_path = fs::absolute(config_path).parent_path() / params_path;
  }
  const KvFile pkv = KvFile::load(params_path.string());
  rc.cell = dfn::DfnParameters::from_kv(pkv);
  rc.thermal = thermal::ThermalParameters::from_kv(pkv);
  rc.ptc = thermal::PtcParameters::from_kv(pkv);

  rc.env.fidelity = dfn::fidelity_from_string(kv.get_string("run.fidelity", "full"));
  rc.seed = static_cast<std::uint64_t>(kv.get_int("run.seed", 1));
  rc.trace_substeps = kv.get_bool("run.trace_substeps", false);

  dfn::MeshSpec& m = rc.env.mesh;
  m.n_neg = static_cast<int>(kv.get_int("mesh.n_neg", m.n_neg));
  m.n_sep = static_cast<int>(kv.get_int("mesh.n_sep", m.n_sep));
  m.n_pos = static_cast<int>(kv.get_int("mesh.n_pos", m.n_pos));
  m.n_r = static_cast<int>(kv.get_int("mesh.n_r", m.n_r));
  m.radial_grading = kv.get_double("mesh.radial_grading", m.radial_grading);
  m.dt_s = kv.get_double("mesh.dt_s", m.dt_s);
  m.validate();

  control::PulseConfig& pu = rc.env.pulse;
  pu.frequency_hz = kv.get_double("pulse.frequency_hz", pu.frequency_hz);
  pu.duty = kv.get_double("pulse.duty", pu.duty);
  pu.hold_s = kv.get_double("pulse.hold_s", pu.hold_s);
  pu.validate();

  control::SupervisorConfig& sv = rc.env.supervisor;
  sv.discharge_bias = kv.get_double("supervisor.discharge_bias", sv.discharge_bias);
  sv.i_upper_a = kv.get_double("supervisor.i_upper_a", sv.i_upper_a);
  sv.bisect_rel_tol = kv.get_double("supervisor.bisect_rel_tol", sv.bisect_rel_tol);
  sv.v_margin_charge = kv.get_double("supervisor.v_margin_charge", sv.v_margin_charge);
  sv.v_margin_discharge = kv.get_double("supervisor.v_margin_discharge", sv.v_margin_discharge);
  sv.plating_margin_v = kv.get_double("supervisor.plating_margin_v", sv.plating_margin_v);

  env::RewardConfig& rw = rc.env.reward;
  rw.w_rate = kv.get_double("reward.w_rate", rw.w_rate);
  rw.w_range = kv.get_double("reward.w_range", rw.w_range);
  rw.w_drange = kv.get_double("reward.w_drange", rw.w_drange);
  rw.range_threshold_k = kv.get_double("reward.range_threshold_k", rw.range_threshold_k);
  rw.terminal_bonus = kv.get_double("reward.terminal_bonus", rw.terminal_bonus);

  env::EpisodeConfig& ep = rc.env.episode;
  ep.t_des_k = kv.get_double("episode.t_des_k", ep.t_des_k);
  ep.init_t_low_k = kv.get_double("episode.init_t_low_k", ep.init_t_low_k);
  ep.init_t_high_k = kv.get_double("episode.init_t_high_k", ep.init_t_high_k);
  ep.init_soc_low = kv.get_double("episode.init_soc_low", ep.init_soc_low);
  ep.init_soc_high = kv.get_double("episode.init_soc_high", ep.init_soc_high);
  ep.max_duration_s = kv.get_double("episode.max_duration_s", ep.max_duration_s);
  ep.ambient_tracks_initial = kv.get_bool("episode.ambient_tracks_initial",
                                          ep.ambient_tracks_initial);
  ep.t_ambient_k = kv.get_double("episode.t_ambient_k", ep.t_ambient_k);

  rl::TrainerConfig& tr = rc.trainer;
  tr.kind = kv.get_string("train.kind", tr.kind);
  tr.gamma = kv.get_double("train.gamma", tr.gamma);
  tr.batch_size = static_cast<int>(kv.get_int("train.batch_size", tr.batch_size));
  tr.action_samples = static_cast<int>(kv.get_int("train.action_samples", tr.action_samples));
  tr.policy_lr = kv.get_double("train.policy_lr", tr.policy_lr);
  tr.critic_lr = kv.get_double("train.critic_lr", tr.critic_lr);
  tr.eps_kl = kv.get_double("train.eps_kl", tr.eps_kl);
  tr.eps_mean = kv.get_double("train.eps_mean", tr.eps_mean);
  tr.eps_cov = kv.get_double("train.eps_cov", tr.eps_cov);
  tr.dual_lr = kv.get_double("train.dual_lr", tr.dual_lr);
  tr.target_period = static_cast<int>(kv.get_int("train.target_period", tr.target_period));
  tr.min_buffer = static_cast<std::size_t>(kv.get_int("train.min_buffer",
                                                      static_cast<long long>(tr.min_buffer)));
  tr.update_every = static_cast<int>(kv.get_int("train.update_every", tr.update_every));
  if (kv.has("train.hidden")) {
    tr.hidden.clear();
    for (double h : kv.get_doubles("train.hidden")) tr.hidden.push_back(static_cast<int>(h));
  }
  tr.init_logvar = kv.get_double("train.init_logvar", tr.init_logvar);
  tr.awr_beta = kv.get_double("train.awr_beta", tr.awr_beta);
  tr.awr_weight_max = kv.get_double("train.awr_weight_max", tr.awr_weight_max);
  tr.validate();

  rc.train_episodes = kv.get_int("train.episodes", rc.train_episodes);
  rc.checkpoint_every = static_cast<int>(kv.get_int("train.checkpoint_every",
                                                    rc.checkpoint_every));
  rc.eval_episodes = static_cast<int>(kv.get_int("train.eval_episodes", rc.eval_episodes));
  if (rc.train_episodes < 1 || rc.checkpoint_every < 1 || rc.eval_episodes < 1) {
    throw ConfigError("episode counts must be positive");
  }

  if (kv.has("sweep.v_max")) rc.sweep_v_max = kv.get_doubles("sweep.v_max");
  rc.sweep_threads = static_cast<int>(kv.get_int("sweep.threads", rc.sweep_threads));

  rc.scenario = kv.get_string("run.scenario", "");
  const std::string ckpt = kv.get_string("run.checkpoint", "");
  if (!ckpt.empty()) {
    fs::path cp(ckpt);
    rc.checkpoint = cp.is_relative() ? fs::absolute(config_path).parent_path() / cp : cp;
  }
  return rc;
}

env::PreheatEnv make_env(const RunConfig& cfg, std::uint64_t seed) {
  return env::PreheatEnv(cfg.cell, cfg.thermal, cfg.ptc, cfg.env, seed);
}

std::vector<TraceRecord> emitted_rows(const std::vector<TraceRecord>& all, bool substeps) {
  if (substeps) return all;
  std::vector<TraceRecord> kept;
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (i == 0 || all[i].hold_end) kept.push_back(all[i]);
  }
  return kept;
}

ScenarioResult run_scenario(const RunConfig& cfg, Scenario which,
                            const fs::path& checkpoint, const fs::path& out_dir,
                            std::uint64_t seed) {
  env::PreheatEnv env = make_env(cfg, seed);
  TraceBuffer buffer;
  env.set_trace_sink(&buffer);

  rl::GaussianPolicy policy;
  if (which == Scenario::Combined) {
    if (checkpoint.empty()) throw ConfigError("the combined scenario needs a checkpoint");
    policy = rl::load_policy(checkpoint);
  }
  const double i_big = env.supervisor().config().i_upper_a;

  env::Observation obs = env.reset(cfg.env.episode.init_t_low_k, cfg.env.episode.init_soc_low);
  ScenarioResult res;
  while (!env.done()) {
    control::ActionProposal prop;
    switch (which) {
      case Scenario::PtcOnly:
        prop = {cfg.ptc.v_max, 0.0, 0.0};
        break;
      case Scenario::PulseOnly:
        prop = {0.0, i_big, 0.0};
        break;
      case Scenario::Combined:
        prop = rl::greedy_action(policy, obs);
        break;
    }
    const env::StepResult sr = env.step(prop);
    obs = sr.obs;
    res.episode_return += sr.reward;
    res.net_electrical_j += sr.net_electrical_j;
    res.failed = sr.failed;
    ++res.holds;
  }

  res.rows = emitted_rows(buffer.records(), cfg.trace_substeps);
  res.report = energy_accounting(res.rows, cfg.thermal.half_stack_volume_m3(),
                                 cfg.env.episode.t_des_k);
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    write_trace_csv((out_dir / "trace.csv").string(), buffer.records(), cfg.trace_substeps);
    write_report_json(out_dir / "report.json", cfg, which, seed, res);
  }
  return res;
}

void write_report_json(const fs::path& path, const RunConfig& cfg, Scenario which,
                       std::uint64_t seed, const ScenarioResult& result) {
  nlohmann::json j;
  j["scenario"] = to_string(which);
  j["fidelity"] = cfg.env.fidelity == dfn::Fidelity::Full ? "full" : "reduced";
  j["seed"] = seed;
  j["t0_k"] = cfg.env.episode.init_t_low_k;
  j["soc0"] = cfg.env.episode.init_soc_low;
  j["t_des_k"] = cfg.env.episode.t_des_k;
  j["hold_s"] = cfg.env.pulse.hold_s;
  j["ptc_energy_j"] = result.report.ptc_energy_j;
  j["pulse_energy_j"] = result.report.pulse_energy_j;
  j["total_energy_j"] = result.report.total_j;
  j["reached_target"] = result.report.reached_target;
  j["time_to_target_s"] = result.report.time_to_target_s;
  j["duration_s"] = result.report.duration_s;
  j["final_t_avg_k"] = result.report.final_t_avg_k;
  j["final_t_range_k"] = result.report.final_t_range_k;
  j["episode_return"] = result.episode_return;
  j["net_electrical_j"] = result.net_electrical_j;  // auxiliary, substep resolution
  j["failed"] = result.failed;
  j["holds"] = result.holds;

  const fs::path tmp = path.parent_path() / (path.filename().string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw ConfigError("cannot open " + tmp.string() + " for writing");
    out << j.dump(2) << '\n';
    out.flush();
    if (!out) throw ConfigError("failed while writing " + tmp.string());
  }
  fs::rename(tmp, path);
}

}  // namespace cellwarm::experiments
