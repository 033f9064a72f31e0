#include <CLI11.hpp>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <thread>
#include <vector>

#include "cellwarm/errors.hpp"
#include "cellwarm/exp/scenario.hpp"
#include "cellwarm/exp/sweep.hpp"
#include "cellwarm/exp/train.hpp"
#include "cellwarm/rl/checkpoint.hpp"
#include "cellwarm/rl/evaluate.hpp"

namespace fs = std::filesystem;
using namespace cellwarm;

namespace {

struct CommonArgs {
  std::string config;
  std::string out = "out";
  std::string fidelity;
  std::uint64_t seed = 0;
  CLI::Option* seed_opt = nullptr;
};

void add_common(CLI::App* sub, CommonArgs& a) {
  sub->add_option("--config", a.config, "run configuration file")
      ->required()
      ->check(CLI::ExistingFile);
  sub->add_option("--out", a.out, "output directory");
  sub->add_option("--fidelity", a.fidelity, "cell model fidelity: dfn or reduced");
  a.seed_opt = sub->add_option("--seed", a.seed, "seed override");
}

experiments::RunConfig load_config(const CommonArgs& a) {
  experiments::RunConfig cfg = experiments::RunConfig::load(a.config);
  if (!a.fidelity.empty()) cfg.env.fidelity = dfn::fidelity_from_string(a.fidelity);
  if (a.seed_opt != nullptr && a.seed_opt->count() > 0) cfg.seed = a.seed;
  return cfg;
}

void write_json_atomic(const fs::path& path, const nlohmann::json& j) {
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

nlohmann::json report_json(const experiments::ScenarioResult& r) {
  nlohmann::json o;
  o["ptc_energy_j"] = r.report.ptc_energy_j;
  o["pulse_energy_j"] = r.report.pulse_energy_j;
  o["total_energy_j"] = r.report.total_j;
  o["reached_target"] = r.report.reached_target;
  o["time_to_target_s"] = r.report.time_to_target_s;
  o["duration_s"] = r.report.duration_s;
  o["final_t_avg_k"] = r.report.final_t_avg_k;
  o["final_t_range_k"] = r.report.final_t_range_k;
  o["episode_return"] = r.episode_return;
  o["net_electrical_j"] = r.net_electrical_j;
  o["failed"] = r.failed;
  o["holds"] = r.holds;
  return o;
}

int cmd_simulate(const CommonArgs& a, const std::string& scenario_flag,
                 const std::string& checkpoint_flag) {
  experiments::RunConfig cfg = load_config(a);
  const std::string name = !scenario_flag.empty() ? scenario_flag : cfg.scenario;
  if (name.empty()) {
    throw ConfigError("no scenario given (pass --scenario or set run.scenario)");
  }
  const experiments::Scenario which = experiments::scenario_from_string(name);
  fs::path checkpoint = !checkpoint_flag.empty() ? fs::path(checkpoint_flag) : cfg.checkpoint;
  const experiments::ScenarioResult r =
      experiments::run_scenario(cfg, which, checkpoint, a.out, cfg.seed);
  std::printf("%s: reached=%d time_to_target=%.1f s ptc=%.1f J pulse=%.1f J\n", name.c_str(),
              r.report.reached_target ? 1 : 0, r.report.time_to_target_s,
              r.report.ptc_energy_j, r.report.pulse_energy_j);
  return r.failed ? 1 : 0;
}

int cmd_train(const CommonArgs& a, const std::string& resume, long episodes_override) {
  experiments::RunConfig cfg = load_config(a);
  if (episodes_override > 0) cfg.train_episodes = episodes_override;
  const experiments::TrainResult r =
      experiments::train_policy(cfg, a.out, cfg.seed, fs::path(resume));
  std::printf("trained %ld episodes (%ld env steps, %ld updates) -> %s\n", r.episodes_done,
              r.env_steps, r.updates, r.final_checkpoint.string().c_str());
  return 0;
}

int cmd_evaluate(const CommonArgs& a, const std::string& checkpoint_flag, int episodes,
                 bool stochastic) {
  experiments::RunConfig cfg = load_config(a);
  fs::path checkpoint = !checkpoint_flag.empty() ? fs::path(checkpoint_flag) : cfg.checkpoint;
  if (checkpoint.empty()) throw ConfigError("evaluate needs --checkpoint");
  const rl::GaussianPolicy policy = rl::load_policy(checkpoint);
  if (episodes <= 0) episodes = cfg.eval_episodes;

  env::PreheatEnv env = experiments::make_env(cfg, cfg.seed);
  experiments::TraceBuffer buffer;
  env.set_trace_sink(&buffer);
  Rng action_rng(cfg.seed ^ 0xa5a5a5a5a5a5a5a5ull);
  const rl::EvalStats stats =
      rl::evaluate_policy(env, policy, episodes, !stochastic, &action_rng);

  fs::create_directories(a.out);
  // Episodes are delimited by their anchor rows (t = 0).
  std::vector<std::vector<experiments::TraceRecord>> per_episode;
  for (const experiments::TraceRecord& r : buffer.records()) {
    if (r.t == 0.0) per_episode.emplace_back();
    per_episode.back().push_back(r);
  }
  for (std::size_t e = 0; e < per_episode.size(); ++e) {
    char name[64];
    std::snprintf(name, sizeof name, "episode_%02zu", e);
    const fs::path dir = fs::path(a.out) / name;
    fs::create_directories(dir);
    experiments::write_trace_csv((dir / "trace.csv").string(), per_episode[e],
                                 cfg.trace_substeps);
  }

  nlohmann::json j;
  j["episodes"] = stats.episodes;
  j["successes"] = stats.successes;
  j["success_rate"] = stats.success_rate;
  j["mean_return"] = stats.mean_return;
  j["mean_time_to_target_s"] = stats.mean_time_to_target_s;
  j["mean_final_range_k"] = stats.mean_final_range_k;
  j["ptc_power_w_thirds"] = stats.ptc_power_w;
  j["pulse_power_w_thirds"] = stats.pulse_power_w;
  nlohmann::json detail = nlohmann::json::array();
  for (const rl::EpisodeOutcome& o : stats.detail) {
    nlohmann::json d;
    d["success"] = o.success;
    d["failed"] = o.failed;
    d["return"] = o.ret;
    d["time_s"] = o.time_s;
    d["final_range_k"] = o.final_range_k;
    d["t0_k"] = o.t0_k;
    d["soc0"] = o.soc0;
    detail.push_back(d);
  }
  j["detail"] = detail;
  write_json_atomic(fs::path(a.out) / "eval.json", j);
  std::printf("evaluated %d episodes: success %d/%d, mean return %.2f\n", stats.episodes,
              stats.successes, stats.episodes, stats.mean_return);
  return 0;
}

int cmd_compare(const CommonArgs& a, const std::string& checkpoint_flag) {
  experiments::RunConfig cfg = load_config(a);
  fs::path checkpoint = !checkpoint_flag.empty() ? fs::path(checkpoint_flag) : cfg.checkpoint;
  if (checkpoint.empty()) throw ConfigError("compare needs --checkpoint for the policy run");

  const std::array<experiments::Scenario, 3> order = {experiments::Scenario::PtcOnly,
                                                      experiments::Scenario::PulseOnly,
                                                      experiments::Scenario::Combined};
  std::array<experiments::ScenarioResult, 3> results;
  std::array<std::exception_ptr, 3> errors;
  std::vector<std::thread> pool;
  for (std::size_t i = 0; i < order.size(); ++i) {
    pool.emplace_back([&, i]() {
      try {
        const fs::path dir = fs::path(a.out) / experiments::to_string(order[i]);
        results[i] = experiments::run_scenario(cfg, order[i], checkpoint, dir, cfg.seed);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    });
  }
  for (std::thread& t : pool) t.join();
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  const experiments::EnergyReport& ptc = results[0].report;
  const experiments::EnergyReport& pulse = results[1].report;
  const experiments::EnergyReport& comb = results[2].report;
  nlohmann::json j;
  j["ptc-only"] = report_json(results[0]);
  j["pulse-only"] = report_json(results[1]);
  j["combined-policy"] = report_json(results[2]);
  nlohmann::json ord;
  ord["time_ptc_lt_combined"] =
      ptc.reached_target && comb.reached_target && ptc.time_to_target_s < comb.time_to_target_s;
  ord["time_combined_lt_pulse"] = comb.reached_target && pulse.reached_target &&
                                  comb.time_to_target_s < pulse.time_to_target_s;
  ord["range_ptc_gt_combined"] = ptc.final_t_range_k > comb.final_t_range_k;
  ord["energy_pulse_greatest"] = pulse.total_j > ptc.total_j && pulse.total_j > comb.total_j;
  ord["pulse_excess_over_ptc"] =
      ptc.total_j > 0.0 ? (pulse.total_j - ptc.total_j) / ptc.total_j : 0.0;
  j["orderings"] = ord;
  fs::create_directories(a.out);
  write_json_atomic(fs::path(a.out) / "compare.json", j);
  std::printf("compare: ptc %.0f J, pulse %.0f J, combined %.0f J\n", ptc.total_j, pulse.total_j,
              comb.total_j);
  return 0;
}

int cmd_sweep(const CommonArgs& a, const std::string& checkpoint_flag,
              const std::vector<double>& vmax_flag, int threads) {
  experiments::RunConfig cfg = load_config(a);
  fs::path checkpoint = !checkpoint_flag.empty() ? fs::path(checkpoint_flag) : cfg.checkpoint;
  const std::vector<double>& levels = !vmax_flag.empty() ? vmax_flag : cfg.sweep_v_max;
  const int n_threads = threads > 0 ? threads : cfg.sweep_threads;
  const experiments::SweepResult r =
      experiments::run_vmax_sweep(cfg, levels, checkpoint, a.out, cfg.seed, n_threads);
  for (const experiments::SweepPoint& p : r.points) {
    std::printf("v_max %.3g V: pulse share %.3f, time to target %.1f s\n", p.v_max,
                p.pulse_share, p.report.time_to_target_s);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Subzero cell preheating: simulation, scheduling, and training toolkit"};
  app.require_subcommand(1);

  CommonArgs sim_a, train_a, eval_a, cmp_a, sweep_a;
  std::string sim_scenario, sim_ckpt;
  std::string train_resume;
  long train_episodes = 0;
  std::string eval_ckpt;
  int eval_episodes = 0;
  bool eval_stochastic = false;
  std::string cmp_ckpt;
  std::string sweep_ckpt;
  std::vector<double> sweep_vmax;
  int sweep_threads = 0;

  CLI::App* sim = app.add_subcommand("simulate", "run one heating scenario");
  add_common(sim, sim_a);
  sim->add_option("--scenario", sim_scenario,
                  "ptc-only, pulse-only, or combined-policy");
  sim->add_option("--checkpoint", sim_ckpt, "policy checkpoint for combined-policy");

  CLI::App* tr = app.add_subcommand("train", "train the scheduling policy");
  add_common(tr, train_a);
  tr->add_option("--resume", train_resume, "checkpoint to continue from")
      ->check(CLI::ExistingFile);
  tr->add_option("--episodes", train_episodes, "total episode budget override");

  CLI::App* ev = app.add_subcommand("evaluate", "roll out a trained policy");
  add_common(ev, eval_a);
  ev->add_option("--checkpoint", eval_ckpt, "policy checkpoint");
  ev->add_option("--episodes", eval_episodes, "number of evaluation episodes");
  ev->add_flag("--stochastic", eval_stochastic, "sample actions instead of acting at the mode");

  CLI::App* cm = app.add_subcommand("compare", "run all three scenarios and summarize");
  add_common(cm, cmp_a);
  cm->add_option("--checkpoint", cmp_ckpt, "policy checkpoint for the combined run");

  CLI::App* sw = app.add_subcommand("sweep", "combined heating across heater voltage caps");
  add_common(sw, sweep_a);
  sw->add_option("--checkpoint", sweep_ckpt, "optional policy checkpoint");
  sw->add_option("--vmax", sweep_vmax, "voltage caps to sweep");
  sw->add_option("--threads", sweep_threads, "parallel workers (0 = auto)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return cmd_simulate(sim_a, sim_scenario, sim_ckpt);
    if (tr->parsed()) return cmd_train(train_a, train_resume, train_episodes);
    if (ev->parsed()) return cmd_evaluate(eval_a, eval_ckpt, eval_episodes, eval_stochastic);
    if (cm->parsed()) return cmd_compare(cmp_a, cmp_ckpt);
    if (sw->parsed()) return cmd_sweep(sweep_a, sweep_ckpt, sweep_vmax, sweep_threads);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
