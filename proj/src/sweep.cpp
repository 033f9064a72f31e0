#include "cellwarm/exp/sweep.hpp"

#include <atomic>
#include <cstdio>
#include <exception>
#include <fstream>
#include <json.hpp>
#include <thread>

#include "cellwarm/errors.hpp"
#include "cellwarm/rl/checkpoint.hpp"
#include "cellwarm/rl/evaluate.hpp"

namespace cellwarm::experiments {

namespace fs = std::filesystem;

namespace {

std::string level_tag(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "vmax_%g", v);
  return buf;
}

SweepPoint run_point(RunConfig cfg, double level, const rl::GaussianPolicy* policy,
                     const fs::path& dir, std::uint64_t seed) {
  cfg.ptc.v_max = level;
  cfg.env.supervisor.v_ptc_max = 0.0;  // re-derive the clamp from the new cap
  env::PreheatEnv env = make_env(cfg, seed);
  TraceBuffer buffer;
  env.set_trace_sink(&buffer);
  const double i_big = env.supervisor().config().i_upper_a;

  env::Observation obs = env.reset(cfg.env.episode.init_t_low_k, cfg.env.episode.init_soc_low);
  SweepPoint pt;
  pt.v_max = level;
  pt.seed = seed;
  while (!env.done()) {
    control::ActionProposal prop;
    if (policy != nullptr) {
      prop = rl::greedy_action(*policy, obs);
    } else {
      prop = {level, i_big, 0.0};
    }
    const env::StepResult sr = env.step(prop);
    obs = sr.obs;
    pt.failed = sr.failed;
  }

  const std::vector<TraceRecord> rows = emitted_rows(buffer.records(), cfg.trace_substeps);
  pt.report = energy_accounting(rows, cfg.thermal.half_stack_volume_m3(),
                                cfg.env.episode.t_des_k);
  if (pt.report.duration_s > 0.0) {
    pt.mean_rtr_k_s = (rows.back().t_avg - rows.front().t_avg) / pt.report.duration_s;
  }
  if (pt.report.total_j > 0.0) pt.pulse_share = pt.report.pulse_energy_j / pt.report.total_j;
  std::size_t hold_rows = 0, saturated = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    ++hold_rows;
    pt.mean_v_ptc += rows[i].v_ptc;
    if (rows[i].v_ptc >= 0.95 * level) ++saturated;
  }
  if (hold_rows > 0) {
    pt.mean_v_ptc /= static_cast<double>(hold_rows);
    pt.v_saturation_frac = static_cast<double>(saturated) / static_cast<double>(hold_rows);
  }

  if (!dir.empty()) {
    fs::create_directories(dir);
    write_trace_csv((dir / "trace.csv").string(), buffer.records(), cfg.trace_substeps);
  }
  return pt;
}

}  // namespace

SweepResult run_vmax_sweep(const RunConfig& cfg, const std::vector<double>& v_max_levels,
                           const fs::path& checkpoint, const fs::path& out_dir,
                           std::uint64_t seed, int threads) {
  if (v_max_levels.empty()) throw ConfigError("the sweep needs at least one voltage level");
  for (double v : v_max_levels) {
    if (!(v > 0.0)) throw ConfigError("sweep voltage levels must be positive");
  }
  rl::GaussianPolicy policy;
  bool have_policy = false;
  if (!checkpoint.empty()) {
    policy = rl::load_policy(checkpoint);
    have_policy = true;
  }

  const std::size_t n = v_max_levels.size();
  SweepResult result;
  result.points.resize(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};

  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 2;
  std::size_t n_workers = threads > 0 ? static_cast<std::size_t>(threads) : hw;
  if (n_workers > n) n_workers = n;

  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        const fs::path dir = out_dir.empty() ? fs::path() : out_dir / level_tag(v_max_levels[i]);
        result.points[i] = run_point(cfg, v_max_levels[i], have_policy ? &policy : nullptr, dir,
                                     seed + i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(n_workers);
  for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    write_sweep_json(out_dir / "summary.json", cfg, result);
  }
  return result;
}

void write_sweep_json(const fs::path& path, const RunConfig& cfg, const SweepResult& result) {
  nlohmann::json j;
  j["fidelity"] = cfg.env.fidelity == dfn::Fidelity::Full ? "full" : "reduced";
  j["t0_k"] = cfg.env.episode.init_t_low_k;
  j["t_des_k"] = cfg.env.episode.t_des_k;
  nlohmann::json points = nlohmann::json::array();
  for (const SweepPoint& p : result.points) {
    nlohmann::json o;
    o["v_max"] = p.v_max;
    o["seed"] = p.seed;
    o["mean_rtr_k_s"] = p.mean_rtr_k_s;
    o["pulse_share"] = p.pulse_share;
    o["mean_v_ptc"] = p.mean_v_ptc;
    o["v_saturation_frac"] = p.v_saturation_frac;
    o["ptc_energy_j"] = p.report.ptc_energy_j;
    o["pulse_energy_j"] = p.report.pulse_energy_j;
    o["total_energy_j"] = p.report.total_j;
    o["reached_target"] = p.report.reached_target;
    o["time_to_target_s"] = p.report.time_to_target_s;
    o["final_t_range_k"] = p.report.final_t_range_k;
    o["failed"] = p.failed;
    points.push_back(o);
  }
  j["points"] = points;

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
