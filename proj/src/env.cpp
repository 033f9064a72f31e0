#include "cellwarm/env/env.hpp"

#include <cmath>

#include "cellwarm/dfn/state.hpp"
#include "cellwarm/errors.hpp"

namespace cellwarm::env {

RewardParts compute_reward(const RewardConfig& cfg, double t_avg_prev, double t_avg_new,
                           double t_range_prev, double t_range_new, double hold_s,
                           bool terminal, bool failed) {
  RewardParts r;
  r.rate_term = cfg.w_rate * (t_avg_new - t_avg_prev) / hold_s;
  if (failed) {
    r.guard_term = -cfg.terminal_bonus;
  } else if (terminal) {
    r.guard_term = t_range_new < cfg.range_threshold_k ? cfg.terminal_bonus : -cfg.terminal_bonus;
  } else if (t_range_new > cfg.range_threshold_k) {
    r.guard_term = -cfg.w_range * t_range_new - cfg.w_drange * (t_range_new - t_range_prev);
  } else {
    r.guard_term = 0.0;
  }
  r.total = r.rate_term + r.guard_term;
  return r;
}

PreheatEnv::PreheatEnv(const dfn::DfnParameters& p, const thermal::ThermalParameters& th,
                       const thermal::PtcParameters& ptc, const Config& cfg, std::uint64_t seed)
    : p_(p), th_base_(th), th_run_(th), ptc_(ptc), cfg_(cfg), rng_(seed) {
  p_.validate();
  th_base_.validate();
  ptc_.validate();
  cfg_.pulse.validate();
  model_ = dfn::make_cell_model(p_, cfg_.mesh, cfg_.fidelity);
  control::SupervisorConfig sup = cfg_.supervisor;
  if (sup.v_ptc_max <= 0.0) sup.v_ptc_max = ptc_.v_max;
  supervisor_ = std::make_unique<control::Supervisor>(*model_, cfg_.pulse, sup);
  const double holds = cfg_.episode.max_duration_s / cfg_.pulse.hold_s;
  if (std::abs(holds - std::round(holds)) > 1e-9 * holds) {
    throw ConfigError("episode duration must be a whole number of hold windows");
  }
}

Observation PreheatEnv::reset() {
  const double t0 = rng_.uniform(cfg_.episode.init_t_low_k, cfg_.episode.init_t_high_k);
  const double soc0 = cfg_.episode.init_soc_low == cfg_.episode.init_soc_high
                          ? cfg_.episode.init_soc_low
                          : rng_.uniform(cfg_.episode.init_soc_low, cfg_.episode.init_soc_high);
  return reset(t0, soc0);
}

Observation PreheatEnv::reset(double t0_k, double soc0) {
  check_temperature(t0_k);
  th_run_ = th_base_;
  if (cfg_.episode.ambient_tracks_initial) {
    th_run_.t_ambient_k = t0_k;
  } else {
    th_run_.t_ambient_k = cfg_.episode.t_ambient_k;
  }
  ec_ = model_->initial_state(soc0);
  th_state_ = thermal::ThermalState::uniform(th_run_, t0_k);
  done_ = false;
  holds_ = 0;
  obs_ = make_observation();

  experiments::TraceRecord r;
  r.t = 0.0;
  r.v_t = obs_.v_t;
  r.soc = obs_.soc;
  const auto st = stats();
  r.t_m = st.t_m;
  r.t_out = st.t_out;
  r.t_avg = st.t_avg;
  r.t_range = st.t_range;
  r.hold_end = true;
  emit(r);
  return obs_;
}

Observation PreheatEnv::make_observation() const {
  Observation o;
  o.soc = dfn::soc(p_, model_->mesh(), ec_);
  const auto st = stats();
  o.t_m = st.t_m;
  o.t_out = st.t_out;
  o.v_t = dfn::terminal_voltage(p_, model_->mesh(), ec_);
  o.t_des = cfg_.episode.t_des_k;
  return o;
}

Eigen::Matrix<double, 5, 1> PreheatEnv::normalize(const Observation& o) {
  Eigen::Matrix<double, 5, 1> v;
  v[0] = 2.0 * o.soc - 1.0;
  v[1] = (o.t_m - 268.0) / 25.0;
  v[2] = (o.t_out - 268.0) / 25.0;
  v[3] = (o.v_t - 3.6) / 0.6;
  v[4] = (o.t_des - 268.0) / 25.0;
  return v;
}

StepResult PreheatEnv::step(const control::ActionProposal& proposal) {
  if (done_) throw ConfigError("step called on a finished episode");
  StepResult out;
  const auto prev = stats();
  out.applied = supervisor_->supervise(proposal, ec_, prev.t_avg);

  const auto profile =
      control::synthesize_pulse_waveform(cfg_.pulse, out.applied.i_charge_a,
                                         out.applied.i_discharge_a);
  const double dt = cfg_.mesh.dt_s;
  const auto& mesh = model_->mesh();
  std::vector<experiments::TraceRecord> rows;
  bool failed = false;

  for (const auto& seg : profile.segments) {
    const int n = static_cast<int>(std::round(seg.duration_s / dt));
    for (int k = 0; k < n && !failed; ++k) {
      const auto st = thermal::temperature_stats(th_state_, th_run_);
      const double q_film = thermal::ptc_power(ptc_, out.applied.v_ptc, st.t_out);
      try {
        model_->step(ec_, seg.current_a, st.t_avg, dt);
      } catch (const SolverError&) {
        failed = true;
        break;
      }
      // The electrochemical stack and the thermal stack are different lumped
      // volumes; couple them through total power, then respread uniformly.
      const double p_pulse_w = dfn::heat_generation(p_, mesh, ec_, st.t_avg) *
                               p_.cell_area_m2 * p_.total_thickness_m();
      const double q_gen = p_pulse_w / th_run_.full_cell_volume_m3();
      thermal::step_thermal(th_state_, q_gen, 2.0 * q_film, th_run_, dt);

      out.ptc_energy_j += q_film * dt;
      out.pulse_energy_j += q_gen * th_run_.half_stack_volume_m3() * dt;
      const double v_t = dfn::terminal_voltage(p_, mesh, ec_);
      out.net_electrical_j += v_t * seg.current_a * dt;

      experiments::TraceRecord r;
      r.t = ec_.time_s;
      r.applied_current = seg.current_a;
      r.v_ptc = out.applied.v_ptc;
      r.v_t = v_t;
      r.soc = dfn::soc(p_, mesh, ec_);
      const auto st2 = thermal::temperature_stats(th_state_, th_run_);
      r.t_m = st2.t_m;
      r.t_out = st2.t_out;
      r.t_avg = st2.t_avg;
      r.t_range = st2.t_range;
      r.q_gen = q_gen;
      r.q_ptc = q_film;
      rows.push_back(r);
    }
    if (failed) break;
  }

  ++holds_;
  const auto now = stats();
  const bool reached = now.t_avg >= cfg_.episode.t_des_k;
  const int max_holds =
      static_cast<int>(std::round(cfg_.episode.max_duration_s / cfg_.pulse.hold_s));
  const bool timeout = holds_ >= max_holds;
  done_ = failed || reached || timeout;
  out.failed = failed;
  out.done = done_;
  out.reward_parts = compute_reward(cfg_.reward, prev.t_avg, now.t_avg, prev.t_range,
                                    now.t_range, cfg_.pulse.hold_s, done_, failed);
  out.reward = out.reward_parts.total;
  out.t_avg = now.t_avg;
  out.t_range = now.t_range;
  out.time_s = ec_.time_s;
  obs_ = make_observation();
  out.obs = obs_;

  if (!rows.empty()) {
    rows.back().reward = out.reward;
    rows.back().hold_end = true;
    for (const auto& r : rows) emit(r);
  }
  return out;
}

}  // namespace cellwarm::env
