#pragma once

#include <Eigen/Dense>
#include <memory>

#include "cellwarm/control/supervisor.hpp"
#include "cellwarm/dfn/model.hpp"
#include "cellwarm/exp/trace.hpp"
#include "cellwarm/rng.hpp"
#include "cellwarm/thermal/model.hpp"
#include "cellwarm/thermal/ptc.hpp"

namespace cellwarm::env {

struct Observation {
  double soc = 0.0;
  double t_m = 0.0;    // K
  double t_out = 0.0;  // K
  double v_t = 0.0;    // V
  double t_des = 0.0;  // K
};

struct RewardConfig {
  double w_rate = 1.0;    // on the warming rate [K/s]
  double w_range = 2.0;   // on the gradient magnitude, active above the threshold
  double w_drange = 1.0;  // on the gradient growth
  double range_threshold_k = 0.5;
  double terminal_bonus = 200.0;
};

struct RewardParts {
  double rate_term = 0.0;
  double guard_term = 0.0;
  double total = 0.0;
};

// Warming-rate term plus the gradient guard. At a terminal step the guard
// becomes +/- the bonus depending on whether the gradient stayed below the
// threshold; a failed episode always takes the penalty.
RewardParts compute_reward(const RewardConfig& cfg, double t_avg_prev, double t_avg_new,
                           double t_range_prev, double t_range_new, double hold_s,
                           bool terminal, bool failed);

struct EpisodeConfig {
  double t_des_k = 273.15;
  double init_t_low_k = 253.15;
  double init_t_high_k = 273.15;
  double init_soc_low = 0.5;
  double init_soc_high = 0.5;
  double max_duration_s = 1800.0;
  bool ambient_tracks_initial = true;  // cold soak: ambient equals the sampled start
  double t_ambient_k = 253.15;         // used when ambient_tracks_initial is false
};

struct StepResult {
  Observation obs;
  double reward = 0.0;
  bool done = false;
  bool failed = false;  // solver gave up; episode ends with the penalty
  RewardParts reward_parts;
  control::SafeAction applied;
  double t_avg = 0.0;
  double t_range = 0.0;
  double time_s = 0.0;
  // Per-hold energy bookkeeping, both per modeled half stack: one film and
  // the half of the volumetric heat it shares the domain with.
  double ptc_energy_j = 0.0;
  double pulse_energy_j = 0.0;
  double net_electrical_j = 0.0;  // integral of terminal voltage times current
};

// Preheating episode: every step applies one hold window of heater voltage
// plus certified pulse amplitudes, coupling the cell model and the thermal
// section at the solver substep.
class PreheatEnv {
 public:
  struct Config {
    dfn::Fidelity fidelity = dfn::Fidelity::Full;
    dfn::MeshSpec mesh;
    control::PulseConfig pulse;
    control::SupervisorConfig supervisor;
    RewardConfig reward;
    EpisodeConfig episode;
  };

  PreheatEnv(const dfn::DfnParameters& p, const thermal::ThermalParameters& th,
             const thermal::PtcParameters& ptc, const Config& cfg, std::uint64_t seed);

  Observation reset();
  Observation reset(double t0_k, double soc0);
  StepResult step(const control::ActionProposal& proposal);

  bool done() const { return done_; }
  double time_s() const { return ec_.time_s; }
  int holds_elapsed() const { return holds_; }
  const Observation& observation() const { return obs_; }
  const dfn::ElectrochemState& cell_state() const { return ec_; }
  const thermal::ThermalState& thermal_state() const { return th_state_; }
  thermal::TemperatureStats stats() const { return thermal::temperature_stats(th_state_, th_run_); }
  const dfn::CellModel& model() const { return *model_; }
  const control::Supervisor& supervisor() const { return *supervisor_; }
  const Config& config() const { return cfg_; }
  const thermal::PtcParameters& ptc() const { return ptc_; }
  Rng& rng() { return rng_; }

  void set_trace_sink(experiments::TraceSink* sink) { sink_ = sink; }

  // Fixed-range scaling to roughly [-1, 1] for function approximators.
  static Eigen::Matrix<double, 5, 1> normalize(const Observation& o);

 private:
  Observation make_observation() const;
  void emit(const experiments::TraceRecord& r) {
    if (sink_ != nullptr) sink_->on_record(r);
  }

  dfn::DfnParameters p_;
  thermal::ThermalParameters th_base_;  // as configured
  thermal::ThermalParameters th_run_;   // ambient possibly re-pinned at reset
  thermal::PtcParameters ptc_;
  Config cfg_;
  std::unique_ptr<dfn::CellModel> model_;
  std::unique_ptr<control::Supervisor> supervisor_;
  Rng rng_;

  dfn::ElectrochemState ec_;
  thermal::ThermalState th_state_;
  Observation obs_;
  bool done_ = true;
  int holds_ = 0;
  experiments::TraceSink* sink_ = nullptr;
};

}  // namespace cellwarm::env
