#pragma once

#include "cellwarm/control/pulse.hpp"
#include "cellwarm/dfn/model.hpp"

namespace cellwarm::control {

// What the policy asks for each hold window: heater drive voltage plus the
// two pulse amplitudes (magnitudes).
struct ActionProposal {
  double v_ptc = 0.0;
  double i_charge_a = 0.0;
  double i_discharge_a = 0.0;
};

struct SafeAction {
  double v_ptc = 0.0;
  double i_charge_a = 0.0;
  double i_discharge_a = 0.0;
  bool v_clamped = false;
  bool charge_limited = false;     // charge amplitude reduced by the predictive check
  bool discharge_raised = false;   // discharge lifted to keep the net-discharge bias
  bool discharge_limited = false;  // discharge reduced by the lower-voltage check
};

struct SupervisorConfig {
  double discharge_bias = 0.05;     // i_discharge >= (1 + bias) * i_charge
  double i_upper_a = 0.0;           // bisection bracket ceiling; 0 = 3C at build time
  double bisect_rel_tol = 0.01;
  double v_margin_charge = 0.010;   // headroom kept below v_max in the probe [V]
  double v_margin_discharge = 0.010;
  double plating_margin_v = 0.0;    // solid-electrolyte potential gap floor
  double v_ptc_max = 0.0;           // filled from the film parameters at build time
};

// Certifies pulse amplitudes by simulating one pulse period ahead on a
// throwaway copy of the state at frozen temperature. Pure: neither the
// passed state nor the wrapped model state changes.
class Supervisor {
 public:
  Supervisor(dfn::CellModel& probe_model, PulseConfig pulse, SupervisorConfig cfg);

  // Largest certified charge amplitude from this state; 0 when even a
  // vanishing pulse violates, the bracket ceiling when nothing binds.
  double max_safe_charge_current(const dfn::ElectrochemState& s, double t_k) const;
  double max_safe_discharge_current(const dfn::ElectrochemState& s, double t_k,
                                    double i_charge_a) const;

  bool charge_feasible(const dfn::ElectrochemState& s, double t_k, double i_charge_a) const;
  bool discharge_feasible(const dfn::ElectrochemState& s, double t_k, double i_charge_a,
                          double i_discharge_a) const;

  SafeAction supervise(const ActionProposal& a, const dfn::ElectrochemState& s,
                       double t_k) const;

  const SupervisorConfig& config() const { return cfg_; }
  const PulseConfig& pulse() const { return pulse_; }

 private:
  dfn::CellModel& model_;
  PulseConfig pulse_;
  SupervisorConfig cfg_;
};

}  // namespace cellwarm::control
