#include "cellwarm/control/supervisor.hpp"

#include <cmath>

#include "cellwarm/dfn/state.hpp"
#include "cellwarm/errors.hpp"

namespace cellwarm::control {

namespace {

int substeps_for(double duration_s, double dt_s) {
  const double k = duration_s / dt_s;
  const int n = static_cast<int>(std::round(k));
  if (n < 1 || std::abs(k - n) > 1e-9 * k) {
    throw ConfigError("pulse phase is not a whole number of solver steps");
  }
  return n;
}

}  // namespace

Supervisor::Supervisor(dfn::CellModel& probe_model, PulseConfig pulse, SupervisorConfig cfg)
    : model_(probe_model), pulse_(pulse), cfg_(cfg) {
  pulse_.validate();
  substeps_for(pulse_.charge_s(), model_.mesh().spec.dt_s);
  substeps_for(pulse_.discharge_s(), model_.mesh().spec.dt_s);
  if (cfg_.i_upper_a <= 0.0) cfg_.i_upper_a = 3.0 * model_.params().one_c_a();
  if (cfg_.v_ptc_max < 0.0) throw ConfigError("heater voltage cap must be nonnegative");
  if (!(cfg_.bisect_rel_tol > 0.0 && cfg_.bisect_rel_tol < 1.0)) {
    throw ConfigError("bisection tolerance outside (0, 1)");
  }
  if (!(cfg_.discharge_bias >= 0.0)) throw ConfigError("discharge bias must be nonnegative");
}

bool Supervisor::charge_feasible(const dfn::ElectrochemState& s, double t_k,
                                 double i_charge_a) const {
  const auto& p = model_.params();
  const auto& m = model_.mesh();
  const double dt = m.spec.dt_s;
  const int n = substeps_for(pulse_.charge_s(), dt);
  dfn::ElectrochemState probe = s;
  try {
    for (int k = 0; k < n; ++k) {
      model_.step(probe, -i_charge_a, t_k, dt);
      if (dfn::terminal_voltage(p, m, probe) > p.v_max - cfg_.v_margin_charge) return false;
      if (dfn::min_plating_margin(p, m, probe) < cfg_.plating_margin_v) return false;
    }
  } catch (const SolverError&) {
    return false;
  } catch (const DomainError&) {
    return false;
  }
  return true;
}

bool Supervisor::discharge_feasible(const dfn::ElectrochemState& s, double t_k,
                                    double i_charge_a, double i_discharge_a) const {
  const auto& p = model_.params();
  const auto& m = model_.mesh();
  const double dt = m.spec.dt_s;
  const int nc = substeps_for(pulse_.charge_s(), dt);
  const int nd = substeps_for(pulse_.discharge_s(), dt);
  dfn::ElectrochemState probe = s;
  try {
    for (int k = 0; k < nc; ++k) model_.step(probe, -i_charge_a, t_k, dt);
    for (int k = 0; k < nd; ++k) {
      model_.step(probe, i_discharge_a, t_k, dt);
      if (dfn::terminal_voltage(p, m, probe) < p.v_min + cfg_.v_margin_discharge) return false;
    }
  } catch (const SolverError&) {
    return false;
  } catch (const DomainError&) {
    return false;
  }
  return true;
}

double Supervisor::max_safe_charge_current(const dfn::ElectrochemState& s, double t_k) const {
  if (!charge_feasible(s, t_k, 0.0)) return 0.0;
  double hi = cfg_.i_upper_a;
  if (charge_feasible(s, t_k, hi)) return hi;
  double lo = 0.0;
  while (hi - lo > cfg_.bisect_rel_tol * lo || lo == 0.0) {
    if (hi <= 1e-6 * cfg_.i_upper_a) return 0.0;
    const double mid = 0.5 * (lo + hi);
    if (charge_feasible(s, t_k, mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

double Supervisor::max_safe_discharge_current(const dfn::ElectrochemState& s, double t_k,
                                              double i_charge_a) const {
  if (!discharge_feasible(s, t_k, i_charge_a, 0.0)) return 0.0;
  double hi = cfg_.i_upper_a;
  if (discharge_feasible(s, t_k, i_charge_a, hi)) return hi;
  double lo = 0.0;
  while (hi - lo > cfg_.bisect_rel_tol * lo || lo == 0.0) {
    if (hi <= 1e-6 * cfg_.i_upper_a) return 0.0;
    const double mid = 0.5 * (lo + hi);
    if (discharge_feasible(s, t_k, i_charge_a, mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

SafeAction Supervisor::supervise(const ActionProposal& a, const dfn::ElectrochemState& s,
                                 double t_k) const {
  if (!std::isfinite(a.v_ptc) || !std::isfinite(a.i_charge_a) || !std::isfinite(a.i_discharge_a)) {
    throw ConfigError("action proposal contains a non-finite value");
  }
  SafeAction out;

  out.v_ptc = a.v_ptc;
  if (out.v_ptc < 0.0) {
    out.v_ptc = 0.0;
    out.v_clamped = true;
  } else if (out.v_ptc > cfg_.v_ptc_max) {
    out.v_ptc = cfg_.v_ptc_max;
    out.v_clamped = true;
  }

  double ic = std::max(0.0, a.i_charge_a);
  if (ic > cfg_.i_upper_a) {
    ic = cfg_.i_upper_a;
    out.charge_limited = true;
  }
  if (ic > 0.0 && !charge_feasible(s, t_k, ic)) {
    // The proposal itself is the bracket ceiling: anything above it is moot.
    double lo = 0.0, hi = ic;
    while ((hi - lo > cfg_.bisect_rel_tol * lo || lo == 0.0) && hi > 1e-6 * cfg_.i_upper_a) {
      const double mid = 0.5 * (lo + hi);
      if (charge_feasible(s, t_k, mid)) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    ic = lo;
    out.charge_limited = true;
  }

  double id = std::max(0.0, a.i_discharge_a);
  const double id_floor = (1.0 + cfg_.discharge_bias) * ic;
  if (id < id_floor) {
    id = id_floor;
    out.discharge_raised = true;
  }
  if (id > cfg_.i_upper_a * (1.0 + cfg_.discharge_bias)) {
    id = cfg_.i_upper_a * (1.0 + cfg_.discharge_bias);
    out.discharge_limited = true;
  }

  if (id > 0.0 && !discharge_feasible(s, t_k, ic, id)) {
    // Shrink the discharge amplitude; the charge amplitude follows so the
    // net-discharge bias is preserved.
    double lo = 0.0, hi = id;
    while ((hi - lo > cfg_.bisect_rel_tol * lo || lo == 0.0) && hi > 1e-6 * cfg_.i_upper_a) {
      const double mid = 0.5 * (lo + hi);
      const double ic_mid = std::min(ic, mid / (1.0 + cfg_.discharge_bias));
      if (discharge_feasible(s, t_k, ic_mid, mid)) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    id = lo;
    out.discharge_limited = true;
    const double ic_new = std::min(ic, id / (1.0 + cfg_.discharge_bias));
    if (ic_new < ic) {
      ic = ic_new;
      out.charge_limited = true;
    }
  }

  out.i_charge_a = ic;
  out.i_discharge_a = id;
  return out;
}

}  // namespace cellwarm::control
