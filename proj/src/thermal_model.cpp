#include "cellwarm/thermal/model.hpp"

#include "cellwarm/errors.hpp"
#include "cellwarm/functions.hpp"
#include "cellwarm/tridiag.hpp"

namespace cellwarm::thermal {

ThermalParameters ThermalParameters::from_kv(const KvFile& kv, const std::string& prefix) {
  ThermalParameters p;
  p.conductivity_w_mk = kv.get_double(prefix + ".conductivity_w_mk");
  p.rho_c_j_m3k = kv.get_double(prefix + ".rho_c_j_m3k");
  p.h_w_m2k = kv.get_double(prefix + ".h_w_m2k");
  p.contact_conductivity_w_mk =
      kv.get_double(prefix + ".contact_conductivity_w_mk", p.conductivity_w_mk);
  p.half_thickness_m = kv.get_double(prefix + ".half_thickness_m");
  p.width_m = kv.get_double(prefix + ".width_m");
  p.height_m = kv.get_double(prefix + ".height_m");
  p.t_ambient_k = kv.get_double(prefix + ".t_ambient_k", p.t_ambient_k);
  p.n_x = static_cast<int>(kv.get_int(prefix + ".n_x", 20));
  p.validate();
  return p;
}

void ThermalParameters::validate() const {
  if (!(conductivity_w_mk > 0.0)) throw ConfigError("thermal conductivity must be positive");
  if (!(contact_conductivity_w_mk > 0.0)) {
    throw ConfigError("contact conductivity must be positive");
  }
  if (!(rho_c_j_m3k > 0.0)) throw ConfigError("volumetric heat capacity must be positive");
  if (h_w_m2k < 0.0) throw ConfigError("convection coefficient must be nonnegative");
  if (!(half_thickness_m > 0.0 && width_m > 0.0 && height_m > 0.0)) {
    throw ConfigError("thermal section dimensions must be positive");
  }
  if (n_x < 3) throw ConfigError("thermal mesh needs at least 3 cells");
  check_temperature(t_ambient_k);
}

ThermalState ThermalState::uniform(const ThermalParameters& p, double t_k) {
  check_temperature(t_k);
  ThermalState s;
  s.t = Eigen::VectorXd::Constant(p.n_x, t_k);
  return s;
}

void step_thermal(ThermalState& s, double q_gen_w_m3, double q_ptc_cell_w,
                  const ThermalParameters& p, double dt_s) {
  if (!(dt_s > 0.0)) throw DomainError("dt must be positive");
  if (q_ptc_cell_w < 0.0) throw DomainError("film power must be nonnegative");
  const int n = p.n_x;
  if (s.t.size() != n) throw ConfigError("thermal state size does not match n_x");
  const double dx = p.half_thickness_m / n;
  const double beta_h = p.edge_coeff_1_m() * p.h_w_m2k;

  // Conductive inflow at the outer face: the film deposits half the cell
  // power per face, carried through the contact layer.
  const double face_flux =
      (p.conductivity_w_mk / p.contact_conductivity_w_mk) * (0.5 * q_ptc_cell_w) /
      p.face_area_m2();

  Eigen::VectorXd lower(n - 1), diag(n), upper(n - 1), rhs(n);
  const double cap = p.rho_c_j_m3k * dx / dt_s;
  for (int i = 0; i < n; ++i) {
    diag[i] = cap + beta_h * dx;
    rhs[i] = cap * s.t[i] + dx * (q_gen_w_m3 + beta_h * p.t_ambient_k);
  }
  const double g = p.conductivity_w_mk / dx;
  for (int i = 0; i + 1 < n; ++i) {
    diag[i] += g;
    diag[i + 1] += g;
    lower[i] = -g;
    upper[i] = -g;
  }
  rhs[n - 1] += face_flux;  // outer face source; mid-plane face is adiabatic

  tridiag_solve(lower, diag, upper, rhs);
  s.t = rhs;
  s.time_s += dt_s;
  s.last_face_flux_w_m2 = face_flux;
}

TemperatureStats temperature_stats(const ThermalState& s, const ThermalParameters& p) {
  TemperatureStats st;
  const int n = static_cast<int>(s.t.size());
  const double dx = p.half_thickness_m / n;
  st.t_m = s.t[0];
  // Face value extrapolated half a cell out with the imposed inflow gradient.
  st.t_out = s.t[n - 1] + s.last_face_flux_w_m2 / p.conductivity_w_mk * (0.5 * dx);
  st.t_avg = s.t.mean();
  st.t_range = st.t_out - st.t_m;
  return st;
}

}  // namespace cellwarm::thermal
