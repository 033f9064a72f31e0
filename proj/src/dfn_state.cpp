#include "cellwarm/dfn/state.hpp"

#include <cmath>
#include <string>

#include "cellwarm/constants.hpp"
#include "cellwarm/errors.hpp"

namespace cellwarm::dfn {

ElectrochemState make_equilibrium_state(const DfnParameters& p, const Mesh& m, double soc) {
  if (!(soc >= 0.0 && soc <= 1.0)) {
    throw DomainError("state of charge " + std::to_string(soc) + " outside [0, 1]");
  }
  const double sto_n = p.neg.sto_soc0 + soc * (p.neg.sto_soc100 - p.neg.sto_soc0);
  const double sto_p = p.pos.sto_soc0 + soc * (p.pos.sto_soc100 - p.pos.sto_soc0);
  const double u_n = p.neg.ocp.value(sto_n);
  const double u_p = p.pos.ocp.value(sto_p);

  ElectrochemState s;
  s.ce = Eigen::VectorXd::Constant(m.n_cells, p.ce0_mol_m3);
  // Ground so that the negative solid sits at 0; zero overpotential puts the
  // electrolyte at -U_n and the positive solid at the rest voltage.
  s.phi_e = Eigen::VectorXd::Constant(m.n_cells, -u_n);
  s.phi_s = Eigen::VectorXd::Zero(m.n_elec);
  for (int e = 0; e < m.n_elec; ++e) {
    if (m.region[m.cell_of_elec[e]] == Region::Pos) s.phi_s[e] = u_p - u_n;
  }
  s.i_loc = Eigen::VectorXd::Zero(m.n_elec);
  s.cs_neg = Eigen::MatrixXd::Constant(m.spec.n_r, m.spec.n_neg, sto_n * p.neg.cs_max_mol_m3);
  s.cs_pos = Eigen::MatrixXd::Constant(m.spec.n_r, m.spec.n_pos, sto_p * p.pos.cs_max_mol_m3);
  return s;
}

double soc(const DfnParameters& p, const Mesh& m, const ElectrochemState& s) {
  const double shell_total = m.radial_neg.shell_vol.sum();
  double num = 0.0;
  double den = 0.0;
  for (int i = m.neg_begin; i < m.neg_end; ++i) {
    const int e = m.elec_of_cell[i];
    const double mean_c = m.radial_neg.shell_vol.dot(s.cs_neg.col(e)) / shell_total;
    num += m.dx[i] * mean_c;
    den += m.dx[i];
  }
  const double sto = num / den / p.neg.cs_max_mol_m3;
  return (sto - p.neg.sto_soc0) / (p.neg.sto_soc100 - p.neg.sto_soc0);
}

double total_lithium(const DfnParameters& p, const Mesh& m, const ElectrochemState& s) {
  double moles = 0.0;
  for (int i = 0; i < m.n_cells; ++i) moles += m.dx[i] * m.porosity[i] * s.ce[i];
  const double neg_shell_total = m.radial_neg.shell_vol.sum();
  for (int i = m.neg_begin; i < m.neg_end; ++i) {
    const int e = m.elec_of_cell[i];
    const double mean_c = m.radial_neg.shell_vol.dot(s.cs_neg.col(e)) / neg_shell_total;
    moles += m.dx[i] * p.neg.active_fraction * mean_c;
  }
  const double pos_shell_total = m.radial_pos.shell_vol.sum();
  for (int i = m.pos_begin; i < m.pos_end; ++i) {
    const int e = m.elec_of_cell[i] - m.spec.n_neg;
    const double mean_c = m.radial_pos.shell_vol.dot(s.cs_pos.col(e)) / pos_shell_total;
    moles += m.dx[i] * p.pos.active_fraction * mean_c;
  }
  return moles;
}

namespace {

double sigma_eff(const ElectrodeParameters& e) {
  return e.sigma_s_m * std::pow(e.active_fraction, e.bruggeman);
}

double surface_sto(const DfnParameters& p, const Mesh& m, const ElectrochemState& s, int cell) {
  const int last = m.spec.n_r - 1;
  if (m.region[cell] == Region::Neg) {
    return s.cs_neg(last, m.elec_of_cell[cell]) / p.neg.cs_max_mol_m3;
  }
  return s.cs_pos(last, m.elec_of_cell[cell] - m.spec.n_neg) / p.pos.cs_max_mol_m3;
}

}  // namespace

double terminal_voltage(const DfnParameters& p, const Mesh& m, const ElectrochemState& s) {
  const double i_unit = p.current_density(s.i_app_a);
  // Extrapolate from the outermost cell centers to the collector faces with
  // the known face current density.
  const double phi_neg_face =
      s.phi_s[m.elec_of_cell[m.neg_begin]] + i_unit * (0.5 * m.dx[m.neg_begin]) / sigma_eff(p.neg);
  const double phi_pos_face =
      s.phi_s[m.elec_of_cell[m.pos_end - 1]] -
      i_unit * (0.5 * m.dx[m.pos_end - 1]) / sigma_eff(p.pos);
  return phi_pos_face - phi_neg_face;
}

double heat_generation(const DfnParameters& p, const Mesh& m, const ElectrochemState& s,
                       double t_k) {
  double q = 0.0;  // W/m^2 of cross-section, divided by thickness at the end

  // Electrolyte ohmic + junction heating on interior faces; conductivities
  // at harmonic face means.
  for (int i = 0; i + 1 < m.n_cells; ++i) {
    const double d = m.face_d[i];
    const double k_a = p.electrolyte.conductivity(s.ce[i], t_k) * m.brugg_factor[i];
    const double k_b = p.electrolyte.conductivity(s.ce[i + 1], t_k) * m.brugg_factor[i + 1];
    const double kappa_f = 2.0 * k_a * k_b / (k_a + k_b);
    const double kd_f = 2.0 * kGasConstant * t_k / kFaraday * kappa_f * (p.t_plus - 1.0) *
                        (1.0 + p.dlnf_dlnce);
    const double grad_phi = (s.phi_e[i + 1] - s.phi_e[i]) / d;
    const double grad_lnc = (std::log(s.ce[i + 1]) - std::log(s.ce[i])) / d;
    q += d * (kappa_f * grad_phi * grad_phi + kd_f * grad_lnc * grad_phi);
  }

  // Solid ohmic on faces interior to each electrode.
  for (int i = 0; i + 1 < m.n_cells; ++i) {
    if (!m.is_electrode(i) || m.region[i] != m.region[i + 1]) continue;
    const double sig = sigma_eff(m.electrode(p, i));
    const double grad =
        (s.phi_s[m.elec_of_cell[i + 1]] - s.phi_s[m.elec_of_cell[i]]) / m.face_d[i];
    q += m.face_d[i] * sig * grad * grad;
  }
  // Collector faces carry the full current through half a cell each.
  const double i_unit = p.current_density(s.i_app_a);
  q += 0.5 * m.dx[m.neg_begin] * i_unit * i_unit / sigma_eff(p.neg);
  q += 0.5 * m.dx[m.pos_end - 1] * i_unit * i_unit / sigma_eff(p.pos);

  // Reaction heat: irreversible overpotential plus the entropic part.
  for (int e = 0; e < m.n_elec; ++e) {
    const int cell = m.cell_of_elec[e];
    const ElectrodeParameters& el = m.electrode(p, cell);
    const double sto = surface_sto(p, m, s, cell);
    const double eta = s.phi_s[e] - s.phi_e[cell] - el.ocp.value(sto);
    const double du_dt = el.entropic_scale * el.ocp.derivative(sto);
    q += m.dx[cell] * m.area_density[cell] * s.i_loc[e] * (eta + t_k * du_dt);
  }

  return q / p.total_thickness_m();
}

double min_plating_margin(const DfnParameters& p, const Mesh& m, const ElectrochemState& s) {
  (void)p;
  double margin = 1e300;
  for (int i = m.neg_begin; i < m.neg_end; ++i) {
    const int e = m.elec_of_cell[i];
    margin = std::min(margin, s.phi_s[e] - s.phi_e[i]);
  }
  return margin;
}

}  // namespace cellwarm::dfn
