#include "cellwarm/dfn/spme_model.hpp"

#include <cmath>

#include "cellwarm/constants.hpp"
#include "cellwarm/dfn/dfn_model.hpp"
#include "cellwarm/dfn/kinetics.hpp"
#include "cellwarm/errors.hpp"
#include "cellwarm/tridiag.hpp"

namespace cellwarm::dfn {

namespace {

double harmonic(double a, double b) { return 2.0 * a * b / (a + b); }

double sigma_eff(const ElectrodeParameters& e) {
  return e.sigma_s_m * std::pow(e.active_fraction, e.bruggeman);
}

}  // namespace

SpmeModel::SpmeModel(const DfnParameters& p, const MeshSpec& spec) : p_(p), mesh_(p, spec) {
  // Fraction of the terminal current carried by the electrolyte at each
  // interior face: linear ramps inside the electrodes, all of it in the
  // separator.
  const double l_tot = p_.total_thickness_m();
  ie_face_frac_.resize(mesh_.n_cells - 1);
  double x = 0.0;
  for (int i = 0; i + 1 < mesh_.n_cells; ++i) {
    x += mesh_.dx[i];
    if (mesh_.region[i] == Region::Neg || mesh_.region[i + 1] == Region::Neg) {
      ie_face_frac_[i] = x / p_.neg.thickness_m;
    } else if (mesh_.region[i] == Region::Pos || mesh_.region[i + 1] == Region::Pos) {
      ie_face_frac_[i] = (l_tot - x) / p_.pos.thickness_m;
    } else {
      ie_face_frac_[i] = 1.0;
    }
    ie_face_frac_[i] = std::min(1.0, std::max(0.0, ie_face_frac_[i]));
  }
}

void SpmeModel::step(ElectrochemState& s, double i_cell_a, double t_k, double dt_s) {
  if (!(dt_s > 0.0)) throw DomainError("dt must be positive");
  check_temperature(t_k);
  const int n = mesh_.n_cells;
  const double i_unit = p_.current_density(i_cell_a);
  const double j_n = i_unit / (p_.neg.surface_area_per_volume_1_m * p_.neg.thickness_m * kFaraday);
  const double j_p = -i_unit / (p_.pos.surface_area_per_volume_1_m * p_.pos.thickness_m * kFaraday);

  // Representative particles, implicit diffusion condensed on the surface flux.
  RadialSolve rs_n, rs_p;
  rs_n.build(mesh_.radial_neg,
             p_.neg.ds_m2_s * arrhenius_factor(p_.neg.ds_activation_j_mol, p_.t_ref_k, t_k), dt_s);
  rs_p.build(mesh_.radial_pos,
             p_.pos.ds_m2_s * arrhenius_factor(p_.pos.ds_activation_j_mol, p_.t_ref_k, t_k), dt_s);
  Eigen::VectorXd cs_n = s.cs_neg.col(0);
  Eigen::VectorXd cs_p = s.cs_pos.col(0);
  rs_n.base_in_place(cs_n);
  rs_p.base_in_place(cs_p);
  const double csurf_n = cs_n[cs_n.size() - 1] + j_n * rs_n.surf_gain();
  const double csurf_p = cs_p[cs_p.size() - 1] + j_p * rs_p.surf_gain();
  cs_n += j_n * rs_n.unit_response();
  cs_p += j_p * rs_p.unit_response();
  if (!(csurf_n > 0.0 && csurf_n < p_.neg.cs_max_mol_m3) || cs_n.minCoeff() <= 0.0) {
    throw SolverError("negative-electrode surface concentration left its range", 0.0, 0);
  }
  if (!(csurf_p > 0.0 && csurf_p < p_.pos.cs_max_mol_m3) || cs_p.minCoeff() <= 0.0) {
    throw SolverError("positive-electrode surface concentration left its range", 0.0, 0);
  }

  // Electrolyte diffusion, implicit with coefficients lagged at the old
  // concentrations; reaction sources are uniform per electrode.
  Eigen::VectorXd lower(n - 1), diag(n), upper(n - 1), rhs(n);
  for (int i = 0; i < n; ++i) {
    diag[i] = mesh_.porosity[i] * mesh_.dx[i] / dt_s;
    rhs[i] = mesh_.porosity[i] * mesh_.dx[i] / dt_s * s.ce[i];
    const double asrc = mesh_.area_density[i] * (1.0 - p_.t_plus);
    if (mesh_.region[i] == Region::Neg) rhs[i] += mesh_.dx[i] * asrc * j_n;
    if (mesh_.region[i] == Region::Pos) rhs[i] += mesh_.dx[i] * asrc * j_p;
  }
  for (int i = 0; i + 1 < n; ++i) {
    const double da = p_.electrolyte.diffusivity(s.ce[i], t_k) * mesh_.brugg_factor[i];
    const double db = p_.electrolyte.diffusivity(s.ce[i + 1], t_k) * mesh_.brugg_factor[i + 1];
    const double g = harmonic(da, db) / mesh_.face_d[i];
    diag[i] += g;
    diag[i + 1] += g;
    lower[i] = -g;
    upper[i] = -g;
  }
  tridiag_solve(lower, diag, upper, rhs);
  Eigen::VectorXd ce = rhs;
  if (ce.minCoeff() <= 0.0) {
    throw SolverError("electrolyte concentration went nonpositive", 0.0, 0);
  }

  // Electrolyte potential by integrating the face current, anchored below.
  Eigen::VectorXd kap(n);
  for (int i = 0; i < n; ++i) {
    kap[i] = p_.electrolyte.conductivity(ce[i], t_k) * mesh_.brugg_factor[i];
  }
  const double kd_factor =
      2.0 * kGasConstant * t_k / kFaraday * (p_.t_plus - 1.0) * (1.0 + p_.dlnf_dlnce);
  Eigen::VectorXd phi_e(n);
  phi_e[0] = 0.0;
  for (int i = 0; i + 1 < n; ++i) {
    const double kf = harmonic(kap[i], kap[i + 1]);
    const double ie_f = i_unit * ie_face_frac_[i];
    const double dlnc = std::log(ce[i + 1]) - std::log(ce[i]);
    phi_e[i + 1] = phi_e[i] + (-ie_f * mesh_.face_d[i] - kd_factor * kf * dlnc) / kf;
  }

  // Region means, dx-weighted.
  auto region_mean = [&](const Eigen::VectorXd& v, int begin, int end) {
    double num = 0.0, den = 0.0;
    for (int i = begin; i < end; ++i) {
      num += v[i] * mesh_.dx[i];
      den += mesh_.dx[i];
    }
    return num / den;
  };
  const double ce_n = region_mean(ce, mesh_.neg_begin, mesh_.neg_end);
  const double ce_p = region_mean(ce, mesh_.pos_begin, mesh_.pos_end);

  const double i0_n = exchange_current_density(p_.neg, ce_n, csurf_n, t_k, p_.t_ref_k);
  const double i0_p = exchange_current_density(p_.pos, ce_p, csurf_p, t_k, p_.t_ref_k);
  const double il_n = kFaraday * j_n;
  const double il_p = kFaraday * j_p;
  const double eta_n = invert_butler_volmer(i0_n, il_n, t_k, p_.neg.alpha);
  const double eta_p = invert_butler_volmer(i0_p, il_p, t_k, p_.pos.alpha);
  const double u_n = p_.neg.ocp.value(csurf_n / p_.neg.cs_max_mol_m3);
  const double u_p = p_.pos.ocp.value(csurf_p / p_.pos.cs_max_mol_m3);

  // Solid potentials: integrate the solid current profile; the negative
  // collector face is the ground.
  const double sig_n = sigma_eff(p_.neg);
  const double sig_p = sigma_eff(p_.pos);
  Eigen::VectorXd phi_s(mesh_.n_elec);
  phi_s[0] = -i_unit * 0.5 * mesh_.dx[mesh_.neg_begin] / sig_n;
  for (int i = mesh_.neg_begin; i + 1 < mesh_.neg_end; ++i) {
    const double is_f = i_unit * (1.0 - ie_face_frac_[i]);
    phi_s[mesh_.elec_of_cell[i + 1]] =
        phi_s[mesh_.elec_of_cell[i]] - is_f / sig_n * mesh_.face_d[i];
  }
  // Anchor the electrolyte so the negative reaction balance holds on means.
  const double phis_n_mean = [&] {
    double num = 0.0, den = 0.0;
    for (int i = mesh_.neg_begin; i < mesh_.neg_end; ++i) {
      num += phi_s[mesh_.elec_of_cell[i]] * mesh_.dx[i];
      den += mesh_.dx[i];
    }
    return num / den;
  }();
  const double phie_n_mean = region_mean(phi_e, mesh_.neg_begin, mesh_.neg_end);
  const double shift = phis_n_mean - u_n - eta_n - phie_n_mean;
  phi_e.array() += shift;

  Eigen::VectorXd phis_p_rel(mesh_.spec.n_pos);
  phis_p_rel[0] = 0.0;
  for (int i = mesh_.pos_begin; i + 1 < mesh_.pos_end; ++i) {
    const double is_f = i_unit * (1.0 - ie_face_frac_[i]);
    const int k = i - mesh_.pos_begin;
    phis_p_rel[k + 1] = phis_p_rel[k] - is_f / sig_p * mesh_.face_d[i];
  }
  double rel_mean = 0.0, den = 0.0;
  for (int i = mesh_.pos_begin; i < mesh_.pos_end; ++i) {
    rel_mean += phis_p_rel[i - mesh_.pos_begin] * mesh_.dx[i];
    den += mesh_.dx[i];
  }
  rel_mean /= den;
  const double phie_p_mean = region_mean(phi_e, mesh_.pos_begin, mesh_.pos_end);
  const double offset = phie_p_mean + u_p + eta_p - rel_mean;
  for (int i = mesh_.pos_begin; i < mesh_.pos_end; ++i) {
    phi_s[mesh_.elec_of_cell[i]] = phis_p_rel[i - mesh_.pos_begin] + offset;
  }

  // Commit.
  s.ce = ce;
  s.phi_e = phi_e;
  s.phi_s = phi_s;
  for (int e = 0; e < mesh_.n_elec; ++e) {
    s.i_loc[e] = mesh_.region[mesh_.cell_of_elec[e]] == Region::Neg ? il_n : il_p;
  }
  for (int c = 0; c < s.cs_neg.cols(); ++c) s.cs_neg.col(c) = cs_n;
  for (int c = 0; c < s.cs_pos.cols(); ++c) s.cs_pos.col(c) = cs_p;
  s.i_app_a = i_cell_a;
  s.time_s += dt_s;
  s.last_residual = 0.0;
  s.last_iterations = 1;
}

Fidelity fidelity_from_string(const std::string& name) {
  if (name == "dfn" || name == "full") return Fidelity::Full;
  if (name == "reduced" || name == "spme") return Fidelity::Reduced;
  throw ConfigError("unknown fidelity '" + name + "' (expected dfn or reduced)");
}

std::unique_ptr<CellModel> make_cell_model(const DfnParameters& p, const MeshSpec& spec,
                                           Fidelity fidelity) {
  if (fidelity == Fidelity::Full) return std::make_unique<DfnModel>(p, spec);
  return std::make_unique<SpmeModel>(p, spec);
}

}  // namespace cellwarm::dfn
