#include "cellwarm/dfn/dfn_model.hpp"

#include <cmath>
#include <vector>

#include "cellwarm/constants.hpp"
#include "cellwarm/dfn/kinetics.hpp"
#include "cellwarm/errors.hpp"

namespace cellwarm::dfn {

namespace {

double harmonic(double a, double b) { return 2.0 * a * b / (a + b); }

double sigma_eff(const ElectrodeParameters& e) {
  return e.sigma_s_m * std::pow(e.active_fraction, e.bruggeman);
}

constexpr double kCeFloor = 1e-3;  // mol/m^3, hard positivity floor

}  // namespace

// Everything fixed during one implicit solve: old concentrations, condensed
// particle responses, coefficients that depend only on temperature.
struct DfnModel::StepContext {
  double i_unit = 0.0;
  double t_k = 0.0;
  double dt = 0.0;
  double f = 0.0;        // F/RT
  double kd_factor = 0.0;  // 2RT/F * (t_plus - 1) * (1 + dlnf)
  Eigen::VectorXd ce_old;
  RadialSolve rs_neg, rs_pos;
  Eigen::MatrixXd base_neg, base_pos;  // M^{-1} (V/dt) cs_old
  Eigen::VectorXd base_surf;           // per electrode cell
  Eigen::VectorXd surf_gain;           // per electrode cell (dc_surf / dj)
};

DfnModel::DfnModel(const DfnParameters& p, const MeshSpec& spec)
    : DfnModel(p, spec, Options()) {}

DfnModel::DfnModel(const DfnParameters& p, const MeshSpec& spec, Options opt)
    : p_(p), mesh_(p, spec), opt_(opt) {
  const int n = mesh_.n_cells;
  const int ne = mesh_.n_elec;
  const int nz = 2 * n + 2 * ne;
  jac_.resize(nz, nz);
  row_scale_.resize(nz);

  const double i_1c = p_.current_density(p_.one_c_a());
  const double phi_scale = i_1c / p_.total_thickness_m();
  for (int i = 0; i < n; ++i) {
    row_scale_[i] = mesh_.porosity[i] * p_.ce0_mol_m3;  // per second
    row_scale_[n + i] = phi_scale;
  }
  for (int e = 0; e < ne; ++e) {
    const int cell = mesh_.cell_of_elec[e];
    const ElectrodeParameters& el = mesh_.electrode(p_, cell);
    const double i_loc_1c = i_1c / (el.surface_area_per_volume_1_m * el.thickness_m);
    row_scale_[2 * n + e] = phi_scale;
    row_scale_[2 * n + ne + e] = std::abs(i_loc_1c);
  }
}

void DfnModel::step(ElectrochemState& s, double i_cell_a, double t_k, double dt_s) {
  if (!(dt_s > 0.0)) throw DomainError("dt must be positive");
  check_temperature(t_k);
  ElectrochemState work = s;
  advance(work, p_.current_density(i_cell_a), t_k, dt_s, 0);
  work.i_app_a = i_cell_a;
  work.time_s = s.time_s + dt_s;
  s = std::move(work);
}

void DfnModel::advance(ElectrochemState& s, double i_unit, double t_k, double dt_s,
                       int depth) {
  // A failed attempt leaves s untouched, so halving restarts cleanly. Domain
  // excursions surface as SolverError so callers see one failure type.
  try {
    solve_implicit(s, i_unit, t_k, dt_s);
    return;
  } catch (const SolverError&) {
    if (depth >= opt_.max_halvings) throw;
  } catch (const DomainError& e) {
    if (depth >= opt_.max_halvings) {
      throw SolverError(std::string("iterate left the model domain: ") + e.what(), 0.0, 0);
    }
  }
  advance(s, i_unit, t_k, 0.5 * dt_s, depth + 1);
  advance(s, i_unit, t_k, 0.5 * dt_s, depth + 1);
}

double DfnModel::residual_norm(const StepContext& ctx, const Eigen::VectorXd& z,
                               Eigen::VectorXd& res) const {
  const int n = mesh_.n_cells;
  const int ne = mesh_.n_elec;
  const auto ce = z.segment(0, n);
  const auto pe = z.segment(n, n);
  const auto ps = z.segment(2 * n, ne);
  const auto il = z.segment(2 * n + ne, ne);
  res.setZero(2 * n + 2 * ne);

  // Per-cell effective transport at this iterate.
  Eigen::VectorXd de(n), kap(n);
  for (int i = 0; i < n; ++i) {
    if (!(ce[i] > 0.0)) throw SolverError("nonpositive electrolyte concentration", 0.0, 0);
    de[i] = p_.electrolyte.diffusivity(ce[i], ctx.t_k) * mesh_.brugg_factor[i];
    kap[i] = p_.electrolyte.conductivity(ce[i], ctx.t_k) * mesh_.brugg_factor[i];
  }

  // Species and electrolyte-charge balances, face fluxes accumulated into
  // both neighbors. Boundary faces carry nothing.
  for (int i = 0; i + 1 < n; ++i) {
    const double d = mesh_.face_d[i];
    const double df = harmonic(de[i], de[i + 1]);
    const double kf = harmonic(kap[i], kap[i + 1]);
    const double kdf = ctx.kd_factor * kf;
    const double g = df * (ce[i + 1] - ce[i]) / d;
    const double h = kf * (pe[i + 1] - pe[i]) / d + kdf * (std::log(ce[i + 1]) - std::log(ce[i])) / d;
    res[i] -= g / mesh_.dx[i];
    res[i + 1] += g / mesh_.dx[i + 1];
    res[n + i] += h / mesh_.dx[i];
    res[n + i + 1] -= h / mesh_.dx[i + 1];
  }
  for (int i = 0; i < n; ++i) {
    res[i] += mesh_.porosity[i] * (ce[i] - ctx.ce_old[i]) / ctx.dt;
    if (mesh_.is_electrode(i)) {
      const int e = mesh_.elec_of_cell[i];
      res[i] -= mesh_.area_density[i] * (1.0 - p_.t_plus) * il[e] / kFaraday;
      res[n + i] += mesh_.area_density[i] * il[e];
    }
  }

  // Solid charge balance, faces interior to each electrode plus the two
  // collector faces; the negative collector face is grounded.
  for (int i = 0; i + 1 < n; ++i) {
    if (!mesh_.is_electrode(i) || mesh_.region[i] != mesh_.region[i + 1]) continue;
    const double sig = sigma_eff(mesh_.electrode(p_, i));
    const double sflux = sig * (ps[mesh_.elec_of_cell[i + 1]] - ps[mesh_.elec_of_cell[i]]) /
                         mesh_.face_d[i];
    res[2 * n + mesh_.elec_of_cell[i]] += sflux / mesh_.dx[i];
    res[2 * n + mesh_.elec_of_cell[i + 1]] -= sflux / mesh_.dx[i + 1];
  }
  {
    const int i0 = mesh_.neg_begin;
    const double sig = sigma_eff(p_.neg);
    const double s_l = sig * ps[mesh_.elec_of_cell[i0]] / (0.5 * mesh_.dx[i0]);
    res[2 * n + mesh_.elec_of_cell[i0]] -= s_l / mesh_.dx[i0];
    const int i1 = mesh_.pos_end - 1;
    const double s_r = -ctx.i_unit;
    res[2 * n + mesh_.elec_of_cell[i1]] += s_r / mesh_.dx[i1];
  }
  for (int e = 0; e < ne; ++e) {
    const int cell = mesh_.cell_of_elec[e];
    res[2 * n + e] -= mesh_.area_density[cell] * il[e];
  }

  // Reaction closure.
  for (int e = 0; e < ne; ++e) {
    const int cell = mesh_.cell_of_elec[e];
    const ElectrodeParameters& el = mesh_.electrode(p_, cell);
    const double cs_surf = ctx.base_surf[e] + il[e] / kFaraday * ctx.surf_gain[e];
    if (!(cs_surf > 0.0 && cs_surf < el.cs_max_mol_m3)) {
      throw SolverError("surface concentration left (0, cs_max)", 0.0, 0);
    }
    const double i0 = exchange_current_density(el, ce[cell], cs_surf, ctx.t_k, p_.t_ref_k);
    const double eta = ps[e] - pe[cell] - el.ocp.value(cs_surf / el.cs_max_mol_m3);
    res[2 * n + ne + e] = il[e] - butler_volmer_current(i0, eta, ctx.t_k, el.alpha);
  }

  res.array() /= row_scale_.array();
  return res.lpNorm<Eigen::Infinity>();
}

void DfnModel::assemble_jacobian(const StepContext& ctx, const Eigen::VectorXd& z) {
  const int n = mesh_.n_cells;
  const int ne = mesh_.n_elec;
  const auto ce = z.segment(0, n);
  const auto pe = z.segment(n, n);
  const auto ps = z.segment(2 * n, ne);
  const auto il = z.segment(2 * n + ne, ne);

  triplets_.clear();
  auto add = [&](int r, int c, double v) { triplets_.emplace_back(r, c, v / row_scale_[r]); };

  Eigen::VectorXd de(n), kap(n);
  for (int i = 0; i < n; ++i) {
    de[i] = p_.electrolyte.diffusivity(ce[i], ctx.t_k) * mesh_.brugg_factor[i];
    kap[i] = p_.electrolyte.conductivity(ce[i], ctx.t_k) * mesh_.brugg_factor[i];
  }

  for (int i = 0; i < n; ++i) add(i, i, mesh_.porosity[i] / ctx.dt);

  for (int i = 0; i + 1 < n; ++i) {
    const double d = mesh_.face_d[i];
    const double df = harmonic(de[i], de[i + 1]) / d;
    const double kf = harmonic(kap[i], kap[i + 1]) / d;
    const double kdf = ctx.kd_factor * kf;
    // Species flux g = df*(ce[i+1] - ce[i]); res[i] -= g/dx_i, res[i+1] += g/dx_{i+1}.
    add(i, i, df / mesh_.dx[i]);
    add(i, i + 1, -df / mesh_.dx[i]);
    add(i + 1, i + 1, df / mesh_.dx[i + 1]);
    add(i + 1, i, -df / mesh_.dx[i + 1]);
    // Charge flux h = kf*dphi + kdf*dlnc; res[n+i] += h/dx_i, res[n+i+1] -= h/dx_{i+1}.
    add(n + i, n + i, -kf / mesh_.dx[i]);
    add(n + i, n + i + 1, kf / mesh_.dx[i]);
    add(n + i + 1, n + i + 1, -kf / mesh_.dx[i + 1]);
    add(n + i + 1, n + i, kf / mesh_.dx[i + 1]);
    add(n + i, i, -kdf / ce[i] / mesh_.dx[i]);
    add(n + i, i + 1, kdf / ce[i + 1] / mesh_.dx[i]);
    add(n + i + 1, i + 1, -kdf / ce[i + 1] / mesh_.dx[i + 1]);
    add(n + i + 1, i, kdf / ce[i] / mesh_.dx[i + 1]);
  }

  for (int i = 0; i + 1 < n; ++i) {
    if (!mesh_.is_electrode(i) || mesh_.region[i] != mesh_.region[i + 1]) continue;
    const double sig = sigma_eff(mesh_.electrode(p_, i)) / mesh_.face_d[i];
    const int ea = mesh_.elec_of_cell[i];
    const int eb = mesh_.elec_of_cell[i + 1];
    add(2 * n + ea, 2 * n + ea, -sig / mesh_.dx[i]);
    add(2 * n + ea, 2 * n + eb, sig / mesh_.dx[i]);
    add(2 * n + eb, 2 * n + eb, -sig / mesh_.dx[i + 1]);
    add(2 * n + eb, 2 * n + ea, sig / mesh_.dx[i + 1]);
  }
  {
    const int i0 = mesh_.neg_begin;
    const int e0 = mesh_.elec_of_cell[i0];
    const double sig = sigma_eff(p_.neg);
    add(2 * n + e0, 2 * n + e0, -sig / (0.5 * mesh_.dx[i0]) / mesh_.dx[i0]);
  }

  for (int e = 0; e < ne; ++e) {
    const int cell = mesh_.cell_of_elec[e];
    const ElectrodeParameters& el = mesh_.electrode(p_, cell);
    const double a = mesh_.area_density[cell];
    add(cell, 2 * n + ne + e, -a * (1.0 - p_.t_plus) / kFaraday);
    add(n + cell, 2 * n + ne + e, a);
    add(2 * n + e, 2 * n + ne + e, -a);

    const double cs_surf = ctx.base_surf[e] + il[e] / kFaraday * ctx.surf_gain[e];
    const double i0 = exchange_current_density(el, ce[cell], cs_surf, ctx.t_k, p_.t_ref_k);
    const double theta = cs_surf / el.cs_max_mol_m3;
    const double eta = ps[e] - pe[cell] - el.ocp.value(theta);
    const double arg = ctx.f * eta;
    const double e1 = std::exp((1.0 - el.alpha) * arg);
    const double e2 = std::exp(-el.alpha * arg);
    const double bv = e1 - e2;
    const double dbv_deta = ctx.f * ((1.0 - el.alpha) * e1 + el.alpha * e2);
    const double di0_dcs = i0 * (el.alpha / cs_surf - (1.0 - el.alpha) / (el.cs_max_mol_m3 - cs_surf));
    const double dcs_dil = ctx.surf_gain[e] / kFaraday;
    const double du_dcs = el.ocp.derivative(theta) / el.cs_max_mol_m3;

    const int row = 2 * n + ne + e;
    add(row, row, 1.0 - dcs_dil * (di0_dcs * bv - i0 * dbv_deta * du_dcs));
    add(row, 2 * n + e, -i0 * dbv_deta);
    add(row, n + cell, i0 * dbv_deta);
    add(row, cell, -(1.0 - el.alpha) * i0 / ce[cell] * bv);
  }

  jac_.setFromTriplets(triplets_.begin(), triplets_.end());
}

void DfnModel::solve_implicit(ElectrochemState& s, double i_unit, double t_k, double dt_s) {
  const int n = mesh_.n_cells;
  const int ne = mesh_.n_elec;
  const int nz = 2 * n + 2 * ne;

  StepContext ctx;
  ctx.i_unit = i_unit;
  ctx.t_k = t_k;
  ctx.dt = dt_s;
  ctx.f = kFaraday / (kGasConstant * t_k);
  ctx.kd_factor = 2.0 * kGasConstant * t_k / kFaraday * (p_.t_plus - 1.0) * (1.0 + p_.dlnf_dlnce);
  ctx.ce_old = s.ce;

  const double ds_n = p_.neg.ds_m2_s * arrhenius_factor(p_.neg.ds_activation_j_mol, p_.t_ref_k, t_k);
  const double ds_p = p_.pos.ds_m2_s * arrhenius_factor(p_.pos.ds_activation_j_mol, p_.t_ref_k, t_k);
  ctx.rs_neg.build(mesh_.radial_neg, ds_n, dt_s);
  ctx.rs_pos.build(mesh_.radial_pos, ds_p, dt_s);
  ctx.base_neg = s.cs_neg;
  ctx.base_pos = s.cs_pos;
  for (int c = 0; c < ctx.base_neg.cols(); ++c) {
    Eigen::VectorXd col = ctx.base_neg.col(c);
    ctx.rs_neg.base_in_place(col);
    ctx.base_neg.col(c) = col;
  }
  for (int c = 0; c < ctx.base_pos.cols(); ++c) {
    Eigen::VectorXd col = ctx.base_pos.col(c);
    ctx.rs_pos.base_in_place(col);
    ctx.base_pos.col(c) = col;
  }
  ctx.base_surf.resize(ne);
  ctx.surf_gain.resize(ne);
  const int last = mesh_.spec.n_r - 1;
  for (int e = 0; e < ne; ++e) {
    const int cell = mesh_.cell_of_elec[e];
    if (mesh_.region[cell] == Region::Neg) {
      ctx.base_surf[e] = ctx.base_neg(last, e);
      ctx.surf_gain[e] = ctx.rs_neg.surf_gain();
    } else {
      ctx.base_surf[e] = ctx.base_pos(last, e - mesh_.spec.n_neg);
      ctx.surf_gain[e] = ctx.rs_pos.surf_gain();
    }
  }

  Eigen::VectorXd z(nz);
  z.segment(0, n) = s.ce;
  z.segment(n, n) = s.phi_e;
  z.segment(2 * n, ne) = s.phi_s;
  z.segment(2 * n + ne, ne) = s.i_loc;

  Eigen::VectorXd res(nz), res_trial(nz), z_trial(nz);
  double norm = residual_norm(ctx, z, res);
  int iterations = 0;

  while (norm > opt_.tolerance) {
    if (iterations >= opt_.max_iterations) {
      throw SolverError("implicit step did not converge", norm, iterations);
    }
    assemble_jacobian(ctx, z);
    if (!pattern_analyzed_) {
      lu_.analyzePattern(jac_);
      pattern_analyzed_ = true;
    }
    lu_.factorize(jac_);
    if (lu_.info() != Eigen::Success) {
      throw SolverError("jacobian factorization failed", norm, iterations);
    }
    Eigen::VectorXd delta = lu_.solve(-res);

    // Clip the step so concentrations stay physical and potentials move at
    // most half a volt per iteration.
    double lam = 1.0;
    for (int i = 0; i < n; ++i) {
      if (delta[i] < 0.0) {
        lam = std::min(lam, (z[i] - kCeFloor) / (-delta[i]));
      }
    }
    for (int k = n; k < 2 * n + ne; ++k) {
      const double mag = std::abs(delta[k]);
      if (mag > 0.5) lam = std::min(lam, 0.5 / mag);
    }
    for (int e = 0; e < ne; ++e) {
      const int cell = mesh_.cell_of_elec[e];
      const ElectrodeParameters& el = mesh_.electrode(p_, cell);
      const double band = 1e-9 * el.cs_max_mol_m3;
      const double gain = ctx.surf_gain[e] / kFaraday;
      const double cs_now = ctx.base_surf[e] + z[2 * n + ne + e] * gain;
      const double dcs = delta[2 * n + ne + e] * gain;
      if (dcs < 0.0) lam = std::min(lam, (cs_now - band) / (-dcs));
      if (dcs > 0.0) lam = std::min(lam, (el.cs_max_mol_m3 - band - cs_now) / dcs);
    }
    if (!(lam > 0.0)) throw SolverError("step clipped to zero", norm, iterations);

    bool accepted = false;
    for (int bt = 0; bt <= opt_.max_backtracks; ++bt) {
      z_trial = z + lam * delta;
      double trial_norm;
      try {
        trial_norm = residual_norm(ctx, z_trial, res_trial);
      } catch (const std::exception&) {
        lam *= 0.5;
        continue;
      }
      if (trial_norm <= opt_.tolerance || trial_norm <= (1.0 - 1e-4 * lam) * norm) {
        z = z_trial;
        res = res_trial;
        norm = trial_norm;
        accepted = true;
        break;
      }
      lam *= 0.5;
    }
    if (!accepted) {
      // Near the roundoff floor of the scaled residual the line search cannot
      // descend any further; a norm within two decades of the target is the
      // converged answer, not a failure.
      if (norm <= 100.0 * opt_.tolerance) break;
      throw SolverError("line search stalled", norm, iterations);
    }
    ++iterations;
  }

  s.ce = z.segment(0, n);
  s.phi_e = z.segment(n, n);
  s.phi_s = z.segment(2 * n, ne);
  s.i_loc = z.segment(2 * n + ne, ne);
  for (int e = 0; e < ne; ++e) {
    const int cell = mesh_.cell_of_elec[e];
    const double j = s.i_loc[e] / kFaraday;
    if (mesh_.region[cell] == Region::Neg) {
      s.cs_neg.col(e) = ctx.base_neg.col(e) + j * ctx.rs_neg.unit_response();
    } else {
      const int c = e - mesh_.spec.n_neg;
      s.cs_pos.col(c) = ctx.base_pos.col(c) + j * ctx.rs_pos.unit_response();
    }
  }
  s.last_residual = norm;
  s.last_iterations = iterations;
}

}  // namespace cellwarm::dfn
