#include "cellwarm/dfn/parameters.hpp"

#include <cmath>
#include <string>

#include "cellwarm/errors.hpp"

namespace cellwarm::dfn {

namespace {

OcpCurve parse_ocp(const KvFile& kv, const std::string& prefix) {
  OcpCurve c;
  c.c0 = kv.get_double(prefix + ".c0");
  c.a = kv.get_double(prefix + ".exp_amp");
  c.b = kv.get_double(prefix + ".exp_rate");
  c.stretch = kv.get_double(prefix + ".stretch", 1.0);
  c.amp = kv.get_doubles(prefix + ".tanh_amp");
  c.mu = kv.get_doubles(prefix + ".tanh_mu");
  c.s = kv.get_doubles(prefix + ".tanh_scale");
  if (c.amp.size() != c.mu.size() || c.amp.size() != c.s.size()) {
    throw ConfigError(prefix + ": tanh coefficient lists differ in length");
  }
  for (double w : c.s) {
    if (w == 0.0) throw ConfigError(prefix + ": zero tanh width");
  }
  return c;
}

ElectrodeParameters parse_electrode(const KvFile& kv, const std::string& prefix) {
  ElectrodeParameters e;
  e.thickness_m = kv.get_double(prefix + ".thickness_m");
  e.porosity = kv.get_double(prefix + ".porosity");
  e.active_fraction = kv.get_double(prefix + ".active_fraction");
  e.bruggeman = kv.get_double(prefix + ".bruggeman", 1.5);
  e.particle_radius_m = kv.get_double(prefix + ".particle_radius_m");
  e.surface_area_per_volume_1_m = kv.get_double(prefix + ".surface_area_per_volume_1_m");
  e.cs_max_mol_m3 = kv.get_double(prefix + ".cs_max_mol_m3");
  e.sto_soc0 = kv.get_double(prefix + ".sto_soc0");
  e.sto_soc100 = kv.get_double(prefix + ".sto_soc100");
  e.ds_m2_s = kv.get_double(prefix + ".ds_m2_s");
  e.ds_activation_j_mol = kv.get_double(prefix + ".ds_activation_j_mol", 0.0);
  e.k0_m_s = kv.get_double(prefix + ".k0_m_s");
  e.k0_activation_j_mol = kv.get_double(prefix + ".k0_activation_j_mol", 0.0);
  e.alpha = kv.get_double(prefix + ".alpha", 0.5);
  e.sigma_s_m = kv.get_double(prefix + ".sigma_s_m");
  e.entropic_scale = kv.get_double(prefix + ".entropic_scale", 0.0);
  e.ocp = parse_ocp(kv, prefix + ".ocp");
  return e;
}

void check_positive(double v, const std::string& name) {
  if (!(v > 0.0)) throw ConfigError(name + " must be positive");
}

void check_electrode(const ElectrodeParameters& e, const std::string& name) {
  check_positive(e.thickness_m, name + ".thickness_m");
  check_positive(e.particle_radius_m, name + ".particle_radius_m");
  check_positive(e.cs_max_mol_m3, name + ".cs_max_mol_m3");
  check_positive(e.ds_m2_s, name + ".ds_m2_s");
  check_positive(e.k0_m_s, name + ".k0_m_s");
  check_positive(e.sigma_s_m, name + ".sigma_s_m");
  if (!(e.porosity > 0.0 && e.porosity < 1.0)) {
    throw ConfigError(name + ".porosity outside (0, 1)");
  }
  if (!(e.active_fraction > 0.0 && e.active_fraction < 1.0)) {
    throw ConfigError(name + ".active_fraction outside (0, 1)");
  }
  if (e.porosity + e.active_fraction > 1.0 + 1e-12) {
    throw ConfigError(name + ": porosity + active_fraction exceeds 1");
  }
  if (!(e.alpha > 0.0 && e.alpha < 1.0)) {
    throw ConfigError(name + ".alpha outside (0, 1)");
  }
  for (double sto : {e.sto_soc0, e.sto_soc100}) {
    if (!(sto > 0.0 && sto < 1.0)) {
      throw ConfigError(name + ": stoichiometry window endpoint outside (0, 1)");
    }
  }
  if (e.sto_soc0 == e.sto_soc100) {
    throw ConfigError(name + ": degenerate stoichiometry window");
  }
  // Lithium bookkeeping in the species balance uses the configured area
  // density; it must equal the geometric 3*eps/R of the radial grid or the
  // inventory drifts.
  const double geometric = 3.0 * e.active_fraction / e.particle_radius_m;
  if (std::abs(e.surface_area_per_volume_1_m - geometric) > 1e-9 * geometric) {
    throw ConfigError(name + ".surface_area_per_volume_1_m != 3 * active_fraction / radius");
  }
}

}  // namespace

DfnParameters DfnParameters::from_file(const std::string& path) {
  return from_kv(KvFile::load(path));
}

DfnParameters DfnParameters::from_kv(const KvFile& kv) {
  DfnParameters p;
  p.neg = parse_electrode(kv, "neg");
  p.pos = parse_electrode(kv, "pos");
  p.sep.thickness_m = kv.get_double("sep.thickness_m");
  p.sep.porosity = kv.get_double("sep.porosity");
  p.sep.bruggeman = kv.get_double("sep.bruggeman", 1.5);

  p.electrolyte.diff_pre = kv.get_double("electrolyte.diff_pre_m2_s");
  p.electrolyte.diff_slope = kv.get_double("electrolyte.diff_slope");
  p.electrolyte.diff_activation_j_mol = kv.get_double("electrolyte.diff_activation_j_mol", 0.0);
  const auto poly = kv.get_doubles("electrolyte.cond_poly");
  if (poly.size() != 4) throw ConfigError("electrolyte.cond_poly needs 4 coefficients");
  for (int i = 0; i < 4; ++i) p.electrolyte.cond_poly[i] = poly[i];
  p.electrolyte.cond_activation_j_mol = kv.get_double("electrolyte.cond_activation_j_mol", 0.0);

  p.t_plus = kv.get_double("electrolyte.t_plus");
  p.dlnf_dlnce = kv.get_double("electrolyte.dlnf_dlnce", 0.0);
  p.ce0_mol_m3 = kv.get_double("electrolyte.ce0_mol_m3");
  p.capacity_ah = kv.get_double("cell.capacity_ah");
  p.cell_area_m2 = kv.get_double("cell.area_m2");
  p.n_units = static_cast<int>(kv.get_int("cell.n_units", 1));
  p.v_min = kv.get_double("cell.v_min");
  p.v_max = kv.get_double("cell.v_max");
  p.t_ref_k = kv.get_double("cell.t_ref_k", 298.15);
  p.electrolyte.t_ref_k = p.t_ref_k;
  p.validate();
  return p;
}

void DfnParameters::validate() const {
  check_electrode(neg, "neg");
  check_electrode(pos, "pos");
  check_positive(sep.thickness_m, "sep.thickness_m");
  if (!(sep.porosity > 0.0 && sep.porosity <= 1.0)) {
    throw ConfigError("sep.porosity outside (0, 1]");
  }
  if (!(t_plus > 0.0 && t_plus < 1.0)) throw ConfigError("t_plus outside (0, 1)");
  check_positive(ce0_mol_m3, "ce0_mol_m3");
  check_positive(capacity_ah, "cell.capacity_ah");
  check_positive(cell_area_m2, "cell.area_m2");
  if (n_units < 1) throw ConfigError("cell.n_units must be >= 1");
  if (!(v_min > 0.0 && v_max > v_min)) throw ConfigError("voltage window empty");
  check_positive(t_ref_k, "cell.t_ref_k");
  check_positive(electrolyte.diff_pre, "electrolyte.diff_pre_m2_s");
}

}  // namespace cellwarm::dfn
