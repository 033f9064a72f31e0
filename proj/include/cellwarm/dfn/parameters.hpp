#pragma once

#include <string>

#include "cellwarm/functions.hpp"
#include "cellwarm/kvfile.hpp"

namespace cellwarm::dfn {

struct ElectrodeParameters {
  double thickness_m = 0.0;
  double porosity = 0.0;         // electrolyte volume fraction
  double active_fraction = 0.0;  // active solid volume fraction
  double bruggeman = 1.5;
  double particle_radius_m = 0.0;
  double surface_area_per_volume_1_m = 0.0;  // interfacial area density a_s
  double cs_max_mol_m3 = 0.0;
  double sto_soc0 = 0.0;   // stoichiometry at 0% state of charge
  double sto_soc100 = 0.0; // stoichiometry at 100%
  double ds_m2_s = 0.0;
  double ds_activation_j_mol = 0.0;
  double k0_m_s = 0.0;     // reaction rate constant at t_ref
  double k0_activation_j_mol = 0.0;
  double alpha = 0.5;      // anodic symmetry factor
  double sigma_s_m = 0.0;  // solid-phase conductivity
  double entropic_scale = 0.0;  // dU/dT = entropic_scale * dU/dsto
  OcpCurve ocp;
};

struct SeparatorParameters {
  double thickness_m = 0.0;
  double porosity = 1.0;
  double bruggeman = 1.5;
};

struct DfnParameters {
  ElectrodeParameters neg, pos;
  SeparatorParameters sep;
  ElectrolyteProps electrolyte;
  double t_plus = 0.4;
  double dlnf_dlnce = 0.0;
  double ce0_mol_m3 = 1000.0;
  double capacity_ah = 0.0;
  double cell_area_m2 = 0.0;  // total cross-section, all units together
  int n_units = 1;
  double v_min = 0.0;
  double v_max = 0.0;
  double t_ref_k = 298.15;

  static DfnParameters from_file(const std::string& path);
  static DfnParameters from_kv(const KvFile& kv);
  void validate() const;

  double total_thickness_m() const {
    return neg.thickness_m + sep.thickness_m + pos.thickness_m;
  }
  // Cell terminal current [A] to current density per unit cross-section
  // [A/m^2]; positive discharges.
  double current_density(double i_cell_a) const { return i_cell_a / cell_area_m2; }
  double one_c_a() const { return capacity_ah; }
};

}  // namespace cellwarm::dfn
