#pragma once

#include <Eigen/Dense>

#include "cellwarm/dfn/mesh.hpp"
#include "cellwarm/dfn/parameters.hpp"

namespace cellwarm::dfn {

// Full electrochemical state at one instant. cs matrices are (n_r shells) x
// (electrode cells); i_loc is the interfacial current density F*j [A/m^2 of
// particle surface], positive when the electrode de-lithiates.
struct ElectrochemState {
  Eigen::VectorXd ce;      // n_cells
  Eigen::VectorXd phi_e;   // n_cells
  Eigen::VectorXd phi_s;   // n_elec
  Eigen::VectorXd i_loc;   // n_elec
  Eigen::MatrixXd cs_neg;  // n_r x n_neg
  Eigen::MatrixXd cs_pos;  // n_r x n_pos
  double i_app_a = 0.0;    // terminal current [A], positive discharges
  double time_s = 0.0;
  double last_residual = 0.0;  // scaled max-norm after the last accepted solve
  int last_iterations = 0;
};

// Uniform state at rest: concentrations set by state of charge, potentials
// at their equilibrium values, zero current everywhere.
ElectrochemState make_equilibrium_state(const DfnParameters& p, const Mesh& m, double soc);

// Volume-weighted mean negative-electrode stoichiometry mapped through the
// stoichiometry window.
double soc(const DfnParameters& p, const Mesh& m, const ElectrochemState& s);

// Lithium inventory per unit cross-section [mol/m^2]: electrolyte plus both
// electrodes' solid phases.
double total_lithium(const DfnParameters& p, const Mesh& m, const ElectrochemState& s);

// Potential difference between the current-collector faces, extrapolated
// from the outermost cells with the applied current.
double terminal_voltage(const DfnParameters& p, const Mesh& m, const ElectrochemState& s);

// Volumetric heat source [W/m^3 of stack]: reaction (irreversible +
// entropic), electrolyte ohmic including the junction term, solid ohmic.
double heat_generation(const DfnParameters& p, const Mesh& m, const ElectrochemState& s,
                       double t_k);

// Surface stoichiometry bounds check helper used by feasibility probes.
double min_plating_margin(const DfnParameters& p, const Mesh& m, const ElectrochemState& s);

}  // namespace cellwarm::dfn
