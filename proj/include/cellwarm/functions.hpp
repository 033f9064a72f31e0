#pragma once

#include <array>
#include <vector>

namespace cellwarm {

// Open-circuit potential as a function of stoichiometry:
//   U(x) = c0 + a*exp(-b*x) + sum_k amp_k * tanh((x*stretch - mu_k) / s_k)
// stretch rescales the argument of every tanh term; the exponential term
// takes the raw stoichiometry.
struct OcpCurve {
  double c0 = 0.0;
  double a = 0.0;
  double b = 0.0;
  double stretch = 1.0;
  std::vector<double> amp;
  std::vector<double> mu;
  std::vector<double> s;

  // Valid for sto in [0, 1]; outside that throws.
  double value(double sto) const;
  double derivative(double sto) const;  // dU/dsto
};

double arrhenius_factor(double activation_j_mol, double t_ref_k, double t_k);

// Bulk electrolyte transport at a reference temperature with Arrhenius
// temperature scaling. diffusivity: pre * exp(slope * c/1000) m^2/s.
// conductivity: cubic in c/1000, S/m.
struct ElectrolyteProps {
  double diff_pre = 0.0;
  double diff_slope = 0.0;
  double diff_activation_j_mol = 0.0;
  std::array<double, 4> cond_poly{0.0, 0.0, 0.0, 0.0};
  double cond_activation_j_mol = 0.0;
  double t_ref_k = 298.15;

  double diffusivity(double ce_mol_m3, double t_k) const;
  double conductivity(double ce_mol_m3, double t_k) const;
};

void check_temperature(double t_k);

}  // namespace cellwarm
