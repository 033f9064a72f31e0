#include "cellwarm/functions.hpp"

#include <cmath>
#include <string>

#include "cellwarm/constants.hpp"
#include "cellwarm/errors.hpp"

namespace cellwarm {

namespace {

void check_sto(double sto) {
  if (!(sto >= 0.0 && sto <= 1.0)) {
    throw DomainError("stoichiometry " + std::to_string(sto) + " outside [0, 1]");
  }
}

}  // namespace

void check_temperature(double t_k) {
  if (!(t_k > 0.0 && t_k <= 2000.0)) {
    throw DomainError("temperature " + std::to_string(t_k) + " K outside (0, 2000]");
  }
}

double OcpCurve::value(double sto) const {
  check_sto(sto);
  double u = c0 + a * std::exp(-b * sto);
  const double x = stretch * sto;
  for (std::size_t k = 0; k < amp.size(); ++k) {
    u += amp[k] * std::tanh((x - mu[k]) / s[k]);
  }
  return u;
}

double OcpCurve::derivative(double sto) const {
  check_sto(sto);
  double du = -a * b * std::exp(-b * sto);
  const double x = stretch * sto;
  for (std::size_t k = 0; k < amp.size(); ++k) {
    const double t = std::tanh((x - mu[k]) / s[k]);
    du += amp[k] * (1.0 - t * t) * stretch / s[k];
  }
  return du;
}

double arrhenius_factor(double activation_j_mol, double t_ref_k, double t_k) {
  check_temperature(t_k);
  check_temperature(t_ref_k);
  return std::exp(activation_j_mol / kGasConstant * (1.0 / t_ref_k - 1.0 / t_k));
}

double ElectrolyteProps::diffusivity(double ce_mol_m3, double t_k) const {
  if (!(ce_mol_m3 > 0.0)) {
    throw DomainError("electrolyte concentration must be positive");
  }
  const double base = diff_pre * std::exp(diff_slope * ce_mol_m3 / 1000.0);
  return base * arrhenius_factor(diff_activation_j_mol, t_ref_k, t_k);
}

double ElectrolyteProps::conductivity(double ce_mol_m3, double t_k) const {
  if (!(ce_mol_m3 > 0.0)) {
    throw DomainError("electrolyte concentration must be positive");
  }
  const double u = ce_mol_m3 / 1000.0;
  const double base = cond_poly[0] + u * (cond_poly[1] + u * (cond_poly[2] + u * cond_poly[3]));
  if (!(base > 0.0)) {
    throw DomainError("conductivity fit is nonpositive at c_e = " + std::to_string(ce_mol_m3));
  }
  return base * arrhenius_factor(cond_activation_j_mol, t_ref_k, t_k);
}

}  // namespace cellwarm
