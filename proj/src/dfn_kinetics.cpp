#include "cellwarm/dfn/kinetics.hpp"

#include <cmath>
#include <string>

#include "cellwarm/constants.hpp"
#include "cellwarm/errors.hpp"

namespace cellwarm::dfn {

double exchange_current_density(const ElectrodeParameters& e, double ce_mol_m3,
                                double cs_surf_mol_m3, double t_k, double t_ref_k) {
  if (!(ce_mol_m3 > 0.0)) {
    throw DomainError("exchange current: electrolyte concentration must be positive");
  }
  if (!(cs_surf_mol_m3 > 0.0 && cs_surf_mol_m3 < e.cs_max_mol_m3)) {
    throw DomainError("exchange current: surface concentration outside (0, cs_max)");
  }
  check_temperature(t_k);
  const double k = e.k0_m_s * arrhenius_factor(e.k0_activation_j_mol, t_ref_k, t_k);
  return kFaraday * k * std::pow(ce_mol_m3, 1.0 - e.alpha) *
         std::pow(e.cs_max_mol_m3 - cs_surf_mol_m3, 1.0 - e.alpha) *
         std::pow(cs_surf_mol_m3, e.alpha);
}

double butler_volmer_current(double i0, double eta_v, double t_k, double alpha) {
  check_temperature(t_k);
  const double f = kFaraday / (kGasConstant * t_k);
  const double arg = f * eta_v;
  if (std::abs(arg) > 500.0) {
    throw OverpotentialOverflowError("reaction exponent " + std::to_string(arg) +
                                     " exceeds +/-500");
  }
  return i0 * (std::exp((1.0 - alpha) * arg) - std::exp(-alpha * arg));
}

double butler_volmer_current_deta(double i0, double eta_v, double t_k, double alpha) {
  const double f = kFaraday / (kGasConstant * t_k);
  const double arg = f * eta_v;
  if (std::abs(arg) > 500.0) {
    throw OverpotentialOverflowError("reaction exponent " + std::to_string(arg) +
                                     " exceeds +/-500");
  }
  return i0 * f *
         ((1.0 - alpha) * std::exp((1.0 - alpha) * arg) + alpha * std::exp(-alpha * arg));
}

double invert_butler_volmer(double i0, double i_loc, double t_k, double alpha) {
  check_temperature(t_k);
  if (!(i0 > 0.0)) throw DomainError("exchange current must be positive");
  const double f = kFaraday / (kGasConstant * t_k);
  if (alpha == 0.5) {
    return 2.0 / f * std::asinh(i_loc / (2.0 * i0));
  }
  // Newton on g(eta) = i(eta) - i_loc; monotone increasing, so bisection
  // fallback brackets always exist.
  double eta = 2.0 / f * std::asinh(i_loc / (2.0 * i0));
  for (int it = 0; it < 100; ++it) {
    const double g = butler_volmer_current(i0, eta, t_k, alpha) - i_loc;
    const double dg = butler_volmer_current_deta(i0, eta, t_k, alpha);
    const double step = g / dg;
    eta -= step;
    if (std::abs(step) < 1e-14 * (1.0 + std::abs(eta))) return eta;
  }
  throw SolverError("reaction inversion did not converge", 0.0, 100);
}

}  // namespace cellwarm::dfn
