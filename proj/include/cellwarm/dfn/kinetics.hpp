#pragma once

#include "cellwarm/dfn/parameters.hpp"

namespace cellwarm::dfn {

// Exchange current density [A/m^2]:
//   i0 = F * k0(T) * ce^(1-alpha) * (cs_max - cs_surf)^(1-alpha) * cs_surf^alpha
// Throws DomainError when any concentration leaves its open interval.
double exchange_current_density(const ElectrodeParameters& e, double ce_mol_m3,
                                double cs_surf_mol_m3, double t_k, double t_ref_k);

// Interfacial current density from the overpotential:
//   i = i0 * (exp((1-alpha) F eta / RT) - exp(-alpha F eta / RT))
// Positive eta drives de-lithiation. |F eta / RT| > 500 throws
// OverpotentialOverflowError.
double butler_volmer_current(double i0, double eta_v, double t_k, double alpha);

// d(butler_volmer_current)/d(eta).
double butler_volmer_current_deta(double i0, double eta_v, double t_k, double alpha);

// Inverse of butler_volmer_current in eta. Closed-form for alpha = 1/2,
// guarded Newton otherwise.
double invert_butler_volmer(double i0, double i_loc, double t_k, double alpha);

}  // namespace cellwarm::dfn
