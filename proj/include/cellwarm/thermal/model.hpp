#pragma once

#include <Eigen/Dense>
#include <string>

#include "cellwarm/kvfile.hpp"

namespace cellwarm::thermal {

// One-dimensional through-plane section of the symmetric half stack:
// x = 0 is the mid-plane (insulated by symmetry), x = half_thickness is the
// outer face heated through a contact layer by the film. Edge convection is
// a distributed sink over the slab perimeter.
struct ThermalParameters {
  double conductivity_w_mk = 2.0;
  double rho_c_j_m3k = 1.8e6;
  double h_w_m2k = 10.0;
  double contact_conductivity_w_mk = 2.0;
  double half_thickness_m = 5.3e-3;
  double width_m = 0.137;
  double height_m = 0.207;
  double t_ambient_k = 253.15;
  int n_x = 20;

  static ThermalParameters from_kv(const KvFile& kv, const std::string& prefix = "thermal");
  void validate() const;

  double face_area_m2() const { return width_m * height_m; }
  // Perimeter-to-area ratio converting edge convection into a volumetric sink.
  double edge_coeff_1_m() const {
    return 2.0 * (width_m + height_m) / (width_m * height_m);
  }
  // Heat capacity of the full cell (both symmetric halves) [J/K].
  double full_cell_heat_capacity_j_k() const {
    return rho_c_j_m3k * face_area_m2() * 2.0 * half_thickness_m;
  }
  double full_cell_volume_m3() const { return face_area_m2() * 2.0 * half_thickness_m; }
  // Volume of the modeled half stack, the domain one film heats.
  double half_stack_volume_m3() const { return face_area_m2() * half_thickness_m; }
};

struct TemperatureStats {
  double t_m = 0.0;     // mid-plane
  double t_out = 0.0;   // outer face, under the film
  double t_avg = 0.0;   // volume average
  double t_range = 0.0; // t_out - t_m, signed
};

struct ThermalState {
  Eigen::VectorXd t;           // cell-centered temperatures, size n_x
  double time_s = 0.0;
  double last_face_flux_w_m2 = 0.0;  // conductive inflow at the outer face

  static ThermalState uniform(const ThermalParameters& p, double t_k);
};

// Advances one implicit step. q_gen_w_m3 is the volumetric electrochemical
// heat; q_ptc_cell_w is the total film power delivered to the cell (both
// faces together), of which half enters this half-stack through the contact
// layer.
void step_thermal(ThermalState& s, double q_gen_w_m3, double q_ptc_cell_w,
                  const ThermalParameters& p, double dt_s);

TemperatureStats temperature_stats(const ThermalState& s, const ThermalParameters& p);

}  // namespace cellwarm::thermal
