#pragma once

#include <Eigen/Dense>

#include "cellwarm/dfn/mesh.hpp"

namespace cellwarm::dfn {

// Implicit diffusion step in one spherical particle, condensed so that the
// end-of-step profile is affine in the surface flux j [mol/(m^2 s)]:
//   c_new = base + j * unit_response,   c_surf = base_surf + j * surf_gain
// base is M^{-1} (V/dt) c_old per particle; unit_response and surf_gain
// depend only on the grid, D_s and dt. Positive j de-lithiates.
class RadialSolve {
 public:
  void build(const Mesh::RadialGrid& grid, double ds_m2_s, double dt_s);

  // col := M^{-1} (V/dt) col, one particle's shell concentrations.
  void base_in_place(Eigen::VectorXd& col) const;

  const Eigen::VectorXd& unit_response() const { return w_; }
  double surf_gain() const { return surf_gain_; }
  double surface_unit_response() const { return w_[w_.size() - 1]; }

 private:
  Eigen::VectorXd lower_, diag_, upper_;
  Eigen::VectorXd vol_over_dt_;
  Eigen::VectorXd w_;
  double surf_gain_ = 0.0;
};

}  // namespace cellwarm::dfn
