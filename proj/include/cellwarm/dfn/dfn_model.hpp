#pragma once

#include <Eigen/Sparse>

#include "cellwarm/dfn/model.hpp"
#include "cellwarm/dfn/radial.hpp"

namespace cellwarm::dfn {

// Full through-electrode model. Each implicit step eliminates the particle
// interiors (the radial subproblem is linear in the surface flux) and runs
// damped Newton on [ce, phi_e, phi_s, i_loc]. Transport coefficients are
// refreshed every iterate but their concentration derivatives are not
// assembled, except the junction 1/ce term which is cheap and stabilizing.
class DfnModel : public CellModel {
 public:
  struct Options {
    double tolerance = 1e-10;  // scaled residual max-norm
    int max_iterations = 50;
    int max_backtracks = 8;
    int max_halvings = 4;
  };

  DfnModel(const DfnParameters& p, const MeshSpec& spec);
  DfnModel(const DfnParameters& p, const MeshSpec& spec, Options opt);

  const DfnParameters& params() const override { return p_; }
  const Mesh& mesh() const override { return mesh_; }
  void step(ElectrochemState& s, double i_cell_a, double t_k, double dt_s) override;

 private:
  void advance(ElectrochemState& s, double i_unit, double t_k, double dt_s, int depth);
  void solve_implicit(ElectrochemState& s, double i_unit, double t_k, double dt_s);

  struct StepContext;
  double residual_norm(const StepContext& ctx, const Eigen::VectorXd& z,
                       Eigen::VectorXd& res) const;
  void assemble_jacobian(const StepContext& ctx, const Eigen::VectorXd& z);

  DfnParameters p_;
  Mesh mesh_;
  Options opt_;

  Eigen::SparseMatrix<double> jac_;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_;
  bool pattern_analyzed_ = false;
  std::vector<Eigen::Triplet<double>> triplets_;

  // Residual scales fixed by structure: species rows by eps*ce0 per second,
  // potential rows by the 1C volumetric current, reaction rows per cell by
  // max(i0, 1C interfacial current).
  Eigen::VectorXd row_scale_;
};

}  // namespace cellwarm::dfn
