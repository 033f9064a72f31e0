#pragma once

#include "cellwarm/dfn/model.hpp"
#include "cellwarm/dfn/radial.hpp"

namespace cellwarm::dfn {

// Reduced model on the same state layout: uniform reaction rate per
// electrode, one representative particle per electrode broadcast across its
// region, implicit electrolyte diffusion with lagged coefficients, and
// closed-form potential profiles. All readouts (voltage, heat, inventory)
// run through the same field-based functions as the full model.
class SpmeModel : public CellModel {
 public:
  SpmeModel(const DfnParameters& p, const MeshSpec& spec);

  const DfnParameters& params() const override { return p_; }
  const Mesh& mesh() const override { return mesh_; }
  void step(ElectrochemState& s, double i_cell_a, double t_k, double dt_s) override;

 private:
  DfnParameters p_;
  Mesh mesh_;
  // Face fraction of the electrolyte current carried at each interior face
  // when the terminal current is 1 (linear ramp in the electrodes, flat in
  // the separator).
  Eigen::VectorXd ie_face_frac_;
};

}  // namespace cellwarm::dfn
