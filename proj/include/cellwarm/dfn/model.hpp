#pragma once

#include <memory>

#include "cellwarm/dfn/mesh.hpp"
#include "cellwarm/dfn/parameters.hpp"
#include "cellwarm/dfn/state.hpp"

namespace cellwarm::dfn {

enum class Fidelity { Full, Reduced };

Fidelity fidelity_from_string(const std::string& name);

// One electrochemical cell advanced at a fixed terminal current and lumped
// temperature. Implementations substep or damp internally; step either
// advances the full dt or throws SolverError leaving the state untouched.
class CellModel {
 public:
  virtual ~CellModel() = default;
  virtual const DfnParameters& params() const = 0;
  virtual const Mesh& mesh() const = 0;
  // i_cell_a > 0 discharges. t_k is the lumped cell temperature for this step.
  virtual void step(ElectrochemState& s, double i_cell_a, double t_k, double dt_s) = 0;
  ElectrochemState initial_state(double soc_frac) const {
    return make_equilibrium_state(params(), mesh(), soc_frac);
  }
};

std::unique_ptr<CellModel> make_cell_model(const DfnParameters& p, const MeshSpec& spec,
                                           Fidelity fidelity);

}  // namespace cellwarm::dfn
