#pragma once

#include <Eigen/Dense>
#include <vector>

#include "cellwarm/dfn/parameters.hpp"

namespace cellwarm::dfn {

struct MeshSpec {
  int n_neg = 20;
  int n_sep = 20;
  int n_pos = 20;
  int n_r = 20;
  // Radial shell widths shrink geometrically toward the particle surface by
  // this factor per shell, resolving the surface boundary layer that short
  // pulses excite.
  double radial_grading = 1.25;
  double dt_s = 0.05;

  void validate() const;
};

enum class Region { Neg, Sep, Pos };

// Precomputed finite-volume geometry for the through-electrode axis and the
// radial particle axis.
struct Mesh {
  Mesh(const DfnParameters& p, const MeshSpec& spec);

  MeshSpec spec;
  int n_cells = 0;      // total through-thickness cells
  int n_elec = 0;       // electrode cells (both electrodes)
  int neg_begin = 0, neg_end = 0;  // [begin, end) global cell ranges
  int sep_begin = 0, sep_end = 0;
  int pos_begin = 0, pos_end = 0;

  Eigen::VectorXd dx;        // cell widths, size n_cells
  Eigen::VectorXd x_center;  // cell centers
  Eigen::VectorXd face_d;    // center-to-center distance, interior faces (n_cells - 1)
  std::vector<Region> region;          // per cell
  Eigen::VectorXd porosity;            // per cell
  Eigen::VectorXd brugg_factor;        // porosity^bruggeman per cell
  Eigen::VectorXd area_density;        // a_s per cell (0 in separator)
  std::vector<int> elec_of_cell;       // global cell -> electrode-array index, -1 in separator
  std::vector<int> cell_of_elec;       // electrode-array index -> global cell

  // Radial finite volumes per electrode. The 4*pi factor cancels everywhere
  // and is omitted: volumes are r^3/3 differences, areas are face r^2.
  struct RadialGrid {
    Eigen::VectorXd r_face;    // n_r + 1
    Eigen::VectorXd r_center;  // n_r
    Eigen::VectorXd shell_vol;
    Eigen::VectorXd face_area;
  };
  RadialGrid radial_neg, radial_pos;
  const RadialGrid& radial(Region r) const { return r == Region::Neg ? radial_neg : radial_pos; }

  bool is_electrode(int cell) const { return region[cell] != Region::Sep; }
  const ElectrodeParameters& electrode(const DfnParameters& p, int cell) const {
    return region[cell] == Region::Neg ? p.neg : p.pos;
  }
};

}  // namespace cellwarm::dfn
