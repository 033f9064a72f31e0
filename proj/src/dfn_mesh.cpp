#include "cellwarm/dfn/mesh.hpp"

#include <cmath>

#include "cellwarm/dfn/radial.hpp"
#include "cellwarm/errors.hpp"
#include "cellwarm/tridiag.hpp"

namespace cellwarm::dfn {

void MeshSpec::validate() const {
  if (n_neg < 3 || n_sep < 3 || n_pos < 3) {
    throw ConfigError("each region needs at least 3 cells");
  }
  if (n_r < 4) throw ConfigError("particles need at least 4 shells");
  if (!(dt_s > 0.0)) throw ConfigError("dt must be positive");
  if (!(radial_grading >= 1.0)) throw ConfigError("radial grading must be >= 1");
}

namespace {

Mesh::RadialGrid build_radial(double radius, int n_r, double grading) {
  Mesh::RadialGrid g;
  g.r_face.resize(n_r + 1);
  g.r_center.resize(n_r);
  g.shell_vol.resize(n_r);
  g.face_area.resize(n_r + 1);

  // Widths shrink by `grading` per shell toward the surface; index 0 is the
  // widest shell at the center, the thinnest sits under the surface flux.
  double wsum = 0.0;
  Eigen::VectorXd w(n_r);
  for (int k = 0; k < n_r; ++k) {
    w[k] = std::pow(grading, -static_cast<double>(k));
    wsum += w[k];
  }
  w *= radius / wsum;

  g.r_face[0] = 0.0;
  for (int k = 0; k < n_r; ++k) {
    g.r_face[k + 1] = g.r_face[k] + w[k];
    g.r_center[k] = 0.5 * (g.r_face[k] + g.r_face[k + 1]);
  }
  g.r_face[n_r] = radius;  // absorb accumulation roundoff
  for (int k = 0; k <= n_r; ++k) g.face_area[k] = g.r_face[k] * g.r_face[k];
  for (int k = 0; k < n_r; ++k) {
    g.shell_vol[k] =
        (std::pow(g.r_face[k + 1], 3) - std::pow(g.r_face[k], 3)) / 3.0;
  }
  return g;
}

}  // namespace

Mesh::Mesh(const DfnParameters& p, const MeshSpec& sp) : spec(sp) {
  spec.validate();
  n_cells = spec.n_neg + spec.n_sep + spec.n_pos;
  n_elec = spec.n_neg + spec.n_pos;
  neg_begin = 0;
  neg_end = spec.n_neg;
  sep_begin = neg_end;
  sep_end = sep_begin + spec.n_sep;
  pos_begin = sep_end;
  pos_end = n_cells;

  dx.resize(n_cells);
  x_center.resize(n_cells);
  region.resize(n_cells);
  porosity.resize(n_cells);
  brugg_factor.resize(n_cells);
  area_density.resize(n_cells);
  elec_of_cell.assign(n_cells, -1);
  cell_of_elec.clear();
  cell_of_elec.reserve(n_elec);

  double x = 0.0;
  int e = 0;
  for (int i = 0; i < n_cells; ++i) {
    double width;
    if (i < neg_end) {
      width = p.neg.thickness_m / spec.n_neg;
      region[i] = Region::Neg;
      porosity[i] = p.neg.porosity;
      brugg_factor[i] = std::pow(p.neg.porosity, p.neg.bruggeman);
      area_density[i] = p.neg.surface_area_per_volume_1_m;
    } else if (i < sep_end) {
      width = p.sep.thickness_m / spec.n_sep;
      region[i] = Region::Sep;
      porosity[i] = p.sep.porosity;
      brugg_factor[i] = std::pow(p.sep.porosity, p.sep.bruggeman);
      area_density[i] = 0.0;
    } else {
      width = p.pos.thickness_m / spec.n_pos;
      region[i] = Region::Pos;
      porosity[i] = p.pos.porosity;
      brugg_factor[i] = std::pow(p.pos.porosity, p.pos.bruggeman);
      area_density[i] = p.pos.surface_area_per_volume_1_m;
    }
    dx[i] = width;
    x_center[i] = x + 0.5 * width;
    x += width;
    if (region[i] != Region::Sep) {
      elec_of_cell[i] = e++;
      cell_of_elec.push_back(i);
    }
  }

  face_d.resize(n_cells - 1);
  for (int i = 0; i + 1 < n_cells; ++i) face_d[i] = x_center[i + 1] - x_center[i];

  radial_neg = build_radial(p.neg.particle_radius_m, spec.n_r, spec.radial_grading);
  radial_pos = build_radial(p.pos.particle_radius_m, spec.n_r, spec.radial_grading);
}

void RadialSolve::build(const Mesh::RadialGrid& grid, double ds_m2_s, double dt_s) {
  const Eigen::Index n = grid.shell_vol.size();
  lower_.resize(n - 1);
  upper_.resize(n - 1);
  diag_.resize(n);
  vol_over_dt_ = grid.shell_vol / dt_s;
  diag_ = vol_over_dt_;
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    const double drc = grid.r_center[k + 1] - grid.r_center[k];
    const double g = ds_m2_s * grid.face_area[k + 1] / drc;
    diag_[k] += g;
    diag_[k + 1] += g;
    lower_[k] = -g;
    upper_[k] = -g;
  }
  // Unit surface-flux response: rhs has -A_surf in the outermost shell.
  w_ = Eigen::VectorXd::Zero(n);
  w_[n - 1] = -grid.face_area[n];
  tridiag_solve(lower_, diag_, upper_, w_);
  const double half_w = grid.r_face[n] - grid.r_center[n - 1];
  surf_gain_ = w_[n - 1] - half_w / ds_m2_s;
}

void RadialSolve::base_in_place(Eigen::VectorXd& col) const {
  col.array() *= vol_over_dt_.array();
  tridiag_solve(lower_, diag_, upper_, col);
}

}  // namespace cellwarm::dfn
