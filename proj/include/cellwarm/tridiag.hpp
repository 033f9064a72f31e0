#pragma once

#include <Eigen/Dense>

#include "cellwarm/errors.hpp"

namespace cellwarm {

// Thomas algorithm. lower/upper have size n-1, diag and rhs size n; the
// solution overwrites rhs. Stable for the diagonally dominant systems
// produced by implicit diffusion steps.
inline void tridiag_solve(const Eigen::VectorXd& lower, Eigen::VectorXd diag,
                          const Eigen::VectorXd& upper, Eigen::VectorXd& rhs) {
  const Eigen::Index n = diag.size();
  for (Eigen::Index i = 1; i < n; ++i) {
    if (diag[i - 1] == 0.0) throw SolverError("tridiagonal pivot is zero", 0.0, 0);
    const double m = lower[i - 1] / diag[i - 1];
    diag[i] -= m * upper[i - 1];
    rhs[i] -= m * rhs[i - 1];
  }
  if (diag[n - 1] == 0.0) throw SolverError("tridiagonal pivot is zero", 0.0, 0);
  rhs[n - 1] /= diag[n - 1];
  for (Eigen::Index i = n - 2; i >= 0; --i) {
    rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
  }
}

}  // namespace cellwarm
