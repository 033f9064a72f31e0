#pragma once

#include <Eigen/Dense>
#include <istream>
#include <ostream>
#include <vector>

#include "cellwarm/rl/mlp.hpp"
#include "cellwarm/rng.hpp"

namespace cellwarm::rl {

// Maps unbounded decision variables u onto the box [lo, hi] elementwise:
//   a = lo + (hi - lo) * (tanh(u) + 1) / 2.
// The map is fixed (no learned parameters), so likelihoods used for policy
// updates can stay in u space where the distribution is plain Gaussian.
struct ActionBox {
  Eigen::VectorXd lo, hi;

  Eigen::Index dim() const { return lo.size(); }
  Eigen::VectorXd squash(const Eigen::VectorXd& u) const;
  Eigen::VectorXd unsquash(const Eigen::VectorXd& a) const;
  // log|da/du| at u, the density correction between the two spaces.
  double squash_log_det(const Eigen::VectorXd& u) const;

  void save(std::ostream& out) const;
  void load(std::istream& in);
};

constexpr double kLogVarMin = -10.0;
constexpr double kLogVarMax = 2.0;

// Diagonal Gaussian over u. One network produces [mean, log variance]; the
// log variance is clamped to [kLogVarMin, kLogVarMax] and the clamp zeroes
// the gradient outside the bounds.
class GaussianPolicy {
 public:
  GaussianPolicy() = default;
  GaussianPolicy(int obs_dim, const std::vector<int>& hidden, const ActionBox& box,
                 double init_logvar, Rng& rng);

  int obs_dim() const { return net_.spec().input; }
  Eigen::Index act_dim() const { return box_.dim(); }
  const ActionBox& box() const { return box_; }

  struct Eval {
    Mlp::Tape tape;
    Eigen::MatrixXd mu;      // batch x act_dim
    Eigen::MatrixXd logvar;  // clamped
    Eigen::MatrixXd active;  // 1 where the clamp passed the raw value through
  };
  void evaluate(const Eigen::MatrixXd& obs, Eval& ev) const;
  // Pulls (dL/dmu, dL/dlogvar) back to a flat parameter gradient. The clamp
  // mask from `ev` is applied to the logvar branch.
  Eigen::VectorXd backprop(const Eval& ev, const Eigen::MatrixXd& dmu,
                           const Eigen::MatrixXd& dlogvar) const;

  Eigen::VectorXd sample_u(const Eigen::VectorXd& obs, Rng& rng) const;
  Eigen::VectorXd mode_u(const Eigen::VectorXd& obs) const;
  double log_prob_u(const Eigen::VectorXd& obs, const Eigen::VectorXd& u) const;
  // Density of the squashed action a = box.squash(u), evaluated at u.
  double squashed_log_prob(const Eigen::VectorXd& obs, const Eigen::VectorXd& u) const;

  Mlp& net() { return net_; }
  const Mlp& net() const { return net_; }

  void save(std::ostream& out) const;
  void load(std::istream& in);

 private:
  Mlp net_;
  ActionBox box_;
};

// log N(u; mu, diag(exp(logvar))) for one row.
double gaussian_log_prob(const Eigen::VectorXd& u, const Eigen::VectorXd& mu,
                         const Eigen::VectorXd& logvar);

}  // namespace cellwarm::rl
