#include "cellwarm/rl/policy.hpp"

#include <cmath>

#include "cellwarm/errors.hpp"
#include "cellwarm/serialize.hpp"

namespace cellwarm::rl {

namespace {
constexpr double kHalfLog2Pi = 0.91893853320467274;  // ln(2*pi)/2
}

Eigen::VectorXd ActionBox::squash(const Eigen::VectorXd& u) const {
  if (u.size() != lo.size()) throw ConfigError("action dimension mismatch");
  return lo.array() + (hi - lo).array() * (u.array().tanh() + 1.0) / 2.0;
}

Eigen::VectorXd ActionBox::unsquash(const Eigen::VectorXd& a) const {
  if (a.size() != lo.size()) throw ConfigError("action dimension mismatch");
  Eigen::ArrayXd s = 2.0 * (a - lo).array() / (hi - lo).array() - 1.0;
  s = s.min(1.0 - 1e-12).max(-1.0 + 1e-12);
  return s.atanh().matrix();
}

double ActionBox::squash_log_det(const Eigen::VectorXd& u) const {
  if (u.size() != lo.size()) throw ConfigError("action dimension mismatch");
  double acc = 0.0;
  for (Eigen::Index k = 0; k < u.size(); ++k) {
    // ln(1 - tanh^2 u) = 2(ln 2 - |u| - ln(1 + exp(-2|u|))), exact and stable.
    const double au = std::abs(u[k]);
    acc += std::log((hi[k] - lo[k]) / 2.0) +
           2.0 * (0.6931471805599453 - au - std::log1p(std::exp(-2.0 * au)));
  }
  return acc;
}

void ActionBox::save(std::ostream& out) const {
  io::write_vec(out, lo);
  io::write_vec(out, hi);
}

void ActionBox::load(std::istream& in) {
  lo = io::read_vec(in);
  hi = io::read_vec(in);
  if (lo.size() != hi.size()) throw ConfigError("action box bounds disagree");
}

GaussianPolicy::GaussianPolicy(int obs_dim, const std::vector<int>& hidden,
                               const ActionBox& box, double init_logvar, Rng& rng)
    : box_(box) {
  if (box_.dim() < 1) throw ConfigError("action box is empty");
  for (Eigen::Index k = 0; k < box_.dim(); ++k) {
    if (!(box_.hi[k] > box_.lo[k])) throw ConfigError("action box bounds must satisfy hi > lo");
  }
  MlpSpec spec;
  spec.input = obs_dim;
  spec.hidden = hidden;
  spec.output = static_cast<int>(2 * box_.dim());
  net_ = Mlp(spec, rng);
  // The output bias is the final segment of the flat parameter vector; its
  // second half feeds the log-variance head.
  auto& th = net_.params();
  th.segment(th.size() - box_.dim(), box_.dim()).setConstant(init_logvar);
}

void GaussianPolicy::evaluate(const Eigen::MatrixXd& obs, Eval& ev) const {
  const Eigen::Index d = box_.dim();
  Eigen::MatrixXd y = net_.forward(obs, ev.tape);
  ev.mu = y.leftCols(d);
  Eigen::MatrixXd raw = y.rightCols(d);
  ev.active = ((raw.array() > kLogVarMin) && (raw.array() < kLogVarMax)).cast<double>();
  ev.logvar = raw.array().min(kLogVarMax).max(kLogVarMin);
}

Eigen::VectorXd GaussianPolicy::backprop(const Eval& ev, const Eigen::MatrixXd& dmu,
                                         const Eigen::MatrixXd& dlogvar) const {
  const Eigen::Index d = box_.dim();
  Eigen::MatrixXd dy(ev.mu.rows(), 2 * d);
  dy.leftCols(d) = dmu;
  dy.rightCols(d) = dlogvar.array() * ev.active.array();
  return net_.backward(ev.tape, dy);
}

Eigen::VectorXd GaussianPolicy::sample_u(const Eigen::VectorXd& obs, Rng& rng) const {
  Eval ev;
  evaluate(obs.transpose(), ev);
  Eigen::VectorXd u(box_.dim());
  for (Eigen::Index k = 0; k < box_.dim(); ++k) {
    u[k] = ev.mu(0, k) + std::exp(0.5 * ev.logvar(0, k)) * rng.normal();
  }
  return u;
}

Eigen::VectorXd GaussianPolicy::mode_u(const Eigen::VectorXd& obs) const {
  Eval ev;
  evaluate(obs.transpose(), ev);
  return ev.mu.row(0).transpose();
}

double GaussianPolicy::log_prob_u(const Eigen::VectorXd& obs, const Eigen::VectorXd& u) const {
  Eval ev;
  evaluate(obs.transpose(), ev);
  return gaussian_log_prob(u, ev.mu.row(0).transpose(), ev.logvar.row(0).transpose());
}

double GaussianPolicy::squashed_log_prob(const Eigen::VectorXd& obs,
                                         const Eigen::VectorXd& u) const {
  return log_prob_u(obs, u) - box_.squash_log_det(u);
}

void GaussianPolicy::save(std::ostream& out) const {
  box_.save(out);
  net_.save(out);
}

void GaussianPolicy::load(std::istream& in) {
  box_.load(in);
  net_.load(in);
  if (net_.spec().output != 2 * box_.dim()) {
    throw ConfigError("policy head width does not match the action box");
  }
}

double gaussian_log_prob(const Eigen::VectorXd& u, const Eigen::VectorXd& mu,
                         const Eigen::VectorXd& logvar) {
  if (u.size() != mu.size() || u.size() != logvar.size()) {
    throw ConfigError("gaussian dimension mismatch");
  }
  double lp = 0.0;
  for (Eigen::Index k = 0; k < u.size(); ++k) {
    const double z2 = (u[k] - mu[k]) * (u[k] - mu[k]) * std::exp(-logvar[k]);
    lp -= 0.5 * (z2 + logvar[k]) + kHalfLog2Pi;
  }
  return lp;
}

}  // namespace cellwarm::rl
