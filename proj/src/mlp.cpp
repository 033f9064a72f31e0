#include "cellwarm/rl/mlp.hpp"

#include <cmath>

#include "cellwarm/errors.hpp"
#include "cellwarm/serialize.hpp"

namespace cellwarm::rl {

void Mlp::index_layers() {
  sizes_.clear();
  sizes_.push_back(spec_.input);
  for (int h : spec_.hidden) sizes_.push_back(h);
  sizes_.push_back(spec_.output);
  for (int s : sizes_) {
    if (s < 1) throw ConfigError("network layer sizes must be positive");
  }
  w_off_.clear();
  b_off_.clear();
  Eigen::Index off = 0;
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    w_off_.push_back(off);
    off += static_cast<Eigen::Index>(sizes_[l + 1]) * sizes_[l];
    b_off_.push_back(off);
    off += sizes_[l + 1];
  }
  if (theta_.size() != off) theta_ = Eigen::VectorXd::Zero(off);
}

Mlp::Mlp(const MlpSpec& spec, Rng& rng) : spec_(spec) {
  index_layers();
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    const int fan_in = sizes_[l];
    const int fan_out = sizes_[l + 1];
    const double a = std::sqrt(6.0 / (fan_in + fan_out));
    const Eigen::Index n = static_cast<Eigen::Index>(fan_in) * fan_out;
    for (Eigen::Index k = 0; k < n; ++k) {
      theta_[w_off_[l] + k] = rng.uniform(-a, a);
    }
  }
}

Eigen::Map<const Eigen::MatrixXd> Mlp::weight(int l) const {
  return {theta_.data() + w_off_[l], sizes_[l + 1], sizes_[l]};
}

Eigen::Map<const Eigen::VectorXd> Mlp::bias(int l) const {
  return {theta_.data() + b_off_[l], sizes_[l + 1]};
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& x) const {
  Tape tape;
  return forward(x, tape);
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& x, Tape& tape) const {
  if (x.cols() != spec_.input) throw ConfigError("network input width mismatch");
  tape.x = x;
  tape.h.clear();
  Eigen::MatrixXd cur = x;
  const int n_layers = static_cast<int>(sizes_.size()) - 1;
  for (int l = 0; l < n_layers; ++l) {
    Eigen::MatrixXd z = cur * weight(l).transpose();
    z.rowwise() += bias(l).transpose();
    if (l + 1 < n_layers) {
      cur = z.array().tanh();
      tape.h.push_back(cur);
    } else {
      cur = std::move(z);
    }
  }
  return cur;
}

Eigen::VectorXd Mlp::backward(const Tape& tape, const Eigen::MatrixXd& dy,
                              Eigen::MatrixXd* dx) const {
  const int n_layers = static_cast<int>(sizes_.size()) - 1;
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(theta_.size());
  Eigen::MatrixXd delta = dy;
  for (int l = n_layers - 1; l >= 0; --l) {
    const Eigen::MatrixXd& input = l == 0 ? tape.x : tape.h[l - 1];
    Eigen::Map<Eigen::MatrixXd>(grad.data() + w_off_[l], sizes_[l + 1], sizes_[l]) =
        delta.transpose() * input;
    Eigen::Map<Eigen::VectorXd>(grad.data() + b_off_[l], sizes_[l + 1]) =
        delta.colwise().sum().transpose();
    if (l > 0) {
      delta = (delta * weight(l)).eval();
      delta.array() *= 1.0 - tape.h[l - 1].array().square();
    } else if (dx != nullptr) {
      *dx = delta * weight(0);
    }
  }
  return grad;
}

void Mlp::save(std::ostream& out) const {
  io::write_u64(out, static_cast<std::uint64_t>(spec_.input));
  io::write_u64(out, spec_.hidden.size());
  for (int h : spec_.hidden) io::write_u64(out, static_cast<std::uint64_t>(h));
  io::write_u64(out, static_cast<std::uint64_t>(spec_.output));
  io::write_vec(out, theta_);
}

void Mlp::load(std::istream& in) {
  spec_.input = static_cast<int>(io::read_u64(in));
  spec_.hidden.resize(io::read_u64(in));
  for (int& h : spec_.hidden) h = static_cast<int>(io::read_u64(in));
  spec_.output = static_cast<int>(io::read_u64(in));
  theta_.resize(0);
  index_layers();
  Eigen::VectorXd loaded = io::read_vec(in);
  if (loaded.size() != theta_.size()) throw ConfigError("network parameter count mismatch");
  theta_ = std::move(loaded);
}

Adam::Adam(Eigen::Index n, double lr, double beta1, double beta2, double eps)
    : lr_(lr), b1_(beta1), b2_(beta2), eps_(eps), t_(0) {
  m_ = Eigen::VectorXd::Zero(n);
  v_ = Eigen::VectorXd::Zero(n);
}

void Adam::step(Eigen::VectorXd& params, const Eigen::VectorXd& grad) {
  if (params.size() != m_.size() || grad.size() != m_.size()) {
    throw ConfigError("optimizer state size mismatch");
  }
  ++t_;
  m_ = b1_ * m_ + (1.0 - b1_) * grad;
  v_ = b2_ * v_.array().matrix() + (1.0 - b2_) * grad.array().square().matrix();
  const double c1 = 1.0 - std::pow(b1_, t_);
  const double c2 = 1.0 - std::pow(b2_, t_);
  params.array() -= lr_ * (m_.array() / c1) / ((v_.array() / c2).sqrt() + eps_);
}

void Adam::save(std::ostream& out) const {
  io::write_f64(out, lr_);
  io::write_f64(out, b1_);
  io::write_f64(out, b2_);
  io::write_f64(out, eps_);
  io::write_u64(out, static_cast<std::uint64_t>(t_));
  io::write_vec(out, m_);
  io::write_vec(out, v_);
}

void Adam::load(std::istream& in) {
  lr_ = io::read_f64(in);
  b1_ = io::read_f64(in);
  b2_ = io::read_f64(in);
  eps_ = io::read_f64(in);
  t_ = static_cast<long>(io::read_u64(in));
  m_ = io::read_vec(in);
  v_ = io::read_vec(in);
}

}  // namespace cellwarm::rl
