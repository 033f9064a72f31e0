#pragma once

#include <Eigen/Dense>
#include <istream>
#include <ostream>
#include <vector>

#include "cellwarm/rng.hpp"

namespace cellwarm::rl {

struct MlpSpec {
  int input = 0;
  std::vector<int> hidden;
  int output = 0;
};

// Fully connected network, tanh hidden layers, linear output, double
// precision. Parameters live in one flat vector so optimizers and
// checkpoints treat the network as a single array. Batches are row-major:
// one sample per row.
class Mlp {
 public:
  Mlp() = default;
  Mlp(const MlpSpec& spec, Rng& rng);  // Xavier-uniform weights, zero biases

  const MlpSpec& spec() const { return spec_; }
  Eigen::Index n_params() const { return theta_.size(); }
  Eigen::VectorXd& params() { return theta_; }
  const Eigen::VectorXd& params() const { return theta_; }

  struct Tape {
    Eigen::MatrixXd x;
    std::vector<Eigen::MatrixXd> h;  // post-tanh activations per hidden layer
  };

  Eigen::MatrixXd forward(const Eigen::MatrixXd& x) const;
  Eigen::MatrixXd forward(const Eigen::MatrixXd& x, Tape& tape) const;
  // dy is dLoss/doutput. Returns the flat parameter gradient; when dx is
  // non-null also fills dLoss/dinput.
  Eigen::VectorXd backward(const Tape& tape, const Eigen::MatrixXd& dy,
                           Eigen::MatrixXd* dx = nullptr) const;

  void save(std::ostream& out) const;
  void load(std::istream& in);

 private:
  void index_layers();
  Eigen::Map<const Eigen::MatrixXd> weight(int l) const;
  Eigen::Map<const Eigen::VectorXd> bias(int l) const;

  MlpSpec spec_;
  std::vector<int> sizes_;      // input, hidden..., output
  std::vector<Eigen::Index> w_off_, b_off_;
  Eigen::VectorXd theta_;
};

class Adam {
 public:
  Adam() = default;
  Adam(Eigen::Index n, double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);
  void step(Eigen::VectorXd& params, const Eigen::VectorXd& grad);
  void save(std::ostream& out) const;
  void load(std::istream& in);

 private:
  double lr_ = 1e-3, b1_ = 0.9, b2_ = 0.999, eps_ = 1e-8;
  long t_ = 0;
  Eigen::VectorXd m_, v_;
};

}  // namespace cellwarm::rl
