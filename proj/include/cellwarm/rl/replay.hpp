#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <istream>
#include <ostream>
#include <vector>

#include "cellwarm/rng.hpp"

namespace cellwarm::rl {

struct Transition {
  Eigen::VectorXd obs;       // normalized observation
  Eigen::VectorXd u;         // unsquashed decision variables
  double reward = 0.0;
  Eigen::VectorXd next_obs;
  bool done = false;
  double behavior_log_prob = 0.0;  // u-space density at collection time
};

// Fixed-capacity ring. Once full, new transitions overwrite the oldest.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity = 100000);

  void push(const Transition& t);
  std::size_t size() const { return data_.size(); }
  std::size_t capacity() const { return capacity_; }
  const Transition& at(std::size_t i) const { return data_[i]; }

  // Uniform with replacement.
  std::vector<std::size_t> sample_indices(std::size_t n, Rng& rng) const;

  void save(std::ostream& out) const;
  void load(std::istream& in);

 private:
  std::size_t capacity_;
  std::size_t head_ = 0;  // next overwrite position once full
  std::vector<Transition> data_;
};

}  // namespace cellwarm::rl
