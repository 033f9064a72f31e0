#pragma once

#include <memory>

#include "cellwarm/rl/trainer.hpp"

namespace cellwarm::rl::detail {

std::unique_ptr<Trainer> make_mpo(const TrainerConfig& cfg, int obs_dim, const ActionBox& box,
                                  Rng& rng);
std::unique_ptr<Trainer> make_mpo_empty();
std::unique_ptr<Trainer> make_awr(const TrainerConfig& cfg, int obs_dim, const ActionBox& box,
                                  Rng& rng);
std::unique_ptr<Trainer> make_awr_empty();

// Critic input row: observation followed by tanh of the decision variables,
// both already order-1 quantities.
inline Eigen::MatrixXd critic_input(const Eigen::MatrixXd& obs, const Eigen::MatrixXd& u) {
  Eigen::MatrixXd in(obs.rows(), obs.cols() + u.cols());
  in.leftCols(obs.cols()) = obs;
  in.rightCols(u.cols()) = u.array().tanh();
  return in;
}

}  // namespace cellwarm::rl::detail
