#pragma once

#include <istream>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "cellwarm/rl/policy.hpp"
#include "cellwarm/rl/replay.hpp"
#include "cellwarm/rng.hpp"

namespace cellwarm::rl {

struct TrainerConfig {
  std::string kind = "mpo";  // "mpo" or "awr"
  double gamma = 0.99;
  int batch_size = 256;
  int action_samples = 20;  // proposal draws per state
  double policy_lr = 3e-4;
  double critic_lr = 3e-4;
  double eps_kl = 0.1;     // sample-weighting KL radius
  double eps_mean = 0.01;  // mean-shift KL budget per update
  double eps_cov = 1e-4;   // variance-shift KL budget per update
  double dual_lr = 0.01;
  int target_period = 100;  // updates between hard target copies
  std::size_t min_buffer = 1000;
  int update_every = 2;  // environment steps per gradient update
  std::vector<int> hidden = {64, 64, 64};
  double init_logvar = -0.5;
  double awr_beta = 1.0;
  double awr_weight_max = 20.0;

  void validate() const;
};

struct TrainMetrics {
  double critic_loss = 0.0;
  double policy_objective = 0.0;  // weighted log-likelihood
  double kl_mean = 0.0;
  double kl_cov = 0.0;
  double eta = 0.0;
  double alpha_mean = 0.0;
  double alpha_cov = 0.0;
  double mean_q = 0.0;
  long updates = 0;
};

// One gradient update per call. Serialization starts with the policy block
// (action box + network) so a reader interested only in acting can stop
// there; everything else (targets, critic, optimizer state, duals, config)
// follows.
class Trainer {
 public:
  virtual ~Trainer() = default;
  virtual const char* kind() const = 0;
  virtual const TrainerConfig& config() const = 0;
  virtual GaussianPolicy& policy() = 0;
  virtual const GaussianPolicy& policy() const = 0;
  virtual TrainMetrics update(const ReplayBuffer& buffer, Rng& rng) = 0;
  virtual long update_count() const = 0;
  virtual void save(std::ostream& out) const = 0;
  virtual void load(std::istream& in) = 0;
};

std::unique_ptr<Trainer> make_trainer(const TrainerConfig& cfg, int obs_dim,
                                      const ActionBox& box, Rng& rng);
// Shell with empty networks, for loading a saved trainer of the given kind.
std::unique_ptr<Trainer> make_empty_trainer(const std::string& kind);

void save_trainer_config(std::ostream& out, const TrainerConfig& cfg);
TrainerConfig load_trainer_config(std::istream& in);

}  // namespace cellwarm::rl
