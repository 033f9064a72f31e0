#include <algorithm>
#include <cmath>
#include <memory>

#include "cellwarm/errors.hpp"
#include "cellwarm/rl/trainer.hpp"
#include "cellwarm/serialize.hpp"
#include "trainers_detail.hpp"

namespace cellwarm::rl {
namespace {

// Advantage-weighted regression with a state-value critic. Simpler and less
// sample-efficient than the primary trainer; kept as a fallback baseline.
class AwrTrainer final : public Trainer {
 public:
  AwrTrainer() = default;

  AwrTrainer(const TrainerConfig& cfg, int obs_dim, const ActionBox& box, Rng& rng) : cfg_(cfg) {
    cfg_.validate();
    policy_ = GaussianPolicy(obs_dim, cfg_.hidden, box, cfg_.init_logvar, rng);
    MlpSpec vs;
    vs.input = obs_dim;
    vs.hidden = cfg_.hidden;
    vs.output = 1;
    critic_ = Mlp(vs, rng);
    target_critic_ = critic_;
    policy_adam_ = Adam(policy_.net().n_params(), cfg_.policy_lr);
    critic_adam_ = Adam(critic_.n_params(), cfg_.critic_lr);
  }

  const char* kind() const override { return "awr"; }
  const TrainerConfig& config() const override { return cfg_; }
  GaussianPolicy& policy() override { return policy_; }
  const GaussianPolicy& policy() const override { return policy_; }
  long update_count() const override { return updates_; }

  TrainMetrics update(const ReplayBuffer& buffer, Rng& rng) override {
    const int B = cfg_.batch_size;
    const Eigen::Index od = policy_.obs_dim();
    const Eigen::Index ad = policy_.act_dim();

    const auto idx = buffer.sample_indices(static_cast<std::size_t>(B), rng);
    Eigen::MatrixXd obs(B, od), u(B, ad), next_obs(B, od);
    Eigen::VectorXd rew(B), cont(B);
    for (int b = 0; b < B; ++b) {
      const Transition& t = buffer.at(idx[static_cast<std::size_t>(b)]);
      obs.row(b) = t.obs.transpose();
      u.row(b) = t.u.transpose();
      next_obs.row(b) = t.next_obs.transpose();
      rew[b] = t.reward;
      cont[b] = t.done ? 0.0 : 1.0;
    }

    Eigen::VectorXd v_next = target_critic_.forward(next_obs);
    Eigen::VectorXd y = rew + cfg_.gamma * cont.cwiseProduct(v_next);

    Mlp::Tape tv;
    Eigen::VectorXd v_pred = critic_.forward(obs, tv);
    Eigen::VectorXd resid = v_pred - y;
    const double critic_loss = resid.squaredNorm() / B;
    Eigen::MatrixXd dv = (2.0 / B) * resid;
    Eigen::VectorXd cgrad = critic_.backward(tv, dv);
    critic_adam_.step(critic_.params(), cgrad);

    // Advantages from the pre-step critic; exponentiated with a hard cap.
    const double max_exponent = std::log(cfg_.awr_weight_max);
    Eigen::VectorXd weight(B);
    for (int b = 0; b < B; ++b) {
      weight[b] = std::exp(std::min((y[b] - v_pred[b]) / cfg_.awr_beta, max_exponent));
    }

    GaussianPolicy::Eval ev;
    policy_.evaluate(obs, ev);
    Eigen::ArrayXXd var = ev.logvar.array().exp();
    Eigen::MatrixXd dmu(B, ad), dlogvar(B, ad);
    double objective = 0.0;
    for (int b = 0; b < B; ++b) {
      double logp = 0.0;
      for (Eigen::Index k = 0; k < ad; ++k) {
        const double diff = u(b, k) - ev.mu(b, k);
        const double z2 = diff * diff / var(b, k);
        dmu(b, k) = -weight[b] * diff / var(b, k);
        dlogvar(b, k) = -weight[b] * 0.5 * (z2 - 1.0);
        logp -= 0.5 * (z2 + ev.logvar(b, k)) + 0.91893853320467274;
      }
      objective += weight[b] * logp;
    }
    objective /= B;
    Eigen::VectorXd pgrad = policy_.backprop(ev, dmu / B, dlogvar / B);
    policy_adam_.step(policy_.net().params(), pgrad);

    ++updates_;
    if (updates_ % cfg_.target_period == 0) target_critic_ = critic_;

    TrainMetrics m;
    m.critic_loss = critic_loss;
    m.policy_objective = objective;
    m.mean_q = v_pred.mean();
    m.updates = updates_;
    return m;
  }

  void save(std::ostream& out) const override {
    policy_.save(out);
    critic_.save(out);
    target_critic_.save(out);
    policy_adam_.save(out);
    critic_adam_.save(out);
    io::write_u64(out, static_cast<std::uint64_t>(updates_));
    save_trainer_config(out, cfg_);
  }

  void load(std::istream& in) override {
    policy_.load(in);
    critic_.load(in);
    target_critic_.load(in);
    policy_adam_.load(in);
    critic_adam_.load(in);
    updates_ = static_cast<long>(io::read_u64(in));
    cfg_ = load_trainer_config(in);
    if (cfg_.kind != "awr") throw ConfigError("checkpoint holds a different trainer kind");
  }

 private:
  TrainerConfig cfg_;
  GaussianPolicy policy_;
  Mlp critic_, target_critic_;
  Adam policy_adam_, critic_adam_;
  long updates_ = 0;
};

}  // namespace

namespace detail {

std::unique_ptr<Trainer> make_awr(const TrainerConfig& cfg, int obs_dim, const ActionBox& box,
                                  Rng& rng) {
  return std::make_unique<AwrTrainer>(cfg, obs_dim, box, rng);
}

std::unique_ptr<Trainer> make_awr_empty() { return std::make_unique<AwrTrainer>(); }

}  // namespace detail
}  // namespace cellwarm::rl
