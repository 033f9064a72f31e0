#include <algorithm>
#include <cmath>
#include <memory>
#include <utility>

#include "cellwarm/errors.hpp"
#include "cellwarm/rl/trainer.hpp"
#include "cellwarm/serialize.hpp"
#include "trainers_detail.hpp"

namespace cellwarm::rl {

void TrainerConfig::validate() const {
  if (kind != "mpo" && kind != "awr") throw ConfigError("trainer kind must be mpo or awr");
  if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("discount must lie in (0,1)");
  if (batch_size < 2) throw ConfigError("batch size too small");
  if (action_samples < 2) throw ConfigError("need at least two action samples per state");
  if (policy_lr <= 0.0 || critic_lr <= 0.0 || dual_lr <= 0.0) {
    throw ConfigError("learning rates must be positive");
  }
  if (eps_kl <= 0.0 || eps_mean <= 0.0 || eps_cov <= 0.0) {
    throw ConfigError("KL budgets must be positive");
  }
  if (target_period < 1) throw ConfigError("target period must be at least 1");
  if (update_every < 1) throw ConfigError("update interval must be at least 1");
  if (hidden.empty()) throw ConfigError("need at least one hidden layer");
  if (awr_beta <= 0.0 || awr_weight_max <= 1.0) {
    throw ConfigError("advantage temperature must be positive and weight cap above 1");
  }
}

void save_trainer_config(std::ostream& out, const TrainerConfig& cfg) {
  io::write_string(out, cfg.kind);
  io::write_f64(out, cfg.gamma);
  io::write_u64(out, static_cast<std::uint64_t>(cfg.batch_size));
  io::write_u64(out, static_cast<std::uint64_t>(cfg.action_samples));
  io::write_f64(out, cfg.policy_lr);
  io::write_f64(out, cfg.critic_lr);
  io::write_f64(out, cfg.eps_kl);
  io::write_f64(out, cfg.eps_mean);
  io::write_f64(out, cfg.eps_cov);
  io::write_f64(out, cfg.dual_lr);
  io::write_u64(out, static_cast<std::uint64_t>(cfg.target_period));
  io::write_u64(out, cfg.min_buffer);
  io::write_u64(out, static_cast<std::uint64_t>(cfg.update_every));
  io::write_u64(out, cfg.hidden.size());
  for (int h : cfg.hidden) io::write_u64(out, static_cast<std::uint64_t>(h));
  io::write_f64(out, cfg.init_logvar);
  io::write_f64(out, cfg.awr_beta);
  io::write_f64(out, cfg.awr_weight_max);
}

TrainerConfig load_trainer_config(std::istream& in) {
  TrainerConfig cfg;
  cfg.kind = io::read_string(in);
  cfg.gamma = io::read_f64(in);
  cfg.batch_size = static_cast<int>(io::read_u64(in));
  cfg.action_samples = static_cast<int>(io::read_u64(in));
  cfg.policy_lr = io::read_f64(in);
  cfg.critic_lr = io::read_f64(in);
  cfg.eps_kl = io::read_f64(in);
  cfg.eps_mean = io::read_f64(in);
  cfg.eps_cov = io::read_f64(in);
  cfg.dual_lr = io::read_f64(in);
  cfg.target_period = static_cast<int>(io::read_u64(in));
  cfg.min_buffer = io::read_u64(in);
  cfg.update_every = static_cast<int>(io::read_u64(in));
  cfg.hidden.resize(io::read_u64(in));
  for (int& h : cfg.hidden) h = static_cast<int>(io::read_u64(in));
  cfg.init_logvar = io::read_f64(in);
  cfg.awr_beta = io::read_f64(in);
  cfg.awr_weight_max = io::read_f64(in);
  cfg.validate();
  return cfg;
}

namespace {

// Rows of `rows` repeated `m` times each: row b*m+j = rows.row(b).
Eigen::MatrixXd repeat_rows(const Eigen::MatrixXd& rows, int m) {
  Eigen::MatrixXd out(rows.rows() * m, rows.cols());
  for (Eigen::Index b = 0; b < rows.rows(); ++b) {
    out.middleRows(b * m, m).rowwise() = rows.row(b);
  }
  return out;
}

// Draws per-state Gaussian samples; row b*m+j is the j-th draw for state b.
// Consumption order of the generator is (state, sample, component).
Eigen::MatrixXd sample_gaussian_grid(const Eigen::MatrixXd& mu, const Eigen::MatrixXd& logvar,
                                     int m, Rng& rng) {
  const Eigen::Index b_n = mu.rows();
  const Eigen::Index d = mu.cols();
  Eigen::MatrixXd u(b_n * m, d);
  for (Eigen::Index b = 0; b < b_n; ++b) {
    for (int j = 0; j < m; ++j) {
      for (Eigen::Index k = 0; k < d; ++k) {
        u(b * m + j, k) = mu(b, k) + std::exp(0.5 * logvar(b, k)) * rng.normal();
      }
    }
  }
  return u;
}

class MpoTrainer final : public Trainer {
 public:
  MpoTrainer() = default;

  MpoTrainer(const TrainerConfig& cfg, int obs_dim, const ActionBox& box, Rng& rng) : cfg_(cfg) {
    cfg_.validate();
    policy_ = GaussianPolicy(obs_dim, cfg_.hidden, box, cfg_.init_logvar, rng);
    MlpSpec qs;
    qs.input = obs_dim + static_cast<int>(box.dim());
    qs.hidden = cfg_.hidden;
    qs.output = 1;
    critic_ = Mlp(qs, rng);
    target_policy_ = policy_;
    target_critic_ = critic_;
    policy_adam_ = Adam(policy_.net().n_params(), cfg_.policy_lr);
    critic_adam_ = Adam(critic_.n_params(), cfg_.critic_lr);
  }

  const char* kind() const override { return "mpo"; }
  const TrainerConfig& config() const override { return cfg_; }
  GaussianPolicy& policy() override { return policy_; }
  const GaussianPolicy& policy() const override { return policy_; }
  long update_count() const override { return updates_; }

  TrainMetrics update(const ReplayBuffer& buffer, Rng& rng) override;

  void save(std::ostream& out) const override {
    policy_.save(out);
    target_policy_.save(out);
    critic_.save(out);
    target_critic_.save(out);
    policy_adam_.save(out);
    critic_adam_.save(out);
    io::write_f64(out, eta_);
    io::write_f64(out, alpha_mean_);
    io::write_f64(out, alpha_cov_);
    io::write_u64(out, static_cast<std::uint64_t>(updates_));
    save_trainer_config(out, cfg_);
  }

  void load(std::istream& in) override {
    policy_.load(in);
    target_policy_.load(in);
    critic_.load(in);
    target_critic_.load(in);
    policy_adam_.load(in);
    critic_adam_.load(in);
    eta_ = io::read_f64(in);
    alpha_mean_ = io::read_f64(in);
    alpha_cov_ = io::read_f64(in);
    updates_ = static_cast<long>(io::read_u64(in));
    cfg_ = load_trainer_config(in);
    if (cfg_.kind != "mpo") throw ConfigError("checkpoint holds a different trainer kind");
  }

 private:
  TrainerConfig cfg_;
  GaussianPolicy policy_, target_policy_;
  Mlp critic_, target_critic_;
  Adam policy_adam_, critic_adam_;
  double eta_ = 1.0;
  double alpha_mean_ = 1.0;
  double alpha_cov_ = 1.0;
  long updates_ = 0;
};

double rowwise_lse_mean(const Eigen::MatrixXd& q, double eta) {
  double acc = 0.0;
  for (Eigen::Index b = 0; b < q.rows(); ++b) {
    const double mx = q.row(b).maxCoeff() / eta;
    double s = 0.0;
    for (Eigen::Index m = 0; m < q.cols(); ++m) s += std::exp(q(b, m) / eta - mx);
    acc += mx + std::log(s) - std::log(static_cast<double>(q.cols()));
  }
  return acc / static_cast<double>(q.rows());
}

// Minimizes eta*eps + eta*mean_b[logsumexp_m(q/eta) - ln M] over eta. The
// objective is convex in eta; a ternary search over ln(eta) in [-8, 6] is
// deterministic and accurate to far below the duals' own step size.
double solve_eta(const Eigen::MatrixXd& q, double eps) {
  double lo = -8.0, hi = 6.0;
  auto g = [&](double ln_eta) {
    const double eta = std::exp(ln_eta);
    return eta * eps + eta * rowwise_lse_mean(q, eta);
  };
  for (int it = 0; it < 120; ++it) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    if (g(m1) < g(m2)) {
      hi = m2;
    } else {
      lo = m1;
    }
  }
  return std::exp(0.5 * (lo + hi));
}

TrainMetrics MpoTrainer::update(const ReplayBuffer& buffer, Rng& rng) {
  const int B = cfg_.batch_size;
  const int M = cfg_.action_samples;
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

  // Bootstrap value: average target critic over target-policy draws.
  GaussianPolicy::Eval evn;
  target_policy_.evaluate(next_obs, evn);
  Eigen::MatrixXd un = sample_gaussian_grid(evn.mu, evn.logvar, M, rng);
  Eigen::VectorXd qn = target_critic_.forward(detail::critic_input(repeat_rows(next_obs, M), un));
  Eigen::VectorXd v_next(B);
  for (int b = 0; b < B; ++b) v_next[b] = qn.segment(b * M, M).mean();
  Eigen::VectorXd y = rew + cfg_.gamma * cont.cwiseProduct(v_next);

  // Critic regression.
  Mlp::Tape tq;
  Eigen::VectorXd q_pred = critic_.forward(detail::critic_input(obs, u), tq);
  Eigen::VectorXd resid = q_pred - y;
  const double critic_loss = resid.squaredNorm() / B;
  Eigen::MatrixXd dq = (2.0 / B) * resid;
  Eigen::VectorXd cgrad = critic_.backward(tq, dq);
  critic_adam_.step(critic_.params(), cgrad);

  // Proposal draws and their values, then the sample-weight temperature.
  GaussianPolicy::Eval evt;
  target_policy_.evaluate(obs, evt);
  Eigen::MatrixXd ue = sample_gaussian_grid(evt.mu, evt.logvar, M, rng);
  Eigen::VectorXd qe_flat = target_critic_.forward(detail::critic_input(repeat_rows(obs, M), ue));
  Eigen::MatrixXd qe(B, M);
  for (int b = 0; b < B; ++b) qe.row(b) = qe_flat.segment(b * M, M).transpose();
  eta_ = solve_eta(qe, cfg_.eps_kl);
  Eigen::MatrixXd w(B, M);
  for (int b = 0; b < B; ++b) {
    const double mx = qe.row(b).maxCoeff() / eta_;
    double s = 0.0;
    for (int m = 0; m < M; ++m) {
      w(b, m) = std::exp(qe(b, m) / eta_ - mx);
      s += w(b, m);
    }
    w.row(b) /= s;
  }

  // Weighted likelihood step with decoupled KL penalties against the target.
  GaussianPolicy::Eval ev;
  policy_.evaluate(obs, ev);
  Eigen::ArrayXXd var = ev.logvar.array().exp();
  Eigen::ArrayXXd var_t = evt.logvar.array().exp();
  Eigen::MatrixXd dmu = Eigen::MatrixXd::Zero(B, ad);
  Eigen::MatrixXd dlogvar = Eigen::MatrixXd::Zero(B, ad);
  double objective = 0.0;
  for (int b = 0; b < B; ++b) {
    for (int m = 0; m < M; ++m) {
      const double wb = w(b, m);
      double logp = 0.0;
      for (Eigen::Index k = 0; k < ad; ++k) {
        const double diff = ue(b * M + m, k) - ev.mu(b, k);
        const double z2 = diff * diff / var(b, k);
        dmu(b, k) -= wb * diff / var(b, k);
        dlogvar(b, k) -= wb * 0.5 * (z2 - 1.0);
        logp -= 0.5 * (z2 + ev.logvar(b, k)) + 0.91893853320467274;
      }
      objective += wb * logp;
    }
  }
  objective /= B;
  double kl_mean_acc = 0.0, kl_cov_acc = 0.0;
  for (int b = 0; b < B; ++b) {
    for (Eigen::Index k = 0; k < ad; ++k) {
      const double dmean = ev.mu(b, k) - evt.mu(b, k);
      kl_mean_acc += dmean * dmean / (2.0 * var_t(b, k));
      const double ratio = var(b, k) / var_t(b, k);
      kl_cov_acc += 0.5 * (ratio - 1.0 - std::log(ratio));
      dmu(b, k) += alpha_mean_ * dmean / var_t(b, k);
      dlogvar(b, k) += alpha_cov_ * 0.5 * (ratio - 1.0);
    }
  }
  const double kl_mean = kl_mean_acc / B;
  const double kl_cov = kl_cov_acc / B;
  Eigen::VectorXd pgrad = policy_.backprop(ev, dmu / B, dlogvar / B);
  policy_adam_.step(policy_.net().params(), pgrad);

  alpha_mean_ = std::clamp(alpha_mean_ + cfg_.dual_lr * (kl_mean - cfg_.eps_mean), 1e-8, 1e6);
  alpha_cov_ = std::clamp(alpha_cov_ + cfg_.dual_lr * (kl_cov - cfg_.eps_cov), 1e-8, 1e6);

  ++updates_;
  if (updates_ % cfg_.target_period == 0) {
    target_policy_ = policy_;
    target_critic_ = critic_;
  }

  TrainMetrics m;
  m.critic_loss = critic_loss;
  m.policy_objective = objective;
  m.kl_mean = kl_mean;
  m.kl_cov = kl_cov;
  m.eta = eta_;
  m.alpha_mean = alpha_mean_;
  m.alpha_cov = alpha_cov_;
  m.mean_q = q_pred.mean();
  m.updates = updates_;
  return m;
}

}  // namespace

namespace detail {

std::unique_ptr<Trainer> make_mpo(const TrainerConfig& cfg, int obs_dim, const ActionBox& box,
                                  Rng& rng) {
  return std::make_unique<MpoTrainer>(cfg, obs_dim, box, rng);
}

std::unique_ptr<Trainer> make_mpo_empty() { return std::make_unique<MpoTrainer>(); }

}  // namespace detail

std::unique_ptr<Trainer> make_trainer(const TrainerConfig& cfg, int obs_dim, const ActionBox& box,
                                      Rng& rng) {
  cfg.validate();
  if (cfg.kind == "mpo") return detail::make_mpo(cfg, obs_dim, box, rng);
  return detail::make_awr(cfg, obs_dim, box, rng);
}

std::unique_ptr<Trainer> make_empty_trainer(const std::string& kind) {
  if (kind == "mpo") return detail::make_mpo_empty();
  if (kind == "awr") return detail::make_awr_empty();
  throw ConfigError("unknown trainer kind: " + kind);
}

}  // namespace cellwarm::rl
