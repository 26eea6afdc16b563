#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "forge/env.hpp"
#include "forge/nn.hpp"

// PPO learner: on-policy trajectory buffer, generalized advantage
// estimation, the clipped surrogate objective, value regression with
// KL-based early stopping, and the epoch-level training loop.

namespace forge::ppo {

struct PpoConfig {
  double clip_ratio = 0.02;
  double lr_pi = 1e-4;
  double lr_v = 1e-3;
  double gamma = 0.99;
  double lam = 0.97;
  int steps_per_epoch = 4000;
  int epochs = 50;
  int train_pi_iters = 80;
  int train_v_iters = 80;
  double target_kl = 0.01;
  std::vector<int> hidden = {64, 64};
  double log_std_init = -0.6931471805599453;  // log(0.5)
  std::uint64_t seed = 1;
};

struct Transition {
  std::vector<double> state;
  std::vector<double> action;
  double logprob = 0.0;
  double reward = 0.0;
  double value = 0.0;
  bool done = false;
};

// delta_t = r_t + gamma*V(s_{t+1})*(1-done_t) - V(s_t)
// A_t = delta_t + gamma*lam*(1-done_t)*A_{t+1}
// returns = A + V. bootstrap_value stands in for V(s_T) when the last
// transition was truncated rather than terminal.
struct GaeResult {
  std::vector<double> advantages;
  std::vector<double> returns;
};
GaeResult compute_gae(std::span<const double> rewards,
                      std::span<const double> values,
                      std::span<const bool> dones, double bootstrap_value,
                      double gamma, double lam);

// Negated mean of min(r*A, clip(r, 1-eps, 1+eps)*A) with its exact
// gradient w.r.t. logp_new, plus the fraction of clipped samples.
struct ClipObjective {
  double loss = 0.0;
  std::vector<double> dloss_dlogp;
  double clip_frac = 0.0;
};
ClipObjective clipped_objective(std::span<const double> logp_new,
                                std::span<const double> logp_old,
                                std::span<const double> advantages,
                                double eps);

// One epoch's worth of on-policy data. Paths are finished explicitly so
// GAE never bootstraps across episode boundaries.
class TrajectoryBuffer {
 public:
  TrajectoryBuffer(int capacity, double gamma, double lam);

  void store(std::vector<double> state, std::vector<double> action,
             double logprob, double reward, double value);
  // Closes the current path; pass V(s_last) when truncating, 0 at a true
  // episode end. Normalization of advantages happens in update().
  void finish_path(double bootstrap_value);

  bool full() const { return size_ >= capacity_; }
  int size() const { return size_; }
  void clear();

  const std::vector<std::vector<double>>& states() const { return states_; }
  const std::vector<std::vector<double>>& actions() const { return actions_; }
  const std::vector<double>& logprobs() const { return logprobs_; }
  const std::vector<double>& rewards() const { return rewards_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& advantages() { return advantages_; }
  const std::vector<double>& returns() const { return returns_; }

 private:
  int capacity_;
  double gamma_, lam_;
  int size_ = 0;
  int path_start_ = 0;
  std::vector<std::vector<double>> states_, actions_;
  std::vector<double> logprobs_, rewards_, values_, advantages_, returns_;
};

struct UpdateStats {
  double pi_loss = 0.0;
  double v_loss = 0.0;
  double kl = 0.0;
  double clip_frac = 0.0;
  int pi_iters = 0;
};

// Policy gradient steps on the clipped objective with KL early stopping,
// then value regression to the computed returns. Advantages are normalized
// to mean 0 / std 1 in place. Throws std::runtime_error on non-finite loss.
UpdateStats update(TrajectoryBuffer& buffer, nn::GaussianPolicy& policy,
                   nn::Mlp& critic, nn::Adam& pi_opt, nn::Adam& v_opt,
                   const PpoConfig& cfg);

struct TrainMetrics {
  int epoch = 0;
  long steps = 0;
  double mean_return = 0.0;
  double trailing100_return = 0.0;
  double pi_loss = 0.0;
  double v_loss = 0.0;
  double kl = 0.0;
  double clip_frac = 0.0;
  int episodes = 0;
};

// Minimal environment surface the trainer needs; lets the same learner run
// on the forging twin and on the toy sanity environments in the tests.
class RolloutEnv {
 public:
  virtual ~RolloutEnv() = default;
  virtual int state_dim() const = 0;
  virtual int action_dim() const = 0;
  virtual std::vector<double> reset(std::uint64_t seed) = 0;
  struct Step {
    std::vector<double> state;
    double reward = 0.0;
    bool done = false;
  };
  virtual Step step(const std::vector<double>& action) = 0;
};

// Adapter running ForgingEnv episodes in a fixed mode with per-episode
// seeds derived from a base seed.
class ForgingRollout final : public RolloutEnv {
 public:
  ForgingRollout(env::ForgingEnv& env, env::Mode mode, std::uint64_t seed0)
      : env_(env), mode_(mode), next_seed_(seed0) {}
  int state_dim() const override { return env_.state_dim(); }
  int action_dim() const override { return 3; }
  std::vector<double> reset(std::uint64_t seed) override;
  Step step(const std::vector<double>& action) override;

 private:
  env::ForgingEnv& env_;
  env::Mode mode_;
  std::uint64_t next_seed_;
};

struct TrainResult {
  nn::GaussianPolicy policy;
  nn::Mlp critic;
  std::vector<TrainMetrics> metrics;
  double best_trailing_return = 0.0;
  // Parameters of the epoch with the best trailing return.
  std::vector<double> best_policy_params;
  std::vector<double> best_log_std;
  std::vector<double> best_critic_params;
};

TrainResult train(RolloutEnv& env, const PpoConfig& cfg);

// Runs n_episodes with fresh seeds; stochastic samples the policy,
// deterministic uses the mean action.
std::vector<env::EpisodeOutcome> evaluate(nn::GaussianPolicy& policy,
                                          env::ForgingEnv& env, env::Mode mode,
                                          int n_episodes, bool stochastic,
                                          std::uint64_t seed0);

}  // namespace forge::ppo
