#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

// Minimal neural substrate: fully connected nets with tanh hidden layers
// and hand-derived backprop, a diagonal-Gaussian policy head with a
// learnable state-independent log-std, and Adam. No autograd framework;
// every gradient is checked against finite differences in the tests.

namespace forge::nn {

class Mlp {
 public:
  // sizes: input, hidden..., output. Hidden activations are tanh, the
  // output layer is linear.
  explicit Mlp(std::vector<int> sizes);

  // Per-layer uniform init scaled by 1/sqrt(fan_in).
  void init_uniform(std::mt19937_64& rng);

  int input_size() const { return sizes_.front(); }
  int output_size() const { return sizes_.back(); }
  const std::vector<int>& sizes() const { return sizes_; }

  // Caches intermediates for the matching backward() call.
  const std::vector<double>& forward(const std::vector<double>& x);

  // Exact gradients of the last forward pass; accumulates into grads() and
  // returns dL/dx. Throws std::logic_error without a cached forward.
  std::vector<double> backward(const std::vector<double>& upstream);

  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }
  std::vector<double>& grads() { return grads_; }
  void zero_grad();
  std::size_t n_params() const { return params_.size(); }

 private:
  std::vector<int> sizes_;
  std::vector<double> params_;  // per layer: row-major W (out x in), then b
  std::vector<double> grads_;
  std::vector<std::size_t> layer_offsets_;
  // Forward cache.
  std::vector<std::vector<double>> acts_;  // acts_[0] = input
  std::vector<double> out_;
  bool cached_ = false;
};

struct GaussianSample {
  std::vector<double> action;
  double logprob = 0.0;
};

class GaussianPolicy {
 public:
  GaussianPolicy(int state_dim, const std::vector<int>& hidden, int act_dim,
                 double log_std_init);

  void init(std::mt19937_64& rng);

  int state_dim() const { return mean_net_.input_size(); }
  int act_dim() const { return mean_net_.output_size(); }

  // a = mu(s) + exp(log_std) * noise, noise ~ N(0, I) drawn from rng.
  GaussianSample sample(const std::vector<double>& state,
                        std::mt19937_64& rng);
  std::vector<double> mean_action(const std::vector<double>& state);

  // log pi(a|s); caches for backward_logprob.
  double logprob(const std::vector<double>& state,
                 const std::vector<double>& action);

  // Accumulates d(upstream * logprob)/d(params) into the mean net grads
  // and log_std_grads. Must follow a logprob() call on the same sample.
  void backward_logprob(double upstream);

  Mlp& mean_net() { return mean_net_; }
  const Mlp& mean_net() const { return mean_net_; }
  std::vector<double>& log_std() { return log_std_; }
  const std::vector<double>& log_std() const { return log_std_; }
  std::vector<double>& log_std_grads() { return log_std_grads_; }
  void zero_grad();

 private:
  Mlp mean_net_;
  std::vector<double> log_std_;
  std::vector<double> log_std_grads_;
  // Cache from the last logprob() call.
  std::vector<double> cached_action_;
  std::vector<double> cached_mean_;
  bool cached_ = false;
};

// Bias-corrected Adam over a flat parameter vector. Rejects non-finite
// gradients with std::invalid_argument.
class Adam {
 public:
  Adam(std::size_t n, double lr, double beta1 = 0.9, double beta2 = 0.999,
       double eps = 1e-8);

  void step(std::span<double> params, std::span<const double> grads);

  double lr() const { return lr_; }
  long t() const { return t_; }
  const std::vector<double>& m() const { return m_; }
  const std::vector<double>& v() const { return v_; }
  void restore(long t, std::vector<double> m, std::vector<double> v);

 private:
  double lr_, beta1_, beta2_, eps_;
  long t_ = 0;
  std::vector<double> m_, v_;
};

// Versioned plain-text checkpoint: layer sizes, all weights, log_std and
// optimizer state, serialized losslessly (printf %.17g round-trips
// doubles exactly).
struct Checkpoint {
  std::string mode;  // "normal" or "warm-holding"
  std::vector<int> policy_sizes;
  std::vector<double> policy_params;
  std::vector<double> log_std;
  std::vector<int> critic_sizes;
  std::vector<double> critic_params;
  long pi_opt_t = 0;
  std::vector<double> pi_opt_m, pi_opt_v;
  long v_opt_t = 0;
  std::vector<double> v_opt_m, v_opt_v;

  void save(const std::string& path) const;
  static Checkpoint load(const std::string& path);
};

}  // namespace forge::nn
