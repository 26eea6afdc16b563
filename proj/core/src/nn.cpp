#include "forge/nn.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace forge::nn {

Mlp::Mlp(std::vector<int> sizes) : sizes_(std::move(sizes)) {
  if (sizes_.size() < 2) {
    throw std::invalid_argument("Mlp: need at least input and output sizes");
  }
  std::size_t total = 0;
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    layer_offsets_.push_back(total);
    total += static_cast<std::size_t>(sizes_[l + 1]) * sizes_[l] +
             sizes_[l + 1];
  }
  params_.assign(total, 0.0);
  grads_.assign(total, 0.0);
  acts_.resize(sizes_.size());
}

void Mlp::init_uniform(std::mt19937_64& rng) {
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    const int fan_in = sizes_[l];
    const int fan_out = sizes_[l + 1];
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    std::uniform_real_distribution<double> dist(-bound, bound);
    double* w = params_.data() + layer_offsets_[l];
    for (int i = 0; i < fan_out * fan_in; ++i) w[i] = dist(rng);
    // biases start at zero
  }
}

const std::vector<double>& Mlp::forward(const std::vector<double>& x) {
  if (static_cast<int>(x.size()) != sizes_.front()) {
    throw std::invalid_argument("Mlp::forward: input size mismatch");
  }
  acts_[0] = x;
  const std::size_t n_layers = sizes_.size() - 1;
  for (std::size_t l = 0; l < n_layers; ++l) {
    const int in = sizes_[l];
    const int out = sizes_[l + 1];
    const double* w = params_.data() + layer_offsets_[l];
    const double* b = w + static_cast<std::size_t>(out) * in;
    const std::vector<double>& a = acts_[l];
    std::vector<double>& y = acts_[l + 1];
    y.assign(out, 0.0);
    for (int i = 0; i < out; ++i) {
      double s = b[i];
      const double* wi = w + static_cast<std::size_t>(i) * in;
      for (int j = 0; j < in; ++j) s += wi[j] * a[j];
      y[i] = (l + 1 < n_layers) ? std::tanh(s) : s;
    }
  }
  cached_ = true;
  out_ = acts_.back();
  return out_;
}

std::vector<double> Mlp::backward(const std::vector<double>& upstream) {
  if (!cached_) {
    throw std::logic_error("Mlp::backward without a cached forward pass");
  }
  if (static_cast<int>(upstream.size()) != sizes_.back()) {
    throw std::invalid_argument("Mlp::backward: upstream size mismatch");
  }
  const std::size_t n_layers = sizes_.size() - 1;
  std::vector<double> delta = upstream;  // dL/d(activation of layer l+1)
  for (std::size_t l = n_layers; l-- > 0;) {
    const int in = sizes_[l];
    const int out = sizes_[l + 1];
    // tanh' on hidden layers; the output layer is linear.
    if (l + 1 < n_layers) {
      for (int i = 0; i < out; ++i) {
        const double a = acts_[l + 1][i];
        delta[i] *= 1.0 - a * a;
      }
    }
    const double* w = params_.data() + layer_offsets_[l];
    double* gw = grads_.data() + layer_offsets_[l];
    double* gb = gw + static_cast<std::size_t>(out) * in;
    const std::vector<double>& a = acts_[l];
    std::vector<double> prev(in, 0.0);
    for (int i = 0; i < out; ++i) {
      const double d = delta[i];
      gb[i] += d;
      const double* wi = w + static_cast<std::size_t>(i) * in;
      double* gwi = gw + static_cast<std::size_t>(i) * in;
      for (int j = 0; j < in; ++j) {
        gwi[j] += d * a[j];
        prev[j] += d * wi[j];
      }
    }
    delta = std::move(prev);
  }
  return delta;
}

void Mlp::zero_grad() { std::fill(grads_.begin(), grads_.end(), 0.0); }

GaussianPolicy::GaussianPolicy(int state_dim, const std::vector<int>& hidden,
                               int act_dim, double log_std_init)
    : mean_net_([&] {
        std::vector<int> sizes{state_dim};
        sizes.insert(sizes.end(), hidden.begin(), hidden.end());
        sizes.push_back(act_dim);
        return sizes;
      }()) {
  log_std_.assign(act_dim, log_std_init);
  log_std_grads_.assign(act_dim, 0.0);
}

void GaussianPolicy::init(std::mt19937_64& rng) {
  mean_net_.init_uniform(rng);
}

GaussianSample GaussianPolicy::sample(const std::vector<double>& state,
                                      std::mt19937_64& rng) {
  const std::vector<double> mean = mean_net_.forward(state);
  std::normal_distribution<double> normal(0.0, 1.0);
  GaussianSample s;
  s.action.resize(mean.size());
  for (std::size_t i = 0; i < mean.size(); ++i) {
    s.action[i] = mean[i] + std::exp(log_std_[i]) * normal(rng);
  }
  s.logprob = logprob(state, s.action);
  return s;
}

std::vector<double> GaussianPolicy::mean_action(
    const std::vector<double>& state) {
  return mean_net_.forward(state);
}

double GaussianPolicy::logprob(const std::vector<double>& state,
                               const std::vector<double>& action) {
  const std::vector<double> mean = mean_net_.forward(state);
  if (action.size() != mean.size()) {
    throw std::invalid_argument("GaussianPolicy::logprob: action size");
  }
  double lp = 0.0;
  for (std::size_t i = 0; i < mean.size(); ++i) {
    const double sigma = std::exp(log_std_[i]);
    const double z = (action[i] - mean[i]) / sigma;
    lp += -0.5 * z * z - log_std_[i] - 0.5 * std::log(2.0 * std::numbers::pi);
  }
  cached_action_ = action;
  cached_mean_ = mean;
  cached_ = true;
  return lp;
}

void GaussianPolicy::backward_logprob(double upstream) {
  if (!cached_) {
    throw std::logic_error("backward_logprob without a cached logprob");
  }
  const std::size_t n = cached_mean_.size();
  std::vector<double> dmean(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double sigma = std::exp(log_std_[i]);
    const double diff = cached_action_[i] - cached_mean_[i];
    // d logp / d mu = (a - mu) / sigma^2
    dmean[i] = upstream * diff / (sigma * sigma);
    // d logp / d log_sigma = (a - mu)^2 / sigma^2 - 1
    log_std_grads_[i] += upstream * (diff * diff / (sigma * sigma) - 1.0);
  }
  mean_net_.backward(dmean);
}

void GaussianPolicy::zero_grad() {
  mean_net_.zero_grad();
  std::fill(log_std_grads_.begin(), log_std_grads_.end(), 0.0);
}

Adam::Adam(std::size_t n, double lr, double beta1, double beta2, double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps), m_(n, 0.0),
      v_(n, 0.0) {}

void Adam::step(std::span<double> params, std::span<const double> grads) {
  if (params.size() != m_.size() || grads.size() != m_.size()) {
    throw std::invalid_argument("Adam::step: size mismatch");
  }
  for (double g : grads) {
    if (!std::isfinite(g)) {
      throw std::invalid_argument("Adam::step: non-finite gradient");
    }
  }
  t_ += 1;
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < m_.size(); ++i) {
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grads[i];
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grads[i] * grads[i];
    const double mhat = m_[i] / bc1;
    const double vhat = v_[i] / bc2;
    params[i] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
  }
}

void Adam::restore(long t, std::vector<double> m, std::vector<double> v) {
  if (m.size() != m_.size() || v.size() != v_.size()) {
    throw std::invalid_argument("Adam::restore: size mismatch");
  }
  t_ = t;
  m_ = std::move(m);
  v_ = std::move(v);
}

namespace {

constexpr const char* kMagic = "forge-checkpoint";
constexpr int kVersion = 1;

void write_doubles(std::ostream& out, const char* tag,
                   const std::vector<double>& xs) {
  out << tag << ' ' << xs.size();
  char buf[40];
  for (double x : xs) {
    std::snprintf(buf, sizeof(buf), " %.17g", x);
    out << buf;
  }
  out << '\n';
}

void write_ints(std::ostream& out, const char* tag,
                const std::vector<int>& xs) {
  out << tag << ' ' << xs.size();
  for (int x : xs) out << ' ' << x;
  out << '\n';
}

std::vector<double> read_doubles(std::istream& in, const std::string& tag) {
  std::string got;
  std::size_t n;
  if (!(in >> got >> n) || got != tag) {
    throw std::runtime_error("Checkpoint: expected section " + tag);
  }
  std::vector<double> xs(n);
  for (double& x : xs) in >> x;
  if (!in) throw std::runtime_error("Checkpoint: truncated section " + tag);
  return xs;
}

std::vector<int> read_ints(std::istream& in, const std::string& tag) {
  std::string got;
  std::size_t n;
  if (!(in >> got >> n) || got != tag) {
    throw std::runtime_error("Checkpoint: expected section " + tag);
  }
  std::vector<int> xs(n);
  for (int& x : xs) in >> x;
  if (!in) throw std::runtime_error("Checkpoint: truncated section " + tag);
  return xs;
}

}  // namespace

void Checkpoint::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("Checkpoint: cannot write " + path);
  out << kMagic << ' ' << kVersion << '\n';
  out << "mode " << mode << '\n';
  write_ints(out, "policy_sizes", policy_sizes);
  write_doubles(out, "policy_params", policy_params);
  write_doubles(out, "log_std", log_std);
  write_ints(out, "critic_sizes", critic_sizes);
  write_doubles(out, "critic_params", critic_params);
  out << "pi_opt_t " << pi_opt_t << '\n';
  write_doubles(out, "pi_opt_m", pi_opt_m);
  write_doubles(out, "pi_opt_v", pi_opt_v);
  out << "v_opt_t " << v_opt_t << '\n';
  write_doubles(out, "v_opt_m", v_opt_m);
  write_doubles(out, "v_opt_v", v_opt_v);
}

Checkpoint Checkpoint::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("Checkpoint: cannot read " + path);
  std::string magic;
  int version;
  in >> magic >> version;
  if (magic != kMagic || version != kVersion) {
    throw std::runtime_error("Checkpoint: unrecognized format in " + path);
  }
  Checkpoint ck;
  std::string tag;
  in >> tag >> ck.mode;
  if (tag != "mode") throw std::runtime_error("Checkpoint: expected mode");
  ck.policy_sizes = read_ints(in, "policy_sizes");
  ck.policy_params = read_doubles(in, "policy_params");
  ck.log_std = read_doubles(in, "log_std");
  ck.critic_sizes = read_ints(in, "critic_sizes");
  ck.critic_params = read_doubles(in, "critic_params");
  in >> tag >> ck.pi_opt_t;
  if (tag != "pi_opt_t") throw std::runtime_error("Checkpoint: pi_opt_t");
  ck.pi_opt_m = read_doubles(in, "pi_opt_m");
  ck.pi_opt_v = read_doubles(in, "pi_opt_v");
  in >> tag >> ck.v_opt_t;
  if (tag != "v_opt_t") throw std::runtime_error("Checkpoint: v_opt_t");
  ck.v_opt_m = read_doubles(in, "v_opt_m");
  ck.v_opt_v = read_doubles(in, "v_opt_v");
  return ck;
}

}  // namespace forge::nn
