#include "forge/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <memory>
#include <numeric>
#include <stdexcept>

#include "forge/config.hpp"

namespace forge::ppo {

GaeResult compute_gae(std::span<const double> rewards,
                      std::span<const double> values,
                      std::span<const bool> dones, double bootstrap_value,
                      double gamma, double lam) {
  const std::size_t n = rewards.size();
  if (values.size() != n || dones.size() != n) {
    throw std::invalid_argument("compute_gae: length mismatch");
  }
  GaeResult out;
  out.advantages.assign(n, 0.0);
  out.returns.assign(n, 0.0);
  double adv = 0.0;
  for (std::size_t t = n; t-- > 0;) {
    const double cont = dones[t] ? 0.0 : 1.0;
    const double next_v = (t + 1 < n) ? values[t + 1] : bootstrap_value;
    const double delta = rewards[t] + gamma * next_v * cont - values[t];
    adv = delta + gamma * lam * cont * adv;
    out.advantages[t] = adv;
    out.returns[t] = adv + values[t];
  }
  return out;
}

ClipObjective clipped_objective(std::span<const double> logp_new,
                                std::span<const double> logp_old,
                                std::span<const double> advantages,
                                double eps) {
  const std::size_t n = logp_new.size();
  if (logp_old.size() != n || advantages.size() != n) {
    throw std::invalid_argument("clipped_objective: length mismatch");
  }
  ClipObjective obj;
  obj.dloss_dlogp.assign(n, 0.0);
  double sum = 0.0;
  std::size_t clipped = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double ratio = std::exp(logp_new[i] - logp_old[i]);
    const double a = advantages[i];
    const double clip_ratio = std::clamp(ratio, 1.0 - eps, 1.0 + eps);
    const double unclipped = ratio * a;
    const double clipped_term = clip_ratio * a;
    sum += std::min(unclipped, clipped_term);
    if (ratio < 1.0 - eps || ratio > 1.0 + eps) ++clipped;
    // The clipped branch is constant in theta; gradient flows only when
    // the unclipped term attains the min.
    if (unclipped <= clipped_term) {
      obj.dloss_dlogp[i] = -unclipped / static_cast<double>(n);
    }
  }
  obj.loss = -sum / static_cast<double>(n);
  obj.clip_frac = static_cast<double>(clipped) / static_cast<double>(n);
  return obj;
}

TrajectoryBuffer::TrajectoryBuffer(int capacity, double gamma, double lam)
    : capacity_(capacity), gamma_(gamma), lam_(lam) {
  states_.reserve(capacity);
  actions_.reserve(capacity);
}

void TrajectoryBuffer::store(std::vector<double> state,
                             std::vector<double> action, double logprob,
                             double reward, double value) {
  if (full()) throw std::logic_error("TrajectoryBuffer: full");
  states_.push_back(std::move(state));
  actions_.push_back(std::move(action));
  logprobs_.push_back(logprob);
  rewards_.push_back(reward);
  values_.push_back(value);
  ++size_;
}

void TrajectoryBuffer::finish_path(double bootstrap_value) {
  const int n = size_ - path_start_;
  if (n <= 0) return;
  std::vector<double> rew(rewards_.begin() + path_start_, rewards_.end());
  std::vector<double> val(values_.begin() + path_start_, values_.end());
  // Transitions inside one path are all non-terminal.
  std::unique_ptr<bool[]> flags(new bool[n]());
  GaeResult gae = compute_gae(rew, val, std::span<const bool>(flags.get(), n),
                              bootstrap_value, gamma_, lam_);
  advantages_.insert(advantages_.end(), gae.advantages.begin(),
                     gae.advantages.end());
  returns_.insert(returns_.end(), gae.returns.begin(), gae.returns.end());
  path_start_ = size_;
}

void TrajectoryBuffer::clear() {
  size_ = 0;
  path_start_ = 0;
  states_.clear();
  actions_.clear();
  logprobs_.clear();
  rewards_.clear();
  values_.clear();
  advantages_.clear();
  returns_.clear();
}

UpdateStats update(TrajectoryBuffer& buffer, nn::GaussianPolicy& policy,
                   nn::Mlp& critic, nn::Adam& pi_opt, nn::Adam& v_opt,
                   const PpoConfig& cfg) {
  const int n = buffer.size();
  if (n == 0) throw std::logic_error("ppo::update: empty buffer");
  if (static_cast<int>(buffer.returns().size()) != n) {
    throw std::logic_error("ppo::update: unfinished path in buffer");
  }

  // Normalize advantages to mean 0 / std 1.
  std::vector<double>& adv = buffer.advantages();
  const double mean =
      std::accumulate(adv.begin(), adv.end(), 0.0) / static_cast<double>(n);
  double var = 0.0;
  for (double a : adv) var += (a - mean) * (a - mean);
  const double std_dev = std::sqrt(var / static_cast<double>(n));
  for (double& a : adv) a = (a - mean) / (std_dev + 1e-8);

  UpdateStats stats;
  std::vector<double> logp_new(n);
  for (int iter = 0; iter < cfg.train_pi_iters; ++iter) {
    policy.zero_grad();
    double kl_sum = 0.0;
    double loss_sum = 0.0;
    std::size_t clipped = 0;
    for (int i = 0; i < n; ++i) {
      const double lp =
          policy.logprob(buffer.states()[i], buffer.actions()[i]);
      logp_new[i] = lp;
      const double ratio = std::exp(lp - buffer.logprobs()[i]);
      const double a = adv[i];
      const double clip_ratio =
          std::clamp(ratio, 1.0 - cfg.clip_ratio, 1.0 + cfg.clip_ratio);
      const double unclipped = ratio * a;
      const double clipped_term = clip_ratio * a;
      loss_sum += std::min(unclipped, clipped_term);
      if (ratio < 1.0 - cfg.clip_ratio || ratio > 1.0 + cfg.clip_ratio) {
        ++clipped;
      }
      kl_sum += buffer.logprobs()[i] - lp;
      const double upstream = (unclipped <= clipped_term)
                                  ? -unclipped / static_cast<double>(n)
                                  : 0.0;
      if (upstream != 0.0) policy.backward_logprob(upstream);
    }
    const double pi_loss = -loss_sum / static_cast<double>(n);
    const double kl = kl_sum / static_cast<double>(n);
    if (!std::isfinite(pi_loss)) {
      throw std::runtime_error("ppo::update: non-finite policy loss at iter " +
                               std::to_string(iter));
    }
    if (iter == 0) {
      stats.pi_loss = pi_loss;
      stats.clip_frac =
          static_cast<double>(clipped) / static_cast<double>(n);
    }
    stats.kl = kl;
    if (kl > cfg.target_kl) break;  // early stop, gradient discarded

    // One flat Adam step over mean-net params + log_std.
    std::vector<double>& params = policy.mean_net().params();
    std::vector<double>& grads = policy.mean_net().grads();
    std::vector<double> flat_p(params);
    flat_p.insert(flat_p.end(), policy.log_std().begin(),
                  policy.log_std().end());
    std::vector<double> flat_g(grads);
    flat_g.insert(flat_g.end(), policy.log_std_grads().begin(),
                  policy.log_std_grads().end());
    pi_opt.step(flat_p, flat_g);
    std::copy(flat_p.begin(), flat_p.begin() + params.size(), params.begin());
    std::copy(flat_p.begin() + params.size(), flat_p.end(),
              policy.log_std().begin());
    stats.pi_iters = iter + 1;
  }

  for (int iter = 0; iter < cfg.train_v_iters; ++iter) {
    critic.zero_grad();
    double loss = 0.0;
    for (int i = 0; i < n; ++i) {
      const double v = critic.forward(buffer.states()[i])[0];
      const double err = v - buffer.returns()[i];
      loss += err * err;
      critic.backward({2.0 * err / static_cast<double>(n)});
    }
    loss /= static_cast<double>(n);
    if (!std::isfinite(loss)) {
      throw std::runtime_error("ppo::update: non-finite value loss at iter " +
                               std::to_string(iter));
    }
    stats.v_loss = loss;
    v_opt.step(critic.params(), critic.grads());
  }
  return stats;
}

std::vector<double> ForgingRollout::reset(std::uint64_t seed) {
  return env_.reset(mode_, seed);
}

RolloutEnv::Step ForgingRollout::step(const std::vector<double>& action) {
  std::array<double, 3> a{action[0], action[1], action[2]};
  env::StepResult r = env_.step(a);
  return {std::move(r.state), r.reward, r.done};
}

TrainResult train(RolloutEnv& env, const PpoConfig& cfg) {
  nn::GaussianPolicy policy(env.state_dim(), cfg.hidden, env.action_dim(),
                            cfg.log_std_init);
  nn::Mlp critic([&] {
    std::vector<int> sizes{env.state_dim()};
    sizes.insert(sizes.end(), cfg.hidden.begin(), cfg.hidden.end());
    sizes.push_back(1);
    return sizes;
  }());

  std::mt19937_64 init_rng(derive_seed(cfg.seed, "init"));
  policy.init(init_rng);
  critic.init_uniform(init_rng);

  nn::Adam pi_opt(policy.mean_net().n_params() + policy.log_std().size(),
                  cfg.lr_pi);
  nn::Adam v_opt(critic.n_params(), cfg.lr_v);

  std::mt19937_64 noise_rng(derive_seed(cfg.seed, "rollout"));
  const std::uint64_t reset_base = derive_seed(cfg.seed, "reset");

  TrainResult result{std::move(policy), std::move(critic), {}, 0.0, {}, {}};
  TrajectoryBuffer buffer(cfg.steps_per_epoch, cfg.gamma, cfg.lam);
  std::deque<double> recent_returns;  // last 100 completed episodes
  std::uint64_t episode_counter = 0;
  long total_steps = 0;
  bool have_best = false;

  std::vector<double> state = env.reset(reset_base + episode_counter++);
  double episode_return = 0.0;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    buffer.clear();
    double return_sum = 0.0;
    int episodes_done = 0;
    for (int t = 0; t < cfg.steps_per_epoch; ++t) {
      nn::GaussianSample sample = result.policy.sample(state, noise_rng);
      const double value = result.critic.forward(state)[0];
      RolloutEnv::Step step = env.step(sample.action);
      buffer.store(std::move(state), std::move(sample.action), sample.logprob,
                   step.reward, value);
      episode_return += step.reward;
      ++total_steps;
      state = std::move(step.state);
      if (step.done) {
        buffer.finish_path(0.0);
        return_sum += episode_return;
        ++episodes_done;
        recent_returns.push_back(episode_return);
        if (recent_returns.size() > 100) recent_returns.pop_front();
        episode_return = 0.0;
        state = env.reset(reset_base + episode_counter++);
      } else if (t + 1 == cfg.steps_per_epoch) {
        // Truncated by the epoch boundary; bootstrap with V(s).
        buffer.finish_path(result.critic.forward(state)[0]);
      }
    }

    UpdateStats stats =
        update(buffer, result.policy, result.critic, pi_opt, v_opt, cfg);

    TrainMetrics row;
    row.epoch = epoch;
    row.steps = total_steps;
    row.episodes = episodes_done;
    row.mean_return =
        episodes_done > 0 ? return_sum / episodes_done : 0.0;
    row.trailing100_return =
        recent_returns.empty()
            ? 0.0
            : std::accumulate(recent_returns.begin(), recent_returns.end(),
                              0.0) /
                  static_cast<double>(recent_returns.size());
    row.pi_loss = stats.pi_loss;
    row.v_loss = stats.v_loss;
    row.kl = stats.kl;
    row.clip_frac = stats.clip_frac;
    result.metrics.push_back(row);

    if (!have_best || row.trailing100_return > result.best_trailing_return) {
      have_best = true;
      result.best_trailing_return = row.trailing100_return;
      result.best_policy_params = result.policy.mean_net().params();
      result.best_log_std = result.policy.log_std();
      result.best_critic_params = result.critic.params();
    }
  }
  return result;
}

std::vector<env::EpisodeOutcome> evaluate(nn::GaussianPolicy& policy,
                                          env::ForgingEnv& env, env::Mode mode,
                                          int n_episodes, bool stochastic,
                                          std::uint64_t seed0) {
  std::vector<env::EpisodeOutcome> outcomes;
  outcomes.reserve(n_episodes);
  for (int ep = 0; ep < n_episodes; ++ep) {
    std::mt19937_64 noise_rng(derive_seed(seed0 + ep, "eval-noise"));
    std::vector<double> state = env.reset(mode, seed0 + ep);
    env::EpisodeOutcome outcome;
    while (!env.done()) {
      std::vector<double> a = stochastic
                                  ? policy.sample(state, noise_rng).action
                                  : policy.mean_action(state);
      env::StepResult r = env.step({a[0], a[1], a[2]});
      outcome.total_reward += r.reward;
      outcome.step_count += 1;
      state = std::move(r.state);
    }
    outcome.pieces = env.pieces();
    outcome.overheat = env.overheat_seen();
    outcomes.push_back(std::move(outcome));
  }
  return outcomes;
}

}  // namespace forge::ppo
