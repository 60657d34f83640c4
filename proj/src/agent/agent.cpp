#include "mocco/agent/agent.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "mocco/errors.hpp"

namespace mocco::agents {

using numcore::ForwardCache;
using numcore::Matrix;
using numcore::MlpParams;

ExplorationMode exploration_mode_from_string(const std::string& s) {
  if (s == "none" || s == "no_expl") return ExplorationMode::none;
  if (s == "gaussian" || s == "normal") return ExplorationMode::gaussian;
  if (s == "ou") return ExplorationMode::ou;
  if (s == "guided" || s == "ge") return ExplorationMode::guided;
  throw ConfigError("unknown exploration mode: " + s);
}

std::string to_string(ExplorationMode m) {
  switch (m) {
    case ExplorationMode::none: return "none";
    case ExplorationMode::gaussian: return "gaussian";
    case ExplorationMode::ou: return "ou";
    case ExplorationMode::guided: return "guided";
  }
  return "?";
}

AgentKind agent_kind_from_string(const std::string& s) {
  if (s == "td3") return AgentKind::td3;
  if (s == "mocco") return AgentKind::mocco;
  throw ConfigError("unknown agent: " + s);
}

std::string to_string(AgentKind k) {
  return k == AgentKind::td3 ? "td3" : "mocco";
}

void AgentConfig::validate() const {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("gamma must be in [0, 1]");
  if (!(tau > 0.0 && tau <= 1.0)) throw ConfigError("tau must be in (0, 1]");
  if (policy_delay < 1) throw ConfigError("policy_delay must be >= 1");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (beta < 0.0) throw ConfigError("beta must be >= 0");
  if (warmup_steps < 0) throw ConfigError("warmup_steps must be >= 0");
  if (learning_rate <= 0.0) throw ConfigError("learning_rate must be > 0");
  for (int h : hidden_sizes)
    if (h <= 0) throw ConfigError("hidden sizes must be positive");
}

std::vector<double> ou_step(OUState& ou, RandomStream& rng) {
  for (double& x : ou.x) x = x + ou.theta * (0.0 - x) + ou.sigma * rng.normal();
  return ou.x;
}

namespace {

std::vector<int> net_sizes(int in, const std::vector<int>& hidden, int out) {
  std::vector<int> sizes;
  sizes.push_back(in);
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(out);
  return sizes;
}

// Seed stream ids within an agent.
enum : uint64_t {
  kSeedActor = 1,
  kSeedCriticBase = 2,  // critic i uses kSeedCriticBase + i
  kSeedExploration = 10,
  kSeedTargetNoise = 11,
  kSeedWarmup = 12,
};

}  // namespace

Agent::Agent(AgentKind kind, const AgentConfig& cfg, const envs::EnvSpec& spec,
             uint64_t seed)
    : kind_(kind), cfg_(cfg), spec_(spec),
      expl_rng_(derive_seed(seed, kSeedExploration)),
      target_noise_rng_(derive_seed(seed, kSeedTargetNoise)),
      warmup_rng_(derive_seed(seed, kSeedWarmup)) {
  cfg_.validate();
  actor_head_ = numcore::HeadSpec::make_tanh_bounded(spec.action_low, spec.action_high);

  actor_ = numcore::mlp_init(net_sizes(spec.obs_dim, cfg_.hidden_sizes, spec.action_dim),
                             derive_seed(seed, kSeedActor));
  actor_target_ = actor_;
  actor_opt_ = numcore::adam_init(actor_, cfg_.learning_rate);

  const int n_critics = kind_ == AgentKind::td3 ? 2 : 1;
  const auto critic_sizes = net_sizes(spec.obs_dim + spec.action_dim, cfg_.hidden_sizes, 1);
  for (int i = 0; i < n_critics; ++i) {
    critics_.push_back(numcore::mlp_init(critic_sizes, derive_seed(seed, kSeedCriticBase + i)));
    critic_targets_.push_back(critics_.back());
    critic_opts_.push_back(numcore::adam_init(critics_.back(), cfg_.learning_rate));
  }

  ou_.x.assign(spec.action_dim, 0.0);
  ou_.theta = cfg_.ou_theta;
  ou_.sigma = cfg_.ou_sigma;
}

std::vector<double> Agent::clip_action(std::vector<double> a) const {
  for (int d = 0; d < spec_.action_dim; ++d)
    a[d] = std::clamp(a[d], spec_.action_low[d], spec_.action_high[d]);
  return a;
}

void Agent::begin_episode() {
  std::fill(ou_.x.begin(), ou_.x.end(), 0.0);
}

std::vector<double> Agent::select_action_train(const std::vector<double>& state,
                                               controller::DirectionalController* dc) {
  ++env_steps_;
  if (env_steps_ <= cfg_.warmup_steps) {
    std::vector<double> a(spec_.action_dim);
    for (int d = 0; d < spec_.action_dim; ++d)
      a[d] = warmup_rng_.uniform(spec_.action_low[d], spec_.action_high[d]);
    return a;
  }

  std::vector<double> a = numcore::mlp_forward(actor_, state, actor_head_);
  switch (cfg_.exploration_mode) {
    case ExplorationMode::none:
      break;
    case ExplorationMode::gaussian:
      for (int d = 0; d < spec_.action_dim; ++d) {
        const double half = 0.5 * (spec_.action_high[d] - spec_.action_low[d]);
        a[d] += expl_rng_.normal(0.0, cfg_.gaussian_sigma * half);
      }
      break;
    case ExplorationMode::ou: {
      const std::vector<double> x = ou_step(ou_, expl_rng_);
      for (int d = 0; d < spec_.action_dim; ++d) {
        const double half = 0.5 * (spec_.action_high[d] - spec_.action_low[d]);
        a[d] += x[d] * half;
      }
      break;
    }
    case ExplorationMode::guided: {
      if (!dc) throw ConfigError("guided exploration requires a directional controller");
      last_correction_ = controller::exploratory_correction(dc->ensemble, dc->scaling,
                                                            state, a);
      for (int d = 0; d < spec_.action_dim; ++d) a[d] += last_correction_->a_e[d];
      break;
    }
  }
  return clip_action(std::move(a));
}

std::vector<double> Agent::select_action_eval(const std::vector<double>& state) const {
  return clip_action(numcore::mlp_forward(actor_, state, actor_head_));
}

void Agent::gather(const Batch& batch, Matrix& S, Matrix& A, std::vector<double>& reward,
                   Matrix& S2, std::vector<double>& done) const {
  const int B = static_cast<int>(batch.size());
  S = Matrix(B, spec_.obs_dim);
  A = Matrix(B, spec_.action_dim);
  S2 = Matrix(B, spec_.obs_dim);
  reward.resize(B);
  done.resize(B);
  for (int b = 0; b < B; ++b) {
    const replay::Transition& t = *batch[b];
    std::copy(t.state.begin(), t.state.end(), S.row(b));
    std::copy(t.action.begin(), t.action.end(), A.row(b));
    std::copy(t.next_state.begin(), t.next_state.end(), S2.row(b));
    reward[b] = t.reward;
    done[b] = t.done ? 1.0 : 0.0;
  }
}

Matrix Agent::smoothed_target_actions(const Matrix& S2) {
  Matrix A2 = numcore::mlp_forward_batch(actor_target_, S2, actor_head_);
  for (int b = 0; b < A2.rows; ++b) {
    double* row = A2.row(b);
    for (int d = 0; d < A2.cols; ++d) {
      const double half = 0.5 * (spec_.action_high[d] - spec_.action_low[d]);
      double noise = target_noise_rng_.normal(0.0, cfg_.target_noise_sigma * half);
      const double clip = cfg_.target_noise_clip * half;
      noise = std::clamp(noise, -clip, clip);
      row[d] = std::clamp(row[d] + noise, spec_.action_low[d], spec_.action_high[d]);
    }
  }
  return A2;
}

namespace {

Matrix hcat(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows, a.cols + b.cols);
  for (int r = 0; r < a.rows; ++r) {
    std::copy(a.row(r), a.row(r) + a.cols, out.row(r));
    std::copy(b.row(r), b.row(r) + b.cols, out.row(r) + a.cols);
  }
  return out;
}

void check_targets_finite(const std::vector<double>& y) {
  for (double v : y)
    if (!std::isfinite(v)) throw NumericError("critic update: non-finite TD target");
}

}  // namespace

double Agent::critic_update(const Batch& batch, const controller::Ensemble* ens) {
  return kind_ == AgentKind::td3 ? td3_critic_update(batch)
                                 : mocco_critic_update(batch, ens);
}

double Agent::td3_critic_update(const Batch& batch) {
  if (critics_.size() != 2) throw ConfigError("td3_critic_update: twin critics required");
  const int B = static_cast<int>(batch.size());
  Matrix S, A, S2;
  std::vector<double> reward, done;
  gather(batch, S, A, reward, S2, done);

  const Matrix A2 = smoothed_target_actions(S2);
  const Matrix X2 = hcat(S2, A2);
  const Matrix q1t = numcore::mlp_forward_batch(critic_targets_[0], X2, {});
  const Matrix q2t = numcore::mlp_forward_batch(critic_targets_[1], X2, {});

  std::vector<double> y(B);
  for (int b = 0; b < B; ++b)
    y[b] = reward[b] +
           cfg_.gamma * (1.0 - done[b]) * std::min(q1t.at(b, 0), q2t.at(b, 0));
  check_targets_finite(y);

  const Matrix X = hcat(S, A);
  double loss = 0.0;
  for (size_t k = 0; k < critics_.size(); ++k) {
    ForwardCache cache;
    const Matrix q = numcore::mlp_forward_batch(critics_[k], X, {}, &cache);
    Matrix upstream(B, 1);
    double mse = 0.0;
    for (int b = 0; b < B; ++b) {
      const double err = q.at(b, 0) - y[b];
      mse += err * err;
      upstream.at(b, 0) = 2.0 * err / B;
    }
    loss += mse / B;
    MlpParams grads = numcore::mlp_zeros_like(critics_[k]);
    numcore::mlp_backward_batch(critics_[k], cache, upstream, {}, &grads, nullptr);
    numcore::adam_step(critics_[k], critic_opts_[k], grads);
  }
  ++critic_updates_;
  return loss;
}

double Agent::mocco_critic_update(const Batch& batch, const controller::Ensemble* ens) {
  if (critics_.size() != 1) throw ConfigError("mocco_critic_update: single critic required");
  if (cfg_.beta != 0.0 && ens == nullptr)
    throw ConfigError("mocco_critic_update: ensemble required when beta > 0");
  const int B = static_cast<int>(batch.size());
  Matrix S, A, S2;
  std::vector<double> reward, done;
  gather(batch, S, A, reward, S2, done);

  const Matrix A2 = smoothed_target_actions(S2);
  const Matrix X2 = hcat(S2, A2);
  const Matrix qt = numcore::mlp_forward_batch(critic_targets_[0], X2, {});

  std::vector<double> y(B);
  for (int b = 0; b < B; ++b)
    y[b] = reward[b] + cfg_.gamma * (1.0 - done[b]) * qt.at(b, 0);
  check_targets_finite(y);

  // Ensemble mean at the sampled pairs; a constant target, no gradient
  // flows back into the ensemble.
  std::vector<double> qmc(B, 0.0);
  if (cfg_.beta != 0.0) {
    for (int b = 0; b < B; ++b) {
      const std::vector<double> q =
          ensemble_predict(*ens, batch[b]->state, batch[b]->action);
      double mu = 0.0;
      for (double v : q) mu += v;
      qmc[b] = mu / ens->size();
    }
    check_targets_finite(qmc);
  }

  const Matrix X = hcat(S, A);
  ForwardCache cache;
  const Matrix q = numcore::mlp_forward_batch(critics_[0], X, {}, &cache);
  Matrix upstream(B, 1);
  double loss = 0.0;
  for (int b = 0; b < B; ++b) {
    const double td_err = q.at(b, 0) - y[b];
    const double mc_err = q.at(b, 0) - qmc[b];
    loss += td_err * td_err + cfg_.beta * mc_err * mc_err;
    upstream.at(b, 0) = 2.0 * (td_err + cfg_.beta * mc_err) / B;
  }
  loss /= B;

  MlpParams grads = numcore::mlp_zeros_like(critics_[0]);
  numcore::mlp_backward_batch(critics_[0], cache, upstream, {}, &grads, nullptr);
  numcore::adam_step(critics_[0], critic_opts_[0], grads);
  ++critic_updates_;
  return loss;
}

double Agent::actor_update(const Batch& batch) {
  const int B = static_cast<int>(batch.size());
  Matrix S(B, spec_.obs_dim);
  for (int b = 0; b < B; ++b)
    std::copy(batch[b]->state.begin(), batch[b]->state.end(), S.row(b));

  ForwardCache actor_cache;
  const Matrix A_pi = numcore::mlp_forward_batch(actor_, S, actor_head_, &actor_cache);
  const Matrix X = hcat(S, A_pi);

  ForwardCache critic_cache;
  const Matrix q = numcore::mlp_forward_batch(critics_[0], X, {}, &critic_cache);

  Matrix ones(B, 1);
  std::fill(ones.data.begin(), ones.data.end(), 1.0);
  Matrix dX;
  numcore::mlp_backward_batch(critics_[0], critic_cache, ones, {}, nullptr, &dX);

  // Ascent on mean Q: minimize -mean Q, so the upstream into the actor is
  // -(1/B) * dQ/da.
  Matrix upstream(B, spec_.action_dim);
  for (int b = 0; b < B; ++b)
    for (int d = 0; d < spec_.action_dim; ++d)
      upstream.at(b, d) = -dX.at(b, spec_.obs_dim + d) / B;

  MlpParams grads = numcore::mlp_zeros_like(actor_);
  numcore::mlp_backward_batch(actor_, actor_cache, upstream, actor_head_, &grads, nullptr);
  numcore::adam_step(actor_, actor_opt_, grads);
  ++actor_updates_;

  double mean_q = 0.0;
  for (int b = 0; b < B; ++b) mean_q += q.at(b, 0);
  return -mean_q / B;
}

void Agent::target_soft_update(double tau) {
  numcore::soft_update(actor_target_, actor_, tau);
  for (size_t k = 0; k < critics_.size(); ++k)
    numcore::soft_update(critic_targets_[k], critics_[k], tau);
}

void Agent::set_actor(const MlpParams& p) {
  if (!p.same_shape(actor_)) throw ShapeError("set_actor: topology mismatch");
  actor_ = p;
  actor_target_ = p;
  actor_opt_ = numcore::adam_init(actor_, cfg_.learning_rate);
}

void Agent::set_critic(int i, const MlpParams& p) {
  if (!p.same_shape(critics_.at(i))) throw ShapeError("set_critic: topology mismatch");
  critics_[i] = p;
  critic_targets_[i] = p;
  critic_opts_[i] = numcore::adam_init(critics_[i], cfg_.learning_rate);
}

void Agent::save_snapshot(const std::string& dir) const {
  std::filesystem::create_directories(dir);
  numcore::save_params(actor_, dir + "/actor.mlp");
  numcore::save_params(actor_target_, dir + "/actor_target.mlp");
  for (size_t k = 0; k < critics_.size(); ++k) {
    numcore::save_params(critics_[k], dir + "/critic" + std::to_string(k + 1) + ".mlp");
    numcore::save_params(critic_targets_[k],
                         dir + "/critic" + std::to_string(k + 1) + "_target.mlp");
  }
}

}  // namespace mocco::agents
