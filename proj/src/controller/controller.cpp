#include "mocco/controller/controller.hpp"

#include <cmath>

#include "mocco/errors.hpp"
#include "mocco/rng.hpp"

namespace mocco::controller {

using numcore::ForwardCache;
using numcore::Matrix;
using numcore::MlpParams;

namespace {

constexpr double kMinGradNorm = 1e-8;

std::vector<double> concat(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> out;
  out.reserve(a.size() + b.size());
  out.insert(out.end(), a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

void check_dims(const Ensemble& ens, const std::vector<double>& state,
                const std::vector<double>& action) {
  if (static_cast<int>(state.size()) != ens.state_dim ||
      static_cast<int>(action.size()) != ens.action_dim)
    throw ShapeError("ensemble: state/action dim mismatch");
}

}  // namespace

Ensemble ensemble_init(int n, int state_dim, int action_dim,
                       const std::vector<int>& hidden_sizes, double learning_rate,
                       uint64_t seed) {
  if (n < 2) throw ConfigError("ensemble_init: need at least 2 members");
  if (state_dim <= 0 || action_dim <= 0)
    throw ConfigError("ensemble_init: dims must be positive");

  std::vector<int> sizes;
  sizes.push_back(state_dim + action_dim);
  sizes.insert(sizes.end(), hidden_sizes.begin(), hidden_sizes.end());
  sizes.push_back(1);

  Ensemble ens;
  ens.state_dim = state_dim;
  ens.action_dim = action_dim;
  for (int i = 0; i < n; ++i) {
    MlpParams member = numcore::mlp_init(sizes, derive_seed(seed, 1000 + i));
    ens.optimizers.push_back(numcore::adam_init(member, learning_rate));
    ens.members.push_back(std::move(member));
  }
  return ens;
}

std::vector<double> ensemble_predict(const Ensemble& ens,
                                     const std::vector<double>& state,
                                     const std::vector<double>& action) {
  check_dims(ens, state, action);
  const std::vector<double> input = concat(state, action);
  std::vector<double> out(ens.size());
  for (int i = 0; i < ens.size(); ++i)
    out[i] = numcore::mlp_forward(ens.members[i], input)[0];
  return out;
}

double uncertainty(const Ensemble& ens, const std::vector<double>& state,
                   const std::vector<double>& action) {
  const std::vector<double> q = ensemble_predict(ens, state, action);
  const int n = ens.size();
  double mu = 0.0;
  for (double v : q) mu += v;
  mu /= n;
  double var = 0.0;
  for (double v : q) var += (v - mu) * (v - mu);
  return var / n;
}

std::vector<double> uncertainty_grad(const Ensemble& ens,
                                     const std::vector<double>& state,
                                     const std::vector<double>& action) {
  check_dims(ens, state, action);
  const std::vector<double> input = concat(state, action);
  const int n = ens.size();

  std::vector<double> q(n);
  for (int i = 0; i < n; ++i) q[i] = numcore::mlp_forward(ens.members[i], input)[0];
  double mu = 0.0;
  for (double v : q) mu += v;
  mu /= n;

  std::vector<double> grad(ens.action_dim, 0.0);
  for (int i = 0; i < n; ++i) {
    const std::vector<double> gi = numcore::mlp_grad_input(ens.members[i], input);
    const double coeff = (2.0 / n) * (q[i] - mu);
    for (int d = 0; d < ens.action_dim; ++d)
      grad[d] += coeff * gi[ens.state_dim + d];
  }
  return grad;
}

double controller_train_step(Ensemble& ens,
                             const std::vector<const replay::MCRecord*>& mc_batch) {
  if (mc_batch.empty()) throw ConfigError("controller_train_step: empty batch");
  const int B = static_cast<int>(mc_batch.size());
  const int in_dim = ens.state_dim + ens.action_dim;

  Matrix X(B, in_dim);
  std::vector<double> targets(B);
  for (int b = 0; b < B; ++b) {
    const replay::MCRecord& rec = *mc_batch[b];
    if (static_cast<int>(rec.state.size()) != ens.state_dim ||
        static_cast<int>(rec.action.size()) != ens.action_dim)
      throw ShapeError("controller_train_step: record dim mismatch");
    if (!std::isfinite(rec.mc_return))
      throw NumericError("controller_train_step: non-finite return target");
    double* row = X.row(b);
    for (int j = 0; j < ens.state_dim; ++j) row[j] = rec.state[j];
    for (int j = 0; j < ens.action_dim; ++j) row[ens.state_dim + j] = rec.action[j];
    targets[b] = rec.mc_return;
  }

  double total_loss = 0.0;
  for (int i = 0; i < ens.size(); ++i) {
    ForwardCache cache;
    Matrix q = numcore::mlp_forward_batch(ens.members[i], X, {}, &cache);
    Matrix upstream(B, 1);
    double member_loss = 0.0;
    for (int b = 0; b < B; ++b) {
      const double err = q.at(b, 0) - targets[b];
      member_loss += err * err;
      upstream.at(b, 0) = 2.0 * err / B;
    }
    total_loss += member_loss / B;

    MlpParams grads = numcore::mlp_zeros_like(ens.members[i]);
    numcore::mlp_backward_batch(ens.members[i], cache, upstream, {}, &grads, nullptr);
    numcore::adam_step(ens.members[i], ens.optimizers[i], grads);
  }
  return total_loss;
}

double epsilon_init(const envs::EnvSpec& spec, int sample_count, uint64_t seed) {
  if (sample_count < 1) throw ConfigError("epsilon_init: sample_count must be >= 1");
  if (spec.action_dim == 1) {
    // E|a| over U(lo, hi) in closed form.
    const double lo = spec.action_low[0], hi = spec.action_high[0];
    double integral;
    if (lo >= 0.0)
      integral = 0.5 * (hi * hi - lo * lo);
    else if (hi <= 0.0)
      integral = 0.5 * (lo * lo - hi * hi);
    else
      integral = 0.5 * (lo * lo + hi * hi);
    return integral / (hi - lo);
  }
  RandomStream rng(seed);
  double acc = 0.0;
  for (int k = 0; k < sample_count; ++k) {
    double sq = 0.0;
    for (int d = 0; d < spec.action_dim; ++d) {
      const double a = rng.uniform(spec.action_low[d], spec.action_high[d]);
      sq += a * a;
    }
    acc += std::sqrt(sq);
  }
  return acc / sample_count;
}

ScalingState::ScalingState(int action_dim, int window_capacity, double epsilon)
    : dims_(action_dim), capacity_(window_capacity), epsilon_(epsilon),
      max_sigma_(action_dim, 0.0) {
  if (action_dim <= 0) throw ConfigError("ScalingState: action_dim must be positive");
  if (window_capacity < 2) throw ConfigError("ScalingState: window must hold >= 2 entries");
  if (epsilon <= 0.0) throw ConfigError("ScalingState: epsilon must be positive");
}

std::vector<double> ScalingState::update(const std::vector<double>& grad) {
  if (static_cast<int>(grad.size()) != dims_)
    throw ShapeError("ScalingState::update: gradient dim mismatch");
  for (double g : grad)
    if (!std::isfinite(g)) throw NumericError("ScalingState::update: non-finite gradient");

  if (count_ < static_cast<size_t>(capacity_)) {
    window_.insert(window_.end(), grad.begin(), grad.end());
    ++count_;
  } else {
    std::copy(grad.begin(), grad.end(), window_.begin() + cursor_ * dims_);
    cursor_ = (cursor_ + 1) % capacity_;
  }

  std::vector<double> zeta(dims_, 1.0);
  if (count_ < 2) return zeta;  // warm-up: too little history for a deviation

  for (int d = 0; d < dims_; ++d) {
    double mean = 0.0;
    for (size_t k = 0; k < count_; ++k) mean += window_[k * dims_ + d];
    mean /= static_cast<double>(count_);
    double var = 0.0;
    for (size_t k = 0; k < count_; ++k) {
      const double dev = window_[k * dims_ + d] - mean;
      var += dev * dev;
    }
    const double sigma = std::sqrt(var / static_cast<double>(count_));
    if (sigma > max_sigma_[d]) max_sigma_[d] = sigma;
    zeta[d] = max_sigma_[d] > 0.0 ? sigma / max_sigma_[d] : 1.0;
  }
  return zeta;
}

Correction exploratory_correction(const Ensemble& ens, ScalingState& scaling,
                                  const std::vector<double>& state,
                                  const std::vector<double>& base_action) {
  Correction c;
  c.raw_gradient = uncertainty_grad(ens, state, base_action);
  c.zeta = scaling.update(c.raw_gradient);
  c.a_e.assign(ens.action_dim, 0.0);

  double norm_sq = 0.0;
  for (double g : c.raw_gradient) norm_sq += g * g;
  const double norm = std::sqrt(norm_sq);
  if (norm >= kMinGradNorm) {
    for (int d = 0; d < ens.action_dim; ++d)
      c.a_e[d] = c.raw_gradient[d] / norm * scaling.epsilon() * c.zeta[d];
  }
  return c;
}

}  // namespace mocco::controller
