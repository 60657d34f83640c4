#pragma once

#include <cstdint>
#include <vector>

#include "mocco/envs/env.hpp"
#include "mocco/numcore/adam.hpp"
#include "mocco/numcore/mlp.hpp"
#include "mocco/replay/replay.hpp"

namespace mocco::controller {

// Ensemble of scalar Q-approximators over concatenated (state, action)
// inputs. Member disagreement (population variance) is the uncertainty
// signal; its action gradient points toward the least-explored actions.
struct Ensemble {
  std::vector<numcore::MlpParams> members;
  std::vector<numcore::AdamState> optimizers;
  int state_dim = 0;
  int action_dim = 0;

  int size() const { return static_cast<int>(members.size()); }
};

// n independently initialized members sharing one topology. n >= 2 so the
// variance is defined.
Ensemble ensemble_init(int n, int state_dim, int action_dim,
                       const std::vector<int>& hidden_sizes, double learning_rate,
                       uint64_t seed);

// Member predictions q_1..q_n at (state, action).
std::vector<double> ensemble_predict(const Ensemble& ens,
                                     const std::vector<double>& state,
                                     const std::vector<double>& action);

// Population variance of the member predictions (divide by n); >= 0.
double uncertainty(const Ensemble& ens, const std::vector<double>& state,
                   const std::vector<double>& action);

// d(uncertainty)/d(action) = (2/n) * sum_i (q_i - mu) * dq_i/da.
std::vector<double> uncertainty_grad(const Ensemble& ens,
                                     const std::vector<double>& state,
                                     const std::vector<double>& action);

// One supervised step: every member regresses onto the recorded returns of
// the batch, each with its own Adam state. Returns the batch-mean of the
// summed member square errors. Throws NumericError (before any update) if a
// target is non-finite.
double controller_train_step(Ensemble& ens,
                             const std::vector<const replay::MCRecord*>& mc_batch);

// Expected L2 norm of an action drawn uniformly from the action box: the
// constant that turns a unit direction into an action-scale correction.
// Closed form for 1-D bounds, seeded Monte Carlo otherwise.
double epsilon_init(const envs::EnvSpec& spec, int sample_count, uint64_t seed);

// Running statistics of the per-step action gradient: a window of the last N
// gradient vectors, the per-dimension deviation sigma_N over that window,
// and the running maximum of all sigma_N seen. zeta = sigma_N / max_sigma
// is the exploration intensity in [0, 1] per dimension.
class ScalingState {
 public:
  ScalingState(int action_dim, int window_capacity, double epsilon);

  // Appends the gradient, refreshes sigma_N and the running max (max first,
  // so zeta <= 1 by construction), and returns zeta. While the window holds
  // fewer than two entries, or before any deviation has been observed,
  // zeta is all ones.
  std::vector<double> update(const std::vector<double>& grad);

  double epsilon() const { return epsilon_; }
  int action_dim() const { return dims_; }
  int window_capacity() const { return capacity_; }
  size_t window_size() const { return count_; }
  const std::vector<double>& running_max_sigma() const { return max_sigma_; }

 private:
  int dims_;
  int capacity_;
  double epsilon_;
  std::vector<double> window_;  // ring of gradient vectors, capacity x dims
  size_t count_ = 0;
  size_t cursor_ = 0;
  std::vector<double> max_sigma_;
};

struct Correction {
  std::vector<double> a_e;           // additive exploratory action
  std::vector<double> zeta;          // per-dimension scale in [0, 1]
  std::vector<double> raw_gradient;  // unscaled uncertainty gradient
};

// a_e = (g / ||g||_2) * epsilon * zeta, elementwise over dimensions. The
// scaling window is fed the raw gradient even when the zero-gradient guard
// (||g|| < 1e-8) forces a_e = 0.
Correction exploratory_correction(const Ensemble& ens, ScalingState& scaling,
                                  const std::vector<double>& state,
                                  const std::vector<double>& base_action);

// The full directional controller: ensemble plus scaling statistics.
struct DirectionalController {
  Ensemble ensemble;
  ScalingState scaling;

  DirectionalController(Ensemble e, ScalingState s)
      : ensemble(std::move(e)), scaling(std::move(s)) {}
};

}  // namespace mocco::controller
