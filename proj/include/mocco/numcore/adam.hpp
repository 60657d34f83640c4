#pragma once

#include "mocco/numcore/mlp.hpp"

namespace mocco::numcore {

// Adam with bias correction. Moments share the parameter topology.
struct AdamState {
  long long step_count = 0;
  MlpParams first_moment, second_moment;
  double learning_rate = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps_stability = 1e-8;
};

AdamState adam_init(const MlpParams& params, double learning_rate);

// One Adam update in place. Throws NumericError on non-finite gradients and
// leaves params and state untouched in that case.
void adam_step(MlpParams& params, AdamState& state, const MlpParams& grads);

}  // namespace mocco::numcore
