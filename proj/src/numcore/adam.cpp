#include "mocco/numcore/adam.hpp"

#include <cmath>

#include "mocco/errors.hpp"

namespace mocco::numcore {

AdamState adam_init(const MlpParams& params, double learning_rate) {
  if (learning_rate <= 0.0) throw ConfigError("adam_init: learning rate must be > 0");
  AdamState st;
  st.first_moment = mlp_zeros_like(params);
  st.second_moment = mlp_zeros_like(params);
  st.learning_rate = learning_rate;
  return st;
}

namespace {

void update_span(double* p, double* m, double* v, const double* g, size_t n,
                 const AdamState& st, double bc1, double bc2) {
  const double lr = st.learning_rate;
  const double b1 = st.beta1, b2 = st.beta2, eps = st.eps_stability;
  for (size_t k = 0; k < n; ++k) {
    m[k] = b1 * m[k] + (1.0 - b1) * g[k];
    v[k] = b2 * v[k] + (1.0 - b2) * g[k] * g[k];
    const double mhat = m[k] / bc1;
    const double vhat = v[k] / bc2;
    p[k] -= lr * mhat / (std::sqrt(vhat) + eps);
  }
}

}  // namespace

void adam_step(MlpParams& params, AdamState& state, const MlpParams& grads) {
  if (!params.same_shape(grads)) throw ShapeError("adam_step: gradient shape mismatch");
  if (!grads.all_finite())
    throw NumericError("adam_step: non-finite gradient, parameters unchanged");

  state.step_count += 1;
  const double t = static_cast<double>(state.step_count);
  const double bc1 = 1.0 - std::pow(state.beta1, t);
  const double bc2 = 1.0 - std::pow(state.beta2, t);

  for (int l = 0; l < params.num_layers(); ++l) {
    update_span(params.weights[l].data.data(), state.first_moment.weights[l].data.data(),
                state.second_moment.weights[l].data.data(), grads.weights[l].data.data(),
                params.weights[l].data.size(), state, bc1, bc2);
    update_span(params.biases[l].data(), state.first_moment.biases[l].data(),
                state.second_moment.biases[l].data(), grads.biases[l].data(),
                params.biases[l].size(), state, bc1, bc2);
  }
}

}  // namespace mocco::numcore
