#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mocco::numcore {

// Dense row-major matrix of doubles. All shapes in this module are small
// (hundreds of rows/cols), so a flat vector is enough.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), data(static_cast<size_t>(r) * c, 0.0) {}

  double* row(int r) { return data.data() + static_cast<size_t>(r) * cols; }
  const double* row(int r) const { return data.data() + static_cast<size_t>(r) * cols; }
  double& at(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }
  double at(int r, int c) const { return data[static_cast<size_t>(r) * cols + c]; }
  void set_zero() { std::fill(data.begin(), data.end(), 0.0); }
};

enum class OutputHead { identity, tanh_bounded };

// Output-layer activation. Hidden layers are always ReLU; the output is
// either raw (value heads) or tanh squashed into [low, high] (policy heads).
struct HeadSpec {
  OutputHead head = OutputHead::identity;
  std::vector<double> low, high;  // per-output bounds, tanh_bounded only

  static HeadSpec make_identity() { return HeadSpec{}; }
  static HeadSpec make_tanh_bounded(std::vector<double> lo, std::vector<double> hi) {
    return HeadSpec{OutputHead::tanh_bounded, std::move(lo), std::move(hi)};
  }
};

// Parameters of a fixed-topology feed-forward network. weights[l] has shape
// (layer_sizes[l] x layer_sizes[l+1]); biases[l] has length layer_sizes[l+1].
// The same container doubles as gradient / Adam-moment storage since those
// share the shape.
struct MlpParams {
  std::vector<int> layer_sizes;
  std::vector<Matrix> weights;
  std::vector<std::vector<double>> biases;

  int input_dim() const { return layer_sizes.front(); }
  int output_dim() const { return layer_sizes.back(); }
  int num_layers() const { return static_cast<int>(weights.size()); }

  bool same_shape(const MlpParams& other) const;
  bool all_finite() const;
  void set_zero();
};

// Uniform init in [-1/sqrt(fan_in), +1/sqrt(fan_in)] for weights and biases,
// deterministic per seed. Throws ConfigError on degenerate layer_sizes.
MlpParams mlp_init(const std::vector<int>& layer_sizes, uint64_t seed);

// Zero-valued parameters with the given topology (gradient accumulators).
MlpParams mlp_zeros_like(const MlpParams& params);

// Per-layer activations of a batched forward pass, kept for the backward
// pass. post[0] is the input batch; pre[l]/post[l+1] belong to layer l.
struct ForwardCache {
  std::vector<Matrix> pre, post;
};

// X is (batch x input_dim); returns (batch x output_dim).
Matrix mlp_forward_batch(const MlpParams& params, const Matrix& X,
                         const HeadSpec& head, ForwardCache* cache = nullptr);

std::vector<double> mlp_forward(const MlpParams& params,
                                const std::vector<double>& input,
                                const HeadSpec& head = {});

struct GradientBundle {
  MlpParams by_parameter;         // d(output)/d(each parameter)
  std::vector<double> by_input;   // d(output)/d(each input coordinate)
};

// Backward pass for d(sum_b <upstream_b, y_b>). Accumulates parameter
// gradients into *param_grads (must be pre-shaped, zeroed by caller) and
// writes per-sample input gradients into *input_grads when requested.
// Either output may be null to skip that part of the computation.
void mlp_backward_batch(const MlpParams& params, const ForwardCache& cache,
                        const Matrix& upstream, const HeadSpec& head,
                        MlpParams* param_grads, Matrix* input_grads);

// Gradients of (upstream_scalar * scalar network output). Requires
// output_dim == 1. Throws NumericError on non-finite upstream.
GradientBundle mlp_grad_params(const MlpParams& params,
                               const std::vector<double>& input,
                               double upstream_scalar,
                               const HeadSpec& head = {});

// d(scalar output)/d(input); equals mlp_grad_params(..., 1.0).by_input.
std::vector<double> mlp_grad_input(const MlpParams& params,
                                   const std::vector<double>& input,
                                   const HeadSpec& head = {});

// target <- tau * source + (1 - tau) * target, elementwise.
void soft_update(MlpParams& target, const MlpParams& source, double tau);

// Binary snapshot: magic, layer count, layer sizes, then per layer the
// row-major weights followed by the biases, all little-endian f64.
void save_params(const MlpParams& params, const std::string& path);
MlpParams load_params(const std::string& path);

}  // namespace mocco::numcore
