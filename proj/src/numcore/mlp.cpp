#include "mocco/numcore/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "mocco/errors.hpp"
#include "mocco/rng.hpp"

namespace mocco::numcore {

bool MlpParams::same_shape(const MlpParams& other) const {
  return layer_sizes == other.layer_sizes;
}

bool MlpParams::all_finite() const {
  for (const auto& w : weights)
    for (double v : w.data)
      if (!std::isfinite(v)) return false;
  for (const auto& b : biases)
    for (double v : b)
      if (!std::isfinite(v)) return false;
  return true;
}

void MlpParams::set_zero() {
  for (auto& w : weights) w.set_zero();
  for (auto& b : biases) std::fill(b.begin(), b.end(), 0.0);
}

MlpParams mlp_init(const std::vector<int>& layer_sizes, uint64_t seed) {
  if (layer_sizes.size() < 2)
    throw ConfigError("mlp_init: need at least input and output layer sizes");
  for (int s : layer_sizes)
    if (s <= 0) throw ConfigError("mlp_init: layer sizes must be positive");

  MlpParams p;
  p.layer_sizes = layer_sizes;
  RandomStream rng(seed);
  for (size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    const int in = layer_sizes[l];
    const int out = layer_sizes[l + 1];
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    Matrix w(in, out);
    for (double& v : w.data) v = rng.uniform(-bound, bound);
    std::vector<double> b(out);
    for (double& v : b) v = rng.uniform(-bound, bound);
    p.weights.push_back(std::move(w));
    p.biases.push_back(std::move(b));
  }
  return p;
}

MlpParams mlp_zeros_like(const MlpParams& params) {
  MlpParams z;
  z.layer_sizes = params.layer_sizes;
  for (const auto& w : params.weights) z.weights.emplace_back(w.rows, w.cols);
  for (const auto& b : params.biases) z.biases.emplace_back(b.size(), 0.0);
  return z;
}

namespace {

void check_head(const MlpParams& params, const HeadSpec& head) {
  if (head.head == OutputHead::tanh_bounded) {
    const size_t out = static_cast<size_t>(params.output_dim());
    if (head.low.size() != out || head.high.size() != out)
      throw ShapeError("head bounds do not match the network output dim");
  }
}

// y (b x out) += X (b x in) * W (in x out), input rows may be sparse after ReLU.
void affine_forward(const Matrix& X, const Matrix& W, const std::vector<double>& bias,
                    Matrix& Y) {
  const int B = X.rows, in = W.rows, out = W.cols;
  for (int b = 0; b < B; ++b) {
    double* y = Y.row(b);
    std::copy(bias.begin(), bias.end(), y);
    const double* x = X.row(b);
    for (int i = 0; i < in; ++i) {
      const double xi = x[i];
      if (xi == 0.0) continue;
      const double* w = W.row(i);
      for (int j = 0; j < out; ++j) y[j] += xi * w[j];
    }
  }
}

}  // namespace

Matrix mlp_forward_batch(const MlpParams& params, const Matrix& X,
                         const HeadSpec& head, ForwardCache* cache) {
  if (X.cols != params.input_dim())
    throw ShapeError("mlp_forward: input dim mismatch");
  check_head(params, head);

  const int L = params.num_layers();
  ForwardCache local;
  ForwardCache& c = cache ? *cache : local;
  c.pre.assign(L, Matrix{});
  c.post.assign(L + 1, Matrix{});
  c.post[0] = X;

  for (int l = 0; l < L; ++l) {
    const Matrix& W = params.weights[l];
    Matrix z(X.rows, W.cols);
    affine_forward(c.post[l], W, params.biases[l], z);
    Matrix a = z;
    if (l + 1 < L) {
      for (double& v : a.data) v = v > 0.0 ? v : 0.0;  // ReLU, subgradient 0 at 0
    } else if (head.head == OutputHead::tanh_bounded) {
      for (int b = 0; b < a.rows; ++b) {
        double* row = a.row(b);
        for (int j = 0; j < a.cols; ++j) {
          const double mid = 0.5 * (head.low[j] + head.high[j]);
          const double half = 0.5 * (head.high[j] - head.low[j]);
          row[j] = mid + half * std::tanh(row[j]);
        }
      }
    }
    c.pre[l] = std::move(z);
    c.post[l + 1] = std::move(a);
  }
  return c.post[L];
}

std::vector<double> mlp_forward(const MlpParams& params,
                                const std::vector<double>& input,
                                const HeadSpec& head) {
  if (static_cast<int>(input.size()) != params.input_dim())
    throw ShapeError("mlp_forward: input dim mismatch");
  Matrix X(1, params.input_dim());
  std::copy(input.begin(), input.end(), X.data.begin());
  Matrix Y = mlp_forward_batch(params, X, head);
  return Y.data;
}

void mlp_backward_batch(const MlpParams& params, const ForwardCache& cache,
                        const Matrix& upstream, const HeadSpec& head,
                        MlpParams* param_grads, Matrix* input_grads) {
  const int L = params.num_layers();
  const int B = upstream.rows;
  if (upstream.cols != params.output_dim())
    throw ShapeError("mlp_backward: upstream dim mismatch");

  // dz for the output layer.
  Matrix dz = upstream;
  if (head.head == OutputHead::tanh_bounded) {
    const Matrix& z = cache.pre[L - 1];
    for (int b = 0; b < B; ++b) {
      double* d = dz.row(b);
      const double* zr = z.row(b);
      for (int j = 0; j < dz.cols; ++j) {
        const double half = 0.5 * (head.high[j] - head.low[j]);
        const double t = std::tanh(zr[j]);
        d[j] *= half * (1.0 - t * t);
      }
    }
  }

  for (int l = L - 1; l >= 0; --l) {
    const Matrix& W = params.weights[l];
    const Matrix& x = cache.post[l];
    if (param_grads) {
      Matrix& wg = param_grads->weights[l];
      std::vector<double>& bg = param_grads->biases[l];
      for (int b = 0; b < B; ++b) {
        const double* xr = x.row(b);
        const double* dr = dz.row(b);
        for (int j = 0; j < W.cols; ++j) bg[j] += dr[j];
        for (int i = 0; i < W.rows; ++i) {
          const double xi = xr[i];
          if (xi == 0.0) continue;
          double* wr = wg.row(i);
          for (int j = 0; j < W.cols; ++j) wr[j] += xi * dr[j];
        }
      }
    }
    const bool need_dx = l > 0 || input_grads != nullptr;
    if (!need_dx) break;
    Matrix dx(B, W.rows);
    for (int b = 0; b < B; ++b) {
      const double* dr = dz.row(b);
      double* dxr = dx.row(b);
      for (int i = 0; i < W.rows; ++i) {
        const double* wr = W.row(i);
        double acc = 0.0;
        for (int j = 0; j < W.cols; ++j) acc += wr[j] * dr[j];
        dxr[i] = acc;
      }
    }
    if (l == 0) {
      *input_grads = std::move(dx);
    } else {
      const Matrix& z = cache.pre[l - 1];
      for (size_t k = 0; k < dx.data.size(); ++k)
        dx.data[k] = z.data[k] > 0.0 ? dx.data[k] : 0.0;
      dz = std::move(dx);
    }
  }
}

GradientBundle mlp_grad_params(const MlpParams& params,
                               const std::vector<double>& input,
                               double upstream_scalar, const HeadSpec& head) {
  if (params.output_dim() != 1)
    throw ShapeError("mlp_grad_params: scalar-output network required");
  if (!std::isfinite(upstream_scalar))
    throw NumericError("mlp_grad_params: non-finite upstream gradient");

  Matrix X(1, params.input_dim());
  if (static_cast<int>(input.size()) != params.input_dim())
    throw ShapeError("mlp_grad_params: input dim mismatch");
  std::copy(input.begin(), input.end(), X.data.begin());

  ForwardCache cache;
  mlp_forward_batch(params, X, head, &cache);

  Matrix upstream(1, 1);
  upstream.data[0] = upstream_scalar;

  GradientBundle g;
  g.by_parameter = mlp_zeros_like(params);
  Matrix dx;
  mlp_backward_batch(params, cache, upstream, head, &g.by_parameter, &dx);
  g.by_input = dx.data;
  return g;
}

std::vector<double> mlp_grad_input(const MlpParams& params,
                                   const std::vector<double>& input,
                                   const HeadSpec& head) {
  if (params.output_dim() != 1)
    throw ShapeError("mlp_grad_input: scalar-output network required");
  if (static_cast<int>(input.size()) != params.input_dim())
    throw ShapeError("mlp_grad_input: input dim mismatch");

  Matrix X(1, params.input_dim());
  std::copy(input.begin(), input.end(), X.data.begin());
  ForwardCache cache;
  mlp_forward_batch(params, X, head, &cache);
  Matrix upstream(1, 1);
  upstream.data[0] = 1.0;
  Matrix dx;
  mlp_backward_batch(params, cache, upstream, head, nullptr, &dx);
  return dx.data;
}

void soft_update(MlpParams& target, const MlpParams& source, double tau) {
  if (!target.same_shape(source))
    throw ShapeError("soft_update: topology mismatch");
  for (int l = 0; l < target.num_layers(); ++l) {
    auto& tw = target.weights[l].data;
    const auto& sw = source.weights[l].data;
    for (size_t k = 0; k < tw.size(); ++k) tw[k] = tau * sw[k] + (1.0 - tau) * tw[k];
    auto& tb = target.biases[l];
    const auto& sb = source.biases[l];
    for (size_t k = 0; k < tb.size(); ++k) tb[k] = tau * sb[k] + (1.0 - tau) * tb[k];
  }
}

namespace {
constexpr char kSnapshotMagic[8] = {'M', 'O', 'C', 'C', 'O', 'M', 'L', 'P'};
}

void save_params(const MlpParams& params, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("save_params: cannot open " + path);
  out.write(kSnapshotMagic, sizeof(kSnapshotMagic));
  const uint32_t n = static_cast<uint32_t>(params.layer_sizes.size());
  out.write(reinterpret_cast<const char*>(&n), sizeof(n));
  for (int s : params.layer_sizes) {
    const uint32_t v = static_cast<uint32_t>(s);
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
  }
  for (int l = 0; l < params.num_layers(); ++l) {
    const auto& w = params.weights[l].data;
    out.write(reinterpret_cast<const char*>(w.data()),
              static_cast<std::streamsize>(w.size() * sizeof(double)));
    const auto& b = params.biases[l];
    out.write(reinterpret_cast<const char*>(b.data()),
              static_cast<std::streamsize>(b.size() * sizeof(double)));
  }
  if (!out) throw ConfigError("save_params: write failed for " + path);
}

MlpParams load_params(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("load_params: cannot open " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kSnapshotMagic, sizeof(magic)) != 0)
    throw ConfigError("load_params: bad snapshot header in " + path);
  uint32_t n = 0;
  in.read(reinterpret_cast<char*>(&n), sizeof(n));
  if (!in || n < 2) throw ConfigError("load_params: corrupt layer count");
  std::vector<int> sizes(n);
  for (uint32_t i = 0; i < n; ++i) {
    uint32_t v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof(v));
    sizes[i] = static_cast<int>(v);
  }
  MlpParams p = mlp_init(sizes, 0);
  for (int l = 0; l < p.num_layers(); ++l) {
    auto& w = p.weights[l].data;
    in.read(reinterpret_cast<char*>(w.data()),
            static_cast<std::streamsize>(w.size() * sizeof(double)));
    auto& b = p.biases[l];
    in.read(reinterpret_cast<char*>(b.data()),
            static_cast<std::streamsize>(b.size() * sizeof(double)));
  }
  if (!in) throw ConfigError("load_params: truncated snapshot " + path);
  return p;
}

}  // namespace mocco::numcore
