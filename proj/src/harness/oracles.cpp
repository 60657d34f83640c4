#include "mocco/harness/oracles.hpp"

#include <cmath>
#include <ostream>

#include "mocco/controller/controller.hpp"
#include "mocco/errors.hpp"
#include "mocco/rng.hpp"

namespace mocco::oracles {

std::vector<double> finite_difference_gradient(
    const std::function<double(const std::vector<double>&)>& f,
    const std::vector<double>& x, double h) {
  if (h <= 0.0) throw ConfigError("finite differences need h > 0");
  std::vector<double> grad(x.size());
  std::vector<double> probe = x;
  for (size_t d = 0; d < x.size(); ++d) {
    probe[d] = x[d] + h;
    const double up = f(probe);
    probe[d] = x[d] - h;
    const double down = f(probe);
    probe[d] = x[d];
    grad[d] = (up - down) / (2.0 * h);
  }
  return grad;
}

double mc_expected_action_norm(const envs::EnvSpec& spec, long long samples,
                               uint64_t seed) {
  if (samples < 1) throw ConfigError("mc_expected_action_norm: samples must be >= 1");
  RandomStream rng(seed);
  double sum = 0.0;
  for (long long k = 0; k < samples; ++k) {
    double sq = 0.0;
    for (int d = 0; d < spec.action_dim; ++d) {
      const double a = rng.uniform(spec.action_low[d], spec.action_high[d]);
      sq += a * a;
    }
    sum += std::sqrt(sq);
  }
  return sum / static_cast<double>(samples);
}

double discounted_return_forward(const std::vector<double>& rewards, double gamma) {
  double ret = 0.0;
  double discount = 1.0;
  for (double r : rewards) {
    ret += discount * r;
    discount *= gamma;
  }
  return ret;
}

double ou_stationary_variance(double theta, double sigma) {
  return sigma * sigma / (2.0 * theta - theta * theta);
}

double ou_empirical_variance(double theta, double sigma, long long steps, uint64_t seed) {
  RandomStream rng(seed);
  double x = 0.0;
  double sum = 0.0, sum_sq = 0.0;
  for (long long k = 0; k < steps; ++k) {
    x = x + theta * (0.0 - x) + sigma * rng.normal();
    sum += x;
    sum_sq += x * x;
  }
  const double mean = sum / steps;
  return sum_sq / steps - mean * mean;
}

void print_oracle_report(std::ostream& out) {
  envs::EnvSpec box1;
  box1.action_dim = 1;
  box1.action_low = {-1.0};
  box1.action_high = {1.0};
  envs::EnvSpec box2 = box1;
  box2.action_dim = 2;
  box2.action_low = {-1.0, -1.0};
  box2.action_high = {1.0, 1.0};

  out << "epsilon_1d_closed_form([-1,1]) = "
      << controller::epsilon_init(box1, 1, 0) << "  (exact 0.5)\n";
  out << "epsilon_2d_mc_oracle([-1,1]^2, 1e6 samples) = "
      << mc_expected_action_norm(box2, 1000000, 42) << "\n";
  out << "epsilon_2d_production([-1,1]^2) = "
      << controller::epsilon_init(box2, 1000000, 7) << "\n";

  const std::vector<double> rewards = {1.0, -2.0, 0.5, 3.0};
  out << "discounted_return_forward({1,-2,0.5,3}, gamma=0.9) = "
      << discounted_return_forward(rewards, 0.9) << "\n";

  out << "ou_stationary_variance(theta=0.15, sigma=0.2) = "
      << ou_stationary_variance(0.15, 0.2) << "\n";
  out << "ou_empirical_variance(theta=0.15, sigma=0.2, 1e6 steps) = "
      << ou_empirical_variance(0.15, 0.2, 1000000, 3) << "\n";

  const std::vector<double> x = {0.3, -0.2};
  auto f = [](const std::vector<double>& v) {
    return v[0] * v[0] * v[1] + std::sin(v[1]);
  };
  const std::vector<double> g = finite_difference_gradient(f, x, 1e-5);
  out << "fd_gradient(x^2 y + sin y at (0.3,-0.2)) = (" << g[0] << ", " << g[1]
      << ")  (exact (" << 2.0 * x[0] * x[1] << ", "
      << x[0] * x[0] + std::cos(x[1]) << "))\n";
}

}  // namespace mocco::oracles
