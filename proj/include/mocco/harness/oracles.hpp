#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "mocco/envs/env.hpp"

namespace mocco::oracles {

// Central finite differences of a scalar function, one coordinate at a time.
std::vector<double> finite_difference_gradient(
    const std::function<double(const std::vector<double>&)>& f,
    const std::vector<double>& x, double h);

// Monte-Carlo estimate of E ||a||_2 for a uniform draw over the action box.
// Independent of the production estimator: plain mean over fresh draws.
double mc_expected_action_norm(const envs::EnvSpec& spec, long long samples,
                               uint64_t seed);

// Discounted return by the forward sum R = sum_k gamma^k r_k, a different
// evaluation order than the production backward recurrence.
double discounted_return_forward(const std::vector<double>& rewards, double gamma);

// Stationary variance of x <- x + theta (0 - x) + sigma N(0,1), an AR(1)
// process with coefficient (1 - theta): sigma^2 / (2 theta - theta^2).
double ou_stationary_variance(double theta, double sigma);

// Empirical long-run variance of the same recurrence.
double ou_empirical_variance(double theta, double sigma, long long steps, uint64_t seed);

// Prints one labelled line per reference value (used by `test-oracles`).
void print_oracle_report(std::ostream& out);

}  // namespace mocco::oracles
