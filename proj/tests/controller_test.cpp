#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "mocco/controller/controller.hpp"
#include "mocco/errors.hpp"
#include "mocco/harness/oracles.hpp"
#include "mocco/numcore/mlp.hpp"
#include "mocco/rng.hpp"

using namespace mocco;
using namespace mocco::controller;
using numcore::MlpParams;

namespace {

std::vector<double> concat(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

double max_abs_param_diff(const MlpParams& a, const MlpParams& b) {
  double m = 0.0;
  for (int l = 0; l < a.num_layers(); ++l) {
    for (size_t k = 0; k < a.weights[l].data.size(); ++k)
      m = std::max(m, std::fabs(a.weights[l].data[k] - b.weights[l].data[k]));
    for (size_t k = 0; k < a.biases[l].size(); ++k)
      m = std::max(m, std::fabs(a.biases[l][k] - b.biases[l][k]));
  }
  return m;
}

// Linear scalar net q = w . x + b over the concatenated (state, action).
MlpParams linear_member(const std::vector<double>& w, double b) {
  MlpParams p = numcore::mlp_init({static_cast<int>(w.size()), 1}, 0);
  p.weights[0].data = w;
  p.biases[0][0] = b;
  return p;
}

double min_hidden_preactivation(const MlpParams& p, const std::vector<double>& x) {
  numcore::Matrix X(1, p.input_dim());
  std::copy(x.begin(), x.end(), X.data.begin());
  numcore::ForwardCache cache;
  numcore::mlp_forward_batch(p, X, {}, &cache);
  double m = 1e300;
  for (int l = 0; l + 1 < p.num_layers(); ++l)
    for (double v : cache.pre[l].data) m = std::min(m, std::fabs(v));
  return m;
}

replay::MCRecord record(std::vector<double> s, std::vector<double> a, double ret) {
  replay::MCRecord r;
  r.state = std::move(s);
  r.action = std::move(a);
  r.mc_return = ret;
  return r;
}

}  // namespace

TEST_CASE("ensemble_init validates and builds the shared topology") {
  CHECK_THROWS_AS(ensemble_init(1, 2, 1, {8}, 1e-3, 0), ConfigError);
  CHECK_THROWS_AS(ensemble_init(0, 2, 1, {8}, 1e-3, 0), ConfigError);
  CHECK_THROWS_AS(ensemble_init(3, 0, 1, {8}, 1e-3, 0), ConfigError);
  CHECK_THROWS_AS(ensemble_init(3, 2, 0, {8}, 1e-3, 0), ConfigError);

  const Ensemble ens = ensemble_init(3, 4, 2, {16, 8}, 1e-3, 7);
  CHECK(ens.size() == 3);
  CHECK(ens.state_dim == 4);
  CHECK(ens.action_dim == 2);
  CHECK(ens.optimizers.size() == 3);
  for (const MlpParams& m : ens.members)
    CHECK(m.layer_sizes == std::vector<int>{6, 16, 8, 1});

  // Members start distinct (independent init) but the build is seeded.
  CHECK(max_abs_param_diff(ens.members[0], ens.members[1]) > 0.0);
  const Ensemble again = ensemble_init(3, 4, 2, {16, 8}, 1e-3, 7);
  for (int i = 0; i < 3; ++i)
    CHECK(max_abs_param_diff(ens.members[i], again.members[i]) == 0.0);
}

TEST_CASE("ensemble_predict equals per-member forward passes") {
  const Ensemble ens = ensemble_init(4, 3, 2, {10}, 1e-3, 11);
  const std::vector<double> s = {0.2, -0.4, 1.0};
  const std::vector<double> a = {0.5, -0.5};
  const std::vector<double> q = ensemble_predict(ens, s, a);
  REQUIRE(q.size() == 4);
  for (int i = 0; i < 4; ++i)
    CHECK(q[i] == numcore::mlp_forward(ens.members[i], concat(s, a))[0]);

  CHECK_THROWS_AS(ensemble_predict(ens, {0.0}, a), ShapeError);
  CHECK_THROWS_AS(ensemble_predict(ens, s, {0.0}), ShapeError);
}

TEST_CASE("uncertainty is the population variance of member outputs") {
  // Members with zero weights and biases 1, 2, 3: variance is 2/3.
  Ensemble ens = ensemble_init(3, 1, 1, {}, 1e-3, 0);
  ens.members[0] = linear_member({0.0, 0.0}, 1.0);
  ens.members[1] = linear_member({0.0, 0.0}, 2.0);
  ens.members[2] = linear_member({0.0, 0.0}, 3.0);
  CHECK(uncertainty(ens, {0.3}, {-0.2}) == 2.0 / 3.0);

  // Shifting every member by the same constant leaves it unchanged.
  for (int i = 0; i < 3; ++i) ens.members[i].biases[0][0] += 10.0;
  CHECK(uncertainty(ens, {0.3}, {-0.2}) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));

  // Member order is immaterial.
  std::swap(ens.members[0], ens.members[2]);
  CHECK(uncertainty(ens, {0.3}, {-0.2}) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));

  // Identical members disagree nowhere.
  Ensemble same = ensemble_init(3, 2, 1, {8}, 1e-3, 5);
  same.members[1] = same.members[0];
  same.members[2] = same.members[0];
  CHECK(uncertainty(same, {0.1, 0.2}, {0.3}) == 0.0);

  Ensemble rnd = ensemble_init(5, 2, 2, {12}, 1e-3, 9);
  RandomStream rng(10);
  for (int k = 0; k < 100; ++k) {
    const std::vector<double> s = {rng.normal(), rng.normal()};
    const std::vector<double> a = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    CHECK(uncertainty(rnd, s, a) >= 0.0);
  }
}

TEST_CASE("uncertainty_grad vanishes for identical members") {
  Ensemble ens = ensemble_init(3, 2, 2, {8}, 1e-3, 21);
  ens.members[1] = ens.members[0];
  ens.members[2] = ens.members[0];
  const std::vector<double> g = uncertainty_grad(ens, {0.5, -0.5}, {0.1, 0.9});
  CHECK(g == std::vector<double>{0.0, 0.0});

  // Equal weights with different biases also cancel exactly.
  Ensemble biased = ensemble_init(2, 1, 1, {}, 1e-3, 22);
  biased.members[0] = linear_member({0.7, -1.3}, 0.0);
  biased.members[1] = linear_member({0.7, -1.3}, 5.0);
  CHECK(uncertainty_grad(biased, {0.2}, {0.4}) == std::vector<double>{0.0});
}

TEST_CASE("uncertainty_grad matches the two-member linear formula") {
  Ensemble ens = ensemble_init(2, 1, 1, {}, 1e-3, 0);
  ens.members[0] = linear_member({0.5, 2.0}, 1.0);
  ens.members[1] = linear_member({-0.3, -1.0}, 0.0);
  const double s = 0.7, a = 0.4;
  const double q1 = 0.5 * s + 2.0 * a + 1.0;
  const double q2 = -0.3 * s - 1.0 * a + 0.0;
  // For two members: d(var)/da = ((q1 - q2) / 2) * (w1_a - w2_a).
  const double want = (q1 - q2) / 2.0 * (2.0 - (-1.0));
  const std::vector<double> g = uncertainty_grad(ens, {s}, {a});
  CHECK(g[0] == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("uncertainty_grad equals the member-gradient identity") {
  const Ensemble ens = ensemble_init(4, 3, 2, {10, 10}, 1e-3, 31);
  RandomStream rng(32);
  for (int k = 0; k < 50; ++k) {
    const std::vector<double> s = {rng.normal(), rng.normal(), rng.normal()};
    const std::vector<double> a = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    const std::vector<double> got = uncertainty_grad(ens, s, a);

    const std::vector<double> x = concat(s, a);
    const std::vector<double> q = ensemble_predict(ens, s, a);
    double mu = 0.0;
    for (double v : q) mu += v;
    mu /= ens.size();
    std::vector<double> want(2, 0.0);
    for (int i = 0; i < ens.size(); ++i) {
      const std::vector<double> gi = numcore::mlp_grad_input(ens.members[i], x);
      for (int d = 0; d < 2; ++d)
        want[d] += (2.0 / ens.size()) * (q[i] - mu) * gi[ens.state_dim + d];
    }
    for (int d = 0; d < 2; ++d) CHECK(std::fabs(got[d] - want[d]) <= 1e-10);
  }
}

TEST_CASE("uncertainty_grad agrees with finite differences") {
  const double h = 1e-5;
  RandomStream rng(41);
  uint64_t seed = 6000;
  int points = 0;
  while (points < 25) {
    const Ensemble ens = ensemble_init(3, 2, 2, {8}, 1e-3, seed++);
    const std::vector<double> s = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    const std::vector<double> a = {rng.uniform(-0.9, 0.9), rng.uniform(-0.9, 0.9)};
    const std::vector<double> x = concat(s, a);
    // Finite differences need a kink-free neighbourhood in every member.
    bool smooth = true;
    for (const MlpParams& m : ens.members)
      smooth = smooth && min_hidden_preactivation(m, x) > 1e-3;
    if (!smooth) continue;

    const std::vector<double> grad = uncertainty_grad(ens, s, a);
    const std::vector<double> fd = oracles::finite_difference_gradient(
        [&](const std::vector<double>& act) { return uncertainty(ens, s, act); }, a, h);
    double num = 0.0, den = 0.0;
    for (int d = 0; d < 2; ++d) {
      num += (fd[d] - grad[d]) * (fd[d] - grad[d]);
      den += grad[d] * grad[d];
    }
    CHECK(std::sqrt(num) <= 1e-4 * std::max(std::sqrt(den), 1e-8));
    ++points;
  }
}

TEST_CASE("controller_train_step leaves a perfect fit unchanged") {
  Ensemble ens = ensemble_init(2, 1, 1, {}, 1e-3, 0);
  ens.members[0] = linear_member({0.0, 0.0}, 2.5);
  ens.members[1] = linear_member({0.0, 0.0}, 2.5);
  const std::vector<MlpParams> before = ens.members;

  std::vector<replay::MCRecord> recs;
  for (int k = 0; k < 8; ++k)
    recs.push_back(record({0.1 * k}, {-0.05 * k}, 2.5));
  std::vector<const replay::MCRecord*> batch;
  for (const auto& r : recs) batch.push_back(&r);

  const double loss = controller_train_step(ens, batch);
  CHECK(loss == 0.0);
  for (int i = 0; i < 2; ++i)
    CHECK(max_abs_param_diff(ens.members[i], before[i]) == 0.0);
}

TEST_CASE("controller_train_step rejects bad batches without touching members") {
  Ensemble ens = ensemble_init(3, 2, 1, {8}, 1e-3, 51);
  const std::vector<MlpParams> before = ens.members;

  std::vector<const replay::MCRecord*> empty;
  CHECK_THROWS_AS(controller_train_step(ens, empty), ConfigError);

  std::vector<replay::MCRecord> recs;
  recs.push_back(record({0.1, 0.2}, {0.3}, 1.0));
  recs.push_back(record({0.4, 0.5}, {0.6}, std::nan("")));
  std::vector<const replay::MCRecord*> batch = {&recs[0], &recs[1]};
  CHECK_THROWS_AS(controller_train_step(ens, batch), NumericError);
  for (int i = 0; i < 3; ++i)
    CHECK(max_abs_param_diff(ens.members[i], before[i]) == 0.0);

  replay::MCRecord wrong = record({0.1}, {0.3}, 1.0);
  std::vector<const replay::MCRecord*> bad_shape = {&wrong};
  CHECK_THROWS_AS(controller_train_step(ens, bad_shape), ShapeError);
}

TEST_CASE("controller_train_step reports the pre-update loss and descends") {
  Ensemble ens = ensemble_init(2, 1, 1, {}, 1e-2, 0);
  ens.members[0] = linear_member({0.0, 0.0}, 1.0);  // predicts 1.0 everywhere
  ens.members[1] = linear_member({0.0, 0.0}, 3.0);  // predicts 3.0 everywhere

  std::vector<replay::MCRecord> recs = {record({0.0}, {0.0}, 2.0)};
  std::vector<const replay::MCRecord*> batch = {&recs[0]};
  const double loss = controller_train_step(ens, batch);
  CHECK(loss == (1.0 - 2.0) * (1.0 - 2.0) + (3.0 - 2.0) * (3.0 - 2.0));

  // Each member moved toward the shared target.
  CHECK(ens.members[0].biases[0][0] > 1.0);
  CHECK(ens.members[1].biases[0][0] < 3.0);
}

TEST_CASE("controller_train_step fits a small dataset") {
  Ensemble ens = ensemble_init(3, 2, 1, {32}, 1e-2, 61);
  RandomStream rng(62);
  std::vector<replay::MCRecord> recs;
  for (int k = 0; k < 10; ++k)
    recs.push_back(record({rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)},
                          {rng.uniform(-1.0, 1.0)}, rng.uniform(-2.0, 2.0)));
  std::vector<const replay::MCRecord*> batch;
  for (const auto& r : recs) batch.push_back(&r);

  double loss = 1e300;
  for (int it = 0; it < 50000 && loss >= 1e-5; ++it) loss = controller_train_step(ens, batch);
  CHECK(loss < 1e-5);

  // Once fitted, the disagreement at the training points is small too.
  double max_psi = 0.0;
  for (const auto& r : recs) max_psi = std::max(max_psi, uncertainty(ens, r.state, r.action));
  CHECK(max_psi < 1e-3);
}

TEST_CASE("epsilon_init closed forms") {
  envs::EnvSpec spec;
  spec.action_dim = 1;
  spec.action_low = {-1.0};
  spec.action_high = {1.0};
  CHECK(epsilon_init(spec, 10, 0) == 0.5);

  spec.action_low = {1.0};
  spec.action_high = {3.0};
  CHECK(epsilon_init(spec, 10, 0) == 2.0);

  spec.action_low = {-3.0};
  spec.action_high = {-1.0};
  CHECK(epsilon_init(spec, 10, 0) == 2.0);

  // Doubling the box doubles the expected norm.
  spec.action_low = {-2.0};
  spec.action_high = {2.0};
  CHECK(epsilon_init(spec, 10, 0) == 2.0 * 0.5);

  CHECK_THROWS_AS(epsilon_init(spec, 0, 0), ConfigError);
}

TEST_CASE("epsilon_init Monte Carlo estimate for the unit square") {
  envs::EnvSpec spec;
  spec.action_dim = 2;
  spec.action_low = {-1.0, -1.0};
  spec.action_high = {1.0, 1.0};
  // E||a|| over the square has the closed form (sqrt 2 + asinh 1) / 3.
  const double analytic = (std::sqrt(2.0) + std::log(1.0 + std::sqrt(2.0))) / 3.0;
  const double est = epsilon_init(spec, 100000, 7);
  CHECK(std::fabs(est - analytic) < 1e-2);
  CHECK(est == epsilon_init(spec, 100000, 7));
  CHECK(est != epsilon_init(spec, 100000, 8));

  // Cross-check against the independent oracle sampler.
  CHECK(std::fabs(oracles::mc_expected_action_norm(spec, 100000, 3) - analytic) < 1e-2);
}

TEST_CASE("ScalingState constructor validation") {
  CHECK_THROWS_AS(ScalingState(0, 10, 0.5), ConfigError);
  CHECK_THROWS_AS(ScalingState(2, 1, 0.5), ConfigError);
  CHECK_THROWS_AS(ScalingState(2, 10, 0.0), ConfigError);
  CHECK_THROWS_AS(ScalingState(2, 10, -1.0), ConfigError);
  const ScalingState st(2, 10, 0.5);
  CHECK(st.epsilon() == 0.5);
  CHECK(st.action_dim() == 2);
  CHECK(st.window_capacity() == 10);
  CHECK(st.window_size() == 0);
}

TEST_CASE("ScalingState warm-up and the zero-deviation rule") {
  ScalingState st(1, 4, 0.5);
  CHECK(st.update({1.0}) == std::vector<double>{1.0});  // single entry: warm-up

  // A constant history has sigma 0 and no recorded max: zeta stays 1.
  CHECK(st.update({1.0}) == std::vector<double>{1.0});
  CHECK(st.update({1.0}) == std::vector<double>{1.0});
  CHECK(st.running_max_sigma() == std::vector<double>{0.0});
}

TEST_CASE("ScalingState tracks deviation against the historical maximum") {
  ScalingState st(1, 4, 0.5);
  // Alternating +-1 fills the window with sigma exactly 1.
  for (int k = 0; k < 4; ++k) st.update({k % 2 == 0 ? 1.0 : -1.0});
  CHECK(st.running_max_sigma() == std::vector<double>{1.0});
  CHECK(st.window_size() == 4);

  // Quieter +-0.5 gradients: after the window turns over fully, sigma is
  // exactly 0.5 of the recorded maximum.
  std::vector<double> zeta;
  for (int k = 0; k < 4; ++k) zeta = st.update({k % 2 == 0 ? 0.5 : -0.5});
  CHECK(zeta == std::vector<double>{0.5});
  CHECK(st.running_max_sigma() == std::vector<double>{1.0});

  // A constant stream drives zeta to 0 once the max is positive.
  for (int k = 0; k < 4; ++k) zeta = st.update({0.25});
  CHECK(zeta == std::vector<double>{0.0});

  // The update that sets a new maximum reports zeta = 1 (max first).
  ScalingState fresh(1, 4, 0.5);
  for (int k = 0; k < 4; ++k) fresh.update({k % 2 == 0 ? 1.0 : -1.0});
  const std::vector<double> at_new_max = fresh.update({8.0});
  CHECK(at_new_max == std::vector<double>{1.0});
  CHECK(fresh.running_max_sigma()[0] > 1.0);
}

TEST_CASE("ScalingState evicts the oldest gradient") {
  ScalingState st(1, 2, 0.5);
  st.update({1.0});
  st.update({2.0});            // window {1, 2}, sigma 0.5, max 0.5
  auto z = st.update({3.0});   // window {3, 2} once 1 is evicted, sigma 0.5
  CHECK(z == std::vector<double>{1.0});
  CHECK(st.running_max_sigma() == std::vector<double>{0.5});
  z = st.update({10.0});       // window {3, 10}, sigma 3.5: new max
  CHECK(z == std::vector<double>{1.0});
  CHECK(st.running_max_sigma() == std::vector<double>{3.5});
  z = st.update({10.0});       // window {10, 10}, sigma 0
  CHECK(z == std::vector<double>{0.0});
  CHECK(st.window_size() == 2);
}

TEST_CASE("ScalingState input validation") {
  ScalingState st(2, 4, 0.5);
  CHECK_THROWS_AS(st.update({1.0}), ShapeError);
  CHECK_THROWS_AS(st.update({1.0, std::nan("")}), NumericError);
  CHECK_THROWS_AS(st.update({std::numeric_limits<double>::infinity(), 0.0}), NumericError);
}

TEST_CASE("ScalingState keeps zeta in [0, 1] with a monotone max") {
  ScalingState st(3, 50, 1.0);
  RandomStream rng(71);
  std::vector<double> prev_max(3, 0.0);
  for (int k = 0; k < 5000; ++k) {
    std::vector<double> g(3);
    for (double& v : g) v = rng.normal(0.0, std::exp(rng.uniform(-3.0, 3.0)));
    const std::vector<double> zeta = st.update(g);
    for (int d = 0; d < 3; ++d) {
      CHECK(zeta[d] >= 0.0);
      CHECK(zeta[d] <= 1.0);
      CHECK(st.running_max_sigma()[d] >= prev_max[d]);
    }
    prev_max = st.running_max_sigma();
  }
}

TEST_CASE("exploratory_correction vanishes for an agreeing ensemble") {
  Ensemble ens = ensemble_init(3, 2, 2, {8}, 1e-3, 81);
  ens.members[1] = ens.members[0];
  ens.members[2] = ens.members[0];
  ScalingState st(2, 10, 0.7);
  const Correction c = exploratory_correction(ens, st, {0.1, 0.2}, {0.0, 0.0});
  CHECK(c.a_e == std::vector<double>{0.0, 0.0});
  CHECK(c.raw_gradient == std::vector<double>{0.0, 0.0});
  CHECK(st.window_size() == 1);  // the window is fed even when the guard fires
}

TEST_CASE("exploratory_correction norm never exceeds epsilon") {
  const double eps = 0.7651;
  const Ensemble ens = ensemble_init(3, 2, 2, {10}, 1e-3, 91);
  ScalingState st(2, 100, eps);
  RandomStream rng(92);
  for (int k = 0; k < 2000; ++k) {
    const std::vector<double> s = {rng.normal(), rng.normal()};
    const std::vector<double> a = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    const Correction c = exploratory_correction(ens, st, s, a);
    const double norm = std::hypot(c.a_e[0], c.a_e[1]);
    CHECK(norm <= eps * (1.0 + 1e-12));
    for (double z : c.zeta) {
      CHECK(z >= 0.0);
      CHECK(z <= 1.0);
    }
  }
}

TEST_CASE("first correction of a fresh controller has full magnitude") {
  // Warm-up zeta is 1, so a 1-D correction lands exactly at +-epsilon.
  Ensemble ens = ensemble_init(2, 1, 1, {}, 1e-3, 0);
  ens.members[0] = linear_member({0.0, 1.0}, 0.0);
  ens.members[1] = linear_member({0.0, -1.0}, 0.0);
  ScalingState st(1, 10, 0.5);
  const Correction c = exploratory_correction(ens, st, {0.3}, {0.2});
  CHECK(std::fabs(c.a_e[0]) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(c.zeta == std::vector<double>{1.0});
}

TEST_CASE("exploratory_correction points along the disagreement direction") {
  // Members +-(w . a): the variance gradient is parallel to w with the sign
  // of (w . a).
  Ensemble ens = ensemble_init(2, 1, 2, {}, 1e-3, 0);
  ens.members[0] = linear_member({0.0, 3.0, 4.0}, 0.0);
  ens.members[1] = linear_member({0.0, -3.0, -4.0}, 0.0);
  ScalingState st(2, 10, 0.5);

  const Correction c = exploratory_correction(ens, st, {0.0}, {0.1, 0.2});
  // w . a = 1.1 > 0, unit direction (0.6, 0.8), warm-up zeta 1.
  CHECK(c.a_e[0] == doctest::Approx(0.5 * 0.6).epsilon(1e-12));
  CHECK(c.a_e[1] == doctest::Approx(0.5 * 0.8).epsilon(1e-12));

  ScalingState st2(2, 10, 0.5);
  const Correction flipped = exploratory_correction(ens, st2, {0.0}, {-0.1, -0.2});
  CHECK(flipped.a_e[0] == doctest::Approx(-0.5 * 0.6).epsilon(1e-12));
  CHECK(flipped.a_e[1] == doctest::Approx(-0.5 * 0.8).epsilon(1e-12));
}

TEST_CASE("corrections are deterministic") {
  auto run = [] {
    Ensemble ens = ensemble_init(3, 2, 2, {8}, 1e-3, 99);
    ScalingState st(2, 50, 0.7);
    std::vector<double> acc;
    RandomStream rng(100);
    for (int k = 0; k < 200; ++k) {
      const std::vector<double> s = {rng.normal(), rng.normal()};
      const std::vector<double> a = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
      const Correction c = exploratory_correction(ens, st, s, a);
      acc.insert(acc.end(), c.a_e.begin(), c.a_e.end());
    }
    return acc;
  };
  CHECK(run() == run());
}
