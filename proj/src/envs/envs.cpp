#include "mocco/envs/env.hpp"

#include <algorithm>
#include <cmath>

#include "mocco/envs/pendulum_swingup.hpp"
#include "mocco/envs/point_mass.hpp"
#include "mocco/envs/sparse_mountain_car.hpp"
#include "mocco/errors.hpp"
#include "mocco/rng.hpp"

namespace mocco::envs {

void Env::inject_state(const std::vector<double>&) {
  throw UnsupportedError("state injection not supported by " + name());
}

void Env::validate_action(const std::vector<double>& action) const {
  if (static_cast<int>(action.size()) != spec().action_dim)
    throw ShapeError("env step: action dim mismatch for " + name());
  for (double a : action)
    if (!std::isfinite(a)) throw NumericError("env step: non-finite action");
}

std::unique_ptr<Env> make_env(const std::string& name) {
  if (name == "point_mass") return std::make_unique<PointMass2D>();
  if (name == "pendulum_swingup") return std::make_unique<PendulumSwingup>();
  if (name == "sparse_mountain_car") return std::make_unique<SparseMountainCar>();
  throw ConfigError("unknown environment: " + name);
}

// ---------------------------------------------------------------- PointMass2D

PointMass2D::PointMass2D() {
  spec_.obs_dim = 4;
  spec_.action_dim = 2;
  spec_.action_low = {-1.0, -1.0};
  spec_.action_high = {1.0, 1.0};
  spec_.max_episode_steps = kMaxSteps;
}

std::vector<double> PointMass2D::reset(uint64_t seed) {
  RandomStream rng(seed);
  x_ = rng.uniform(-kResetHalfRange, kResetHalfRange);
  y_ = rng.uniform(-kResetHalfRange, kResetHalfRange);
  vx_ = vy_ = 0.0;
  steps_ = 0;
  return observation();
}

StepResult PointMass2D::step(const std::vector<double>& action) {
  validate_action(action);
  vx_ = std::clamp(vx_ + kDt * (kGain * action[0] - kDamping * vx_), -kVelLimit, kVelLimit);
  vy_ = std::clamp(vy_ + kDt * (kGain * action[1] - kDamping * vy_), -kVelLimit, kVelLimit);
  x_ = std::clamp(x_ + kDt * vx_, -kPosLimit, kPosLimit);
  y_ = std::clamp(y_ + kDt * vy_, -kPosLimit, kPosLimit);

  const double d = std::hypot(x_, y_);
  double reward = 1.0;
  if (d > kTargetRadius) {
    const double z = (d - kTargetRadius) / kRewardSigma;
    reward = std::exp(-0.5 * z * z);
  }

  ++steps_;
  StepResult r;
  r.observation = observation();
  r.reward = reward;
  r.terminated = false;
  r.truncated = steps_ >= kMaxSteps;
  return r;
}

void PointMass2D::inject_state(const std::vector<double>& obs) {
  if (obs.size() != 4) throw ShapeError("point_mass inject_state: need 4 values");
  x_ = std::clamp(obs[0], -kPosLimit, kPosLimit);
  y_ = std::clamp(obs[1], -kPosLimit, kPosLimit);
  vx_ = std::clamp(obs[2], -kVelLimit, kVelLimit);
  vy_ = std::clamp(obs[3], -kVelLimit, kVelLimit);
  steps_ = 0;
}

// ------------------------------------------------------------ PendulumSwingup

namespace {
double wrap_angle(double theta) {
  return theta - 2.0 * M_PI * std::floor((theta + M_PI) / (2.0 * M_PI));
}
}  // namespace

PendulumSwingup::PendulumSwingup() {
  spec_.obs_dim = 3;
  spec_.action_dim = 1;
  spec_.action_low = {-1.0};
  spec_.action_high = {1.0};
  spec_.max_episode_steps = kMaxSteps;
}

std::vector<double> PendulumSwingup::observation() const {
  return {std::cos(theta_), std::sin(theta_), omega_};
}

std::vector<double> PendulumSwingup::reset(uint64_t seed) {
  RandomStream rng(seed);
  theta_ = wrap_angle(M_PI + rng.uniform(-kResetJitter, kResetJitter));
  omega_ = 0.0;
  steps_ = 0;
  return observation();
}

StepResult PendulumSwingup::step(const std::vector<double>& action) {
  validate_action(action);
  const double torque = kMaxTorque * action[0];
  const double gravity_term = -(3.0 * kGravity / (2.0 * kLength)) * std::sin(theta_ + M_PI);
  const double torque_term = (3.0 / (kMass * kLength * kLength)) * torque;
  omega_ = std::clamp(omega_ + kDt * (gravity_term + torque_term), -kMaxSpeed, kMaxSpeed);
  theta_ = wrap_angle(theta_ + kDt * omega_);

  ++steps_;
  StepResult r;
  r.observation = observation();
  r.reward = std::cos(theta_) >= kUprightCos ? 1.0 : 0.0;
  r.terminated = false;
  r.truncated = steps_ >= kMaxSteps;
  return r;
}

void PendulumSwingup::inject_state(const std::vector<double>& obs) {
  if (obs.size() != 3) throw ShapeError("pendulum inject_state: need 3 values");
  theta_ = std::atan2(obs[1], obs[0]);
  omega_ = std::clamp(obs[2], -kMaxSpeed, kMaxSpeed);
  steps_ = 0;
}

// ---------------------------------------------------------- SparseMountainCar

SparseMountainCar::SparseMountainCar() {
  spec_.obs_dim = 2;
  spec_.action_dim = 1;
  spec_.action_low = {-1.0};
  spec_.action_high = {1.0};
  spec_.max_episode_steps = kMaxSteps;
}

std::vector<double> SparseMountainCar::reset(uint64_t seed) {
  RandomStream rng(seed);
  pos_ = rng.uniform(kResetLow, kResetHigh);
  vel_ = 0.0;
  steps_ = 0;
  return {pos_, vel_};
}

StepResult SparseMountainCar::step(const std::vector<double>& action) {
  validate_action(action);
  vel_ += action[0] * kPower - kGravity * std::cos(3.0 * pos_);
  vel_ = std::clamp(vel_, -kMaxSpeed, kMaxSpeed);
  pos_ += vel_;
  pos_ = std::clamp(pos_, kMinPos, kMaxPos);
  if (pos_ <= kMinPos && vel_ < 0.0) vel_ = 0.0;  // inelastic left wall

  ++steps_;
  StepResult r;
  r.observation = {pos_, vel_};
  r.terminated = pos_ >= kGoalPos;
  r.reward = -kActionCost * action[0] * action[0] + (r.terminated ? kGoalReward : 0.0);
  r.truncated = steps_ >= kMaxSteps;
  return r;
}

void SparseMountainCar::inject_state(const std::vector<double>& obs) {
  if (obs.size() != 2) throw ShapeError("mountain car inject_state: need 2 values");
  pos_ = std::clamp(obs[0], kMinPos, kMaxPos);
  vel_ = std::clamp(obs[1], -kMaxSpeed, kMaxSpeed);
  steps_ = 0;
}

}  // namespace mocco::envs
