#pragma once

#include "mocco/envs/env.hpp"

namespace mocco::envs {

// Torque-limited pendulum swing-up. theta = 0 is upright, theta = pi hangs
// down. The motor torque (max 2.0) is far below the gravity torque m*g*l =
// 10, so the pole must be pumped; with the sparse reward this makes the task
// exploration-hard. Observation is (cos theta, sin theta, omega) to avoid
// the angle wrap discontinuity.
class PendulumSwingup final : public Env {
 public:
  static constexpr double kGravity = 10.0;
  static constexpr double kMass = 1.0;
  static constexpr double kLength = 1.0;
  static constexpr double kDt = 0.05;
  static constexpr double kMaxTorque = 2.0;
  static constexpr double kMaxSpeed = 8.0;
  static constexpr double kUprightCos = 0.95;  // reward 1 iff cos(theta) >= this
  static constexpr double kResetJitter = 0.05;
  static constexpr int kMaxSteps = 400;
  static constexpr double kSuccessReturn = 100.0;  // out of a 400 max

  PendulumSwingup();

  const EnvSpec& spec() const override { return spec_; }
  const std::string& name() const override { return name_; }
  std::vector<double> reset(uint64_t seed) override;
  StepResult step(const std::vector<double>& action) override;
  bool supports_state_injection() const override { return true; }
  void inject_state(const std::vector<double>& observation) override;
  bool is_success_episode(double undiscounted_return, bool) const override {
    return undiscounted_return >= kSuccessReturn;
  }

 private:
  std::vector<double> observation() const;

  EnvSpec spec_;
  std::string name_ = "pendulum_swingup";
  double theta_ = 0.0, omega_ = 0.0;
  int steps_ = 0;
};

}  // namespace mocco::envs
