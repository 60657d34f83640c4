#pragma once

#include "mocco/envs/env.hpp"

namespace mocco::envs {

// Planar point mass pushed by a 2-D force toward a target at the origin.
// State (x, y, vx, vy); semi-implicit Euler with damping. Reward is 1 inside
// the target radius and falls off with a Gaussian profile outside, so it is
// dense and bounded in (0, 1].
class PointMass2D final : public Env {
 public:
  static constexpr double kPosLimit = 0.3;
  static constexpr double kVelLimit = 2.0;
  static constexpr double kDt = 0.02;
  static constexpr double kGain = 1.0;
  static constexpr double kDamping = 0.5;
  static constexpr double kTargetRadius = 0.05;
  static constexpr double kRewardSigma = 0.1;
  static constexpr double kResetHalfRange = 0.25;
  static constexpr int kMaxSteps = 250;
  // Episode return at least this much counts as a success (max is 250).
  static constexpr double kSuccessReturn = 200.0;

  PointMass2D();

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
  std::vector<double> observation() const { return {x_, y_, vx_, vy_}; }

  EnvSpec spec_;
  std::string name_ = "point_mass";
  double x_ = 0.0, y_ = 0.0, vx_ = 0.0, vy_ = 0.0;
  int steps_ = 0;
};

}  // namespace mocco::envs
