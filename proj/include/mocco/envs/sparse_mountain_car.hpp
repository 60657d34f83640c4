#pragma once

#include "mocco/envs/env.hpp"

namespace mocco::envs {

// Continuous-action mountain car with a sparse goal bonus. Reward is
// -0.1 * a^2 per step plus +100 once the car reaches the goal position, at
// which point the episode terminates. The engine is too weak to drive
// straight up, so undirected policies rarely see the bonus at all.
class SparseMountainCar final : public Env {
 public:
  static constexpr double kMinPos = -1.2;
  static constexpr double kMaxPos = 0.6;
  static constexpr double kMaxSpeed = 0.07;
  static constexpr double kPower = 0.0015;
  static constexpr double kGravity = 0.0025;
  static constexpr double kGoalPos = 0.45;
  static constexpr double kGoalReward = 100.0;
  static constexpr double kActionCost = 0.1;
  static constexpr double kResetLow = -0.6, kResetHigh = -0.4;
  static constexpr int kMaxSteps = 1000;

  SparseMountainCar();

  const EnvSpec& spec() const override { return spec_; }
  const std::string& name() const override { return name_; }
  std::vector<double> reset(uint64_t seed) override;
  StepResult step(const std::vector<double>& action) override;
  bool supports_state_injection() const override { return true; }
  void inject_state(const std::vector<double>& observation) override;
  bool is_success_episode(double, bool terminated) const override { return terminated; }

 private:
  EnvSpec spec_;
  std::string name_ = "sparse_mountain_car";
  double pos_ = 0.0, vel_ = 0.0;
  int steps_ = 0;
};

}  // namespace mocco::envs
