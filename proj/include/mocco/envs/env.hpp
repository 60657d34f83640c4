#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace mocco::envs {

struct EnvSpec {
  int obs_dim = 0;
  int action_dim = 0;
  std::vector<double> action_low, action_high;
  int max_episode_steps = 0;
};

struct StepResult {
  std::vector<double> observation;
  double reward = 0.0;
  bool terminated = false;  // reached a terminal state
  bool truncated = false;   // hit the episode time limit
};

// Episodic continuous-control environment. Dynamics are deterministic given
// state and action; the only randomness is the reset draw, which is fully
// determined by the seed passed to reset().
class Env {
 public:
  virtual ~Env() = default;

  virtual const EnvSpec& spec() const = 0;
  virtual const std::string& name() const = 0;

  // Draws the initial state and zeroes the step counter.
  virtual std::vector<double> reset(uint64_t seed) = 0;

  // Caller is expected to clip the action into [action_low, action_high]
  // first. Throws NumericError on non-finite actions.
  virtual StepResult step(const std::vector<double>& action) = 0;

  // Diagnostics hook: rebuild internal state from an observation and zero
  // the step counter. All bundled environments support this.
  virtual bool supports_state_injection() const { return false; }
  virtual void inject_state(const std::vector<double>& observation);

  // Whether a finished episode counts as a "success" for the
  // steps-to-first-success statistic (per-env rule, see README).
  virtual bool is_success_episode(double undiscounted_return, bool terminated) const = 0;

 protected:
  void validate_action(const std::vector<double>& action) const;
};

// Known names: "point_mass", "pendulum_swingup", "sparse_mountain_car".
std::unique_ptr<Env> make_env(const std::string& name);

}  // namespace mocco::envs
