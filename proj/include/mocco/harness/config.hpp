#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mocco/agent/agent.hpp"

namespace mocco::harness {

// Full description of one training run. Flat key-value config file (JSON
// object, no nesting except the hidden_sizes array); every field has a
// default, unknown keys are rejected. See README for the schema.
struct RunConfig {
  std::string env_name = "point_mass";
  std::string agent_name = "td3";
  std::string exploration_mode = "gaussian";

  long long total_steps = 200000;
  long long eval_interval = 2000;
  int eval_episodes = 10;
  uint64_t seed = 0;

  double gamma = 0.99;
  double tau = 0.005;
  int policy_delay = 2;
  int batch_size = 256;
  double beta = 0.1;
  double gaussian_sigma = 0.1;
  double ou_theta = 0.15;
  double ou_sigma = 0.2;
  double target_noise_sigma = 0.2;
  double target_noise_clip = 0.5;
  int warmup_steps = 1000;
  std::vector<int> hidden_sizes = {256, 256};
  double learning_rate = 3e-4;

  long long replay_capacity = 1000000;
  long long mc_capacity = 100000;

  int ensemble_size = 3;
  int zeta_window = 1000;
  int controller_batch_size = 256;
  int epsilon_samples = 100000;

  // Q-diagnostics cadence; 0 disables the probe. qdiag_horizon 0 means the
  // environment's own episode limit.
  long long qdiag_interval = 0;
  int qdiag_batch = 256;
  int qdiag_horizon = 0;

  // Per-step (zeta, a_e) trace cadence for guided runs; 0 disables.
  long long trace_interval = 0;

  // Optional early stop: end the run once an evaluation mean reaches the
  // given return.
  bool early_stop = false;
  double early_stop_return = 0.0;

  bool save_snapshot = true;
  std::string output_dir = "runs/out";

  agents::AgentConfig agent_config() const;
  agents::AgentKind agent_kind() const;
  agents::ExplorationMode mode() const;
  bool needs_controller() const;

  // Throws ConfigError with a field-specific message on any bad value.
  void validate() const;
};

// Reads a JSON config file; absent keys keep their defaults, unknown keys
// are an error. `path` empty returns all defaults.
RunConfig load_config(const std::string& path);

// Applies "key=value" override strings on top of a parsed config.
void apply_overrides(RunConfig& cfg, const std::vector<std::string>& overrides);

// Writes the full config (every field, canonical key order) as JSON.
void save_config(const RunConfig& cfg, const std::string& path);
std::string config_to_json(const RunConfig& cfg);

}  // namespace mocco::harness
