#pragma once

#include <string>
#include <utility>

#include "mocco/agent/agent.hpp"
#include "mocco/envs/env.hpp"
#include "mocco/harness/config.hpp"

namespace mocco::harness {

struct TrainResult {
  std::string output_dir;
  std::string metrics_jsonl;
  long long steps_run = 0;
  bool failed = false;             // numeric divergence aborted the run
  std::string failure_message;
  bool early_stopped = false;
  // Environment step at which the first successful training episode ended;
  // -1 when no episode succeeded within the budget.
  long long first_success_step = -1;
  // Mean of the last (up to) 10 evaluation means; NaN when no row was
  // written.
  double final10_mean = 0.0;
};

// Runs one full training loop per the config: action selection, environment
// step, episode staging and finalization into the replay and MC-return
// buffers, critic update, controller update (when a controller is attached),
// and delayed actor plus target updates. Emits a MetricRecord every
// eval_interval steps, a config echo, and a summary.json. Deterministic per
// seed, apart from timing.csv.
TrainResult run_training(const RunConfig& cfg);

// Mean and population std of undiscounted returns over `episodes` greedy
// episodes, each reset with a seed derived from `seed` and the episode
// index.
std::pair<double, double> evaluate_policy(const agents::Agent& agent, envs::Env& env,
                                          int episodes, uint64_t seed);

}  // namespace mocco::harness
