#pragma once

#include <string>
#include <vector>

#include "mocco/agent/agent.hpp"
#include "mocco/controller/controller.hpp"
#include "mocco/envs/env.hpp"
#include "mocco/harness/metrics.hpp"
#include "mocco/replay/replay.hpp"

namespace mocco::harness {

// Batch-mean critic prediction, discounted return from replaying the greedy
// policy out of each sampled (state, action) (probe_env must support state
// injection), and MC-ensemble mean. Rollouts are capped at rollout_horizon
// steps (<= the env's episode limit), which biases q_true_mean downward.
QDiagnostics q_diagnostics_probe(const agents::Agent& agent,
                                 const controller::Ensemble& ensemble,
                                 envs::Env& probe_env,
                                 const std::vector<const replay::Transition*>& batch,
                                 int rollout_horizon, long long step);

// Lattice evaluation of the ensemble uncertainty and the first critic over
// the 2-D action box at `state`: resolution^2 CSV rows (a1, a2, psi, q).
// Throws UnsupportedError unless action_dim == 2.
void surface_dump(const agents::Agent& agent, const controller::Ensemble& ensemble,
                  const std::vector<double>& state, int resolution,
                  const std::string& path);

}  // namespace mocco::harness
