#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mocco/controller/controller.hpp"
#include "mocco/envs/env.hpp"
#include "mocco/numcore/adam.hpp"
#include "mocco/numcore/mlp.hpp"
#include "mocco/replay/replay.hpp"
#include "mocco/rng.hpp"

namespace mocco::agents {

enum class ExplorationMode { none, gaussian, ou, guided };
enum class AgentKind { td3, mocco };

ExplorationMode exploration_mode_from_string(const std::string& s);
std::string to_string(ExplorationMode m);
AgentKind agent_kind_from_string(const std::string& s);
std::string to_string(AgentKind k);

struct AgentConfig {
  double gamma = 0.99;
  double tau = 0.005;
  int policy_delay = 2;
  int batch_size = 256;
  double beta = 0.1;  // weight of the MC-ensemble penalty in the critic loss
  ExplorationMode exploration_mode = ExplorationMode::gaussian;
  // Noise scales are fractions of the per-dimension action half-range.
  double gaussian_sigma = 0.1;
  double ou_theta = 0.15;
  double ou_sigma = 0.2;
  double target_noise_sigma = 0.2;
  double target_noise_clip = 0.5;
  int warmup_steps = 1000;  // uniform random actions before the policy takes over
  std::vector<int> hidden_sizes = {256, 256};
  double learning_rate = 3e-4;

  void validate() const;
};

// Mean-reverting noise state: x <- x + theta * (0 - x) + sigma * N(0, I).
struct OUState {
  std::vector<double> x;
  double theta = 0.15;
  double sigma = 0.2;
};

std::vector<double> ou_step(OUState& ou, RandomStream& rng);

using Batch = std::vector<const replay::Transition*>;

// Deterministic actor-critic learner. AgentKind::td3 keeps twin critics and
// clipped double-Q targets; AgentKind::mocco keeps a single critic whose
// loss carries an extra beta-weighted pull toward the MC-ensemble mean.
class Agent {
 public:
  Agent(AgentKind kind, const AgentConfig& cfg, const envs::EnvSpec& spec, uint64_t seed);

  // One call per environment step. During warm-up returns a uniform random
  // action; afterwards the actor output plus the configured exploration
  // term, clipped to the action bounds. Guided mode requires a controller.
  std::vector<double> select_action_train(const std::vector<double>& state,
                                          controller::DirectionalController* dc);

  std::vector<double> select_action_eval(const std::vector<double>& state) const;

  // Resets episode-scoped exploration state (the OU process).
  void begin_episode();

  // Dispatches to the variant-appropriate critic update.
  double critic_update(const Batch& batch, const controller::Ensemble* ens);

  double td3_critic_update(const Batch& batch);
  double mocco_critic_update(const Batch& batch, const controller::Ensemble* ens);

  // Ascent on mean Q(s, pi(s)) through the first critic; returns -mean Q.
  double actor_update(const Batch& batch);

  void target_soft_update(double tau);

  bool in_warmup() const { return env_steps_ < cfg_.warmup_steps; }
  long long env_steps() const { return env_steps_; }
  long long num_critic_updates() const { return critic_updates_; }
  long long num_actor_updates() const { return actor_updates_; }

  // Correction applied on the most recent guided action selection.
  const std::optional<controller::Correction>& last_correction() const {
    return last_correction_;
  }

  AgentKind kind() const { return kind_; }
  const AgentConfig& config() const { return cfg_; }
  const envs::EnvSpec& env_spec() const { return spec_; }
  int num_critics() const { return static_cast<int>(critics_.size()); }

  const numcore::MlpParams& actor() const { return actor_; }
  const numcore::MlpParams& actor_target() const { return actor_target_; }
  const numcore::MlpParams& critic(int i) const { return critics_[i]; }
  const numcore::MlpParams& critic_target(int i) const { return critic_targets_[i]; }
  const numcore::HeadSpec& actor_head() const { return actor_head_; }

  // Test hooks: overwrite a network in place (topology must match) and
  // re-sync its target / optimizer.
  void set_actor(const numcore::MlpParams& p);
  void set_critic(int i, const numcore::MlpParams& p);

  // The stream feeding target-policy smoothing noise, exposed so a reference
  // computation can replay the exact draw sequence.
  RandomStream& target_noise_rng() { return target_noise_rng_; }

  // Writes actor and critic snapshots (numcore binary format) into dir.
  void save_snapshot(const std::string& dir) const;

 private:
  std::vector<double> clip_action(std::vector<double> a) const;
  void gather(const Batch& batch, numcore::Matrix& S, numcore::Matrix& A,
              std::vector<double>& reward, numcore::Matrix& S2,
              std::vector<double>& done) const;
  // Target actions with clipped smoothing noise; consumes target_noise_rng_.
  numcore::Matrix smoothed_target_actions(const numcore::Matrix& S2);

  AgentKind kind_;
  AgentConfig cfg_;
  envs::EnvSpec spec_;
  numcore::HeadSpec actor_head_;

  numcore::MlpParams actor_, actor_target_;
  numcore::AdamState actor_opt_;
  std::vector<numcore::MlpParams> critics_, critic_targets_;
  std::vector<numcore::AdamState> critic_opts_;

  OUState ou_;
  RandomStream expl_rng_, target_noise_rng_, warmup_rng_;
  long long env_steps_ = 0, critic_updates_ = 0, actor_updates_ = 0;
  std::optional<controller::Correction> last_correction_;
};

}  // namespace mocco::agents
