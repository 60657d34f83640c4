#include "mocco/replay/replay.hpp"

namespace mocco::replay {

std::vector<double> compute_returns(const std::vector<double>& rewards, double gamma) {
  if (gamma < 0.0 || gamma > 1.0)
    throw ConfigError("compute_returns: gamma must be in [0, 1]");
  std::vector<double> returns(rewards.size());
  if (rewards.empty()) return returns;
  returns.back() = rewards.back();
  for (size_t i = rewards.size() - 1; i-- > 0;)
    returns[i] = rewards[i] + gamma * returns[i + 1];
  return returns;
}

void finalize_episode(EpisodeBuffer& episodic, RingBuffer<Transition>& main_buffer,
                      RingBuffer<MCRecord>& mc_buffer, double gamma) {
  if (episodic.empty()) return;

  const auto& staged = episodic.staged();
  std::vector<double> rewards(staged.size());
  for (size_t i = 0; i < staged.size(); ++i) rewards[i] = staged[i].reward;
  const std::vector<double> returns = compute_returns(rewards, gamma);

  for (size_t i = 0; i < staged.size(); ++i) {
    mc_buffer.push(MCRecord{staged[i].state, staged[i].action, returns[i]});
    main_buffer.push(staged[i]);
  }
  episodic.clear();
}

}  // namespace mocco::replay
