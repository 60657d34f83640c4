#include "mocco/harness/config.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mocco/errors.hpp"

namespace mocco::harness {

using ordered_json = nlohmann::ordered_json;

agents::AgentConfig RunConfig::agent_config() const {
  agents::AgentConfig a;
  a.gamma = gamma;
  a.tau = tau;
  a.policy_delay = policy_delay;
  a.batch_size = batch_size;
  a.beta = beta;
  a.exploration_mode = mode();
  a.gaussian_sigma = gaussian_sigma;
  a.ou_theta = ou_theta;
  a.ou_sigma = ou_sigma;
  a.target_noise_sigma = target_noise_sigma;
  a.target_noise_clip = target_noise_clip;
  a.warmup_steps = warmup_steps;
  a.hidden_sizes = hidden_sizes;
  a.learning_rate = learning_rate;
  return a;
}

agents::AgentKind RunConfig::agent_kind() const {
  return agents::agent_kind_from_string(agent_name);
}

agents::ExplorationMode RunConfig::mode() const {
  return agents::exploration_mode_from_string(exploration_mode);
}

bool RunConfig::needs_controller() const {
  return agent_kind() == agents::AgentKind::mocco ||
         mode() == agents::ExplorationMode::guided;
}

void RunConfig::validate() const {
  agent_config().validate();  // also resolves the enum strings
  agent_kind();
  if (total_steps < 0) throw ConfigError("total_steps must be >= 0");
  if (eval_interval <= 0) throw ConfigError("eval_interval must be > 0");
  if (eval_episodes < 1) throw ConfigError("eval_episodes must be >= 1");
  if (replay_capacity < 1) throw ConfigError("replay_capacity must be >= 1");
  if (mc_capacity < 1) throw ConfigError("mc_capacity must be >= 1");
  if (ensemble_size < 2) throw ConfigError("ensemble_size must be >= 2");
  if (zeta_window < 2) throw ConfigError("zeta_window must be >= 2");
  if (controller_batch_size < 1) throw ConfigError("controller_batch_size must be >= 1");
  if (epsilon_samples < 1) throw ConfigError("epsilon_samples must be >= 1");
  if (qdiag_interval < 0) throw ConfigError("qdiag_interval must be >= 0");
  if (qdiag_batch < 1) throw ConfigError("qdiag_batch must be >= 1");
  if (qdiag_horizon < 0) throw ConfigError("qdiag_horizon must be >= 0");
  if (trace_interval < 0) throw ConfigError("trace_interval must be >= 0");
  if (output_dir.empty()) throw ConfigError("output_dir must be non-empty");
}

namespace {

// Single field table driving load, override, and echo, so the three stay in
// sync and key order is canonical.
template <typename Fn>
void for_each_field(RunConfig& c, Fn&& fn) {
  fn("env_name", c.env_name);
  fn("agent_name", c.agent_name);
  fn("exploration_mode", c.exploration_mode);
  fn("total_steps", c.total_steps);
  fn("eval_interval", c.eval_interval);
  fn("eval_episodes", c.eval_episodes);
  fn("seed", c.seed);
  fn("gamma", c.gamma);
  fn("tau", c.tau);
  fn("policy_delay", c.policy_delay);
  fn("batch_size", c.batch_size);
  fn("beta", c.beta);
  fn("gaussian_sigma", c.gaussian_sigma);
  fn("ou_theta", c.ou_theta);
  fn("ou_sigma", c.ou_sigma);
  fn("target_noise_sigma", c.target_noise_sigma);
  fn("target_noise_clip", c.target_noise_clip);
  fn("warmup_steps", c.warmup_steps);
  fn("hidden_sizes", c.hidden_sizes);
  fn("learning_rate", c.learning_rate);
  fn("replay_capacity", c.replay_capacity);
  fn("mc_capacity", c.mc_capacity);
  fn("ensemble_size", c.ensemble_size);
  fn("zeta_window", c.zeta_window);
  fn("controller_batch_size", c.controller_batch_size);
  fn("epsilon_samples", c.epsilon_samples);
  fn("qdiag_interval", c.qdiag_interval);
  fn("qdiag_batch", c.qdiag_batch);
  fn("qdiag_horizon", c.qdiag_horizon);
  fn("trace_interval", c.trace_interval);
  fn("early_stop", c.early_stop);
  fn("early_stop_return", c.early_stop_return);
  fn("save_snapshot", c.save_snapshot);
  fn("output_dir", c.output_dir);
}

template <typename T>
void assign_from_json(const ordered_json& v, const std::string& key, T& field) {
  try {
    field = v.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("config key '" + key + "': wrong value type");
  }
}

template <typename T>
void assign_from_string(const std::string& s, const std::string& key, T& field) {
  ordered_json v;
  if constexpr (std::is_same_v<T, std::string>) {
    v = s;
  } else {
    try {
      v = ordered_json::parse(s);
    } catch (const nlohmann::json::exception&) {
      throw ConfigError("override '" + key + "=" + s + "': unparsable value");
    }
  }
  assign_from_json(v, key, field);
}

}  // namespace

RunConfig load_config(const std::string& path) {
  RunConfig cfg;
  if (path.empty()) return cfg;

  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  ordered_json doc;
  try {
    doc = ordered_json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config parse error in " + path + ": " + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config root must be a JSON object: " + path);

  for (const auto& [key, value] : doc.items()) {
    bool known = false;
    for_each_field(cfg, [&](const char* name, auto& field) {
      if (key == name) {
        known = true;
        assign_from_json(value, key, field);
      }
    });
    if (!known) throw ConfigError("unknown config key: " + key);
  }
  return cfg;
}

void apply_overrides(RunConfig& cfg, const std::vector<std::string>& overrides) {
  for (const std::string& kv : overrides) {
    const size_t eq = kv.find('=');
    if (eq == std::string::npos)
      throw ConfigError("override must be key=value, got: " + kv);
    const std::string key = kv.substr(0, eq);
    const std::string value = kv.substr(eq + 1);
    bool known = false;
    for_each_field(cfg, [&](const char* name, auto& field) {
      if (key == name) {
        known = true;
        assign_from_string(value, key, field);
      }
    });
    if (!known) throw ConfigError("unknown config key: " + key);
  }
}

std::string config_to_json(const RunConfig& cfg) {
  ordered_json doc;
  for_each_field(const_cast<RunConfig&>(cfg),
                 [&](const char* name, auto& field) { doc[name] = field; });
  return doc.dump(2) + "\n";
}

void save_config(const RunConfig& cfg, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write config echo: " + path);
  out << config_to_json(cfg);
}

}  // namespace mocco::harness
