#include "mocco/harness/training.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <optional>

#include <nlohmann/json.hpp>

#include "mocco/errors.hpp"
#include "mocco/harness/diagnostics.hpp"
#include "mocco/harness/metrics.hpp"
#include "mocco/replay/replay.hpp"
#include "mocco/rng.hpp"

namespace mocco::harness {

namespace {

// Seed stream ids for the pieces of one run.
enum : uint64_t {
  kSeedAgent = 201,
  kSeedEnsemble = 202,
  kSeedEpsilon = 203,
  kSeedEnvReset = 204,
  kSeedBatch = 205,
  kSeedControllerBatch = 206,
  kSeedEval = 207,
  kSeedQDiag = 208,
};

struct IntervalStats {
  double critic_loss_sum = 0.0;
  long long critic_updates = 0;
  double controller_loss_sum = 0.0;
  long long controller_updates = 0;
  double zeta_sum = 0.0;
  double a_e_norm_sum = 0.0;
  long long corrections = 0;

  void reset() { *this = IntervalStats{}; }
};

void write_summary(const std::string& dir, const TrainResult& r) {
  nlohmann::ordered_json doc;
  doc["steps_run"] = r.steps_run;
  doc["failed"] = r.failed;
  doc["failure_message"] = r.failure_message;
  doc["early_stopped"] = r.early_stopped;
  doc["first_success_step"] = r.first_success_step;
  doc["final10_mean"] = std::isnan(r.final10_mean) ? nlohmann::ordered_json()
                                                   : nlohmann::ordered_json(r.final10_mean);
  std::ofstream out(dir + "/summary.json", std::ios::binary);
  if (!out) throw ConfigError("cannot write summary: " + dir);
  out << doc.dump(2) << "\n";
}

}  // namespace

std::pair<double, double> evaluate_policy(const agents::Agent& agent, envs::Env& env,
                                          int episodes, uint64_t seed) {
  if (episodes < 1) throw ConfigError("evaluate_policy: episodes must be >= 1");
  std::vector<double> returns;
  returns.reserve(episodes);
  for (int ep = 0; ep < episodes; ++ep) {
    std::vector<double> obs = env.reset(derive_seed(seed, ep));
    double ret = 0.0;
    while (true) {
      const envs::StepResult r = env.step(agent.select_action_eval(obs));
      ret += r.reward;
      if (r.terminated || r.truncated) break;
      obs = r.observation;
    }
    returns.push_back(ret);
  }
  double mean = 0.0;
  for (double r : returns) mean += r;
  mean /= episodes;
  double var = 0.0;
  for (double r : returns) var += (r - mean) * (r - mean);
  var /= episodes;
  return {mean, std::sqrt(var)};
}

TrainResult run_training(const RunConfig& cfg) {
  cfg.validate();
  std::filesystem::create_directories(cfg.output_dir);
  save_config(cfg, cfg.output_dir + "/config.json");

  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed_s = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  std::unique_ptr<envs::Env> env = envs::make_env(cfg.env_name);
  std::unique_ptr<envs::Env> eval_env = envs::make_env(cfg.env_name);
  const envs::EnvSpec& spec = env->spec();

  agents::Agent agent(cfg.agent_kind(), cfg.agent_config(), spec,
                      derive_seed(cfg.seed, kSeedAgent));

  std::optional<controller::DirectionalController> dc;
  if (cfg.needs_controller()) {
    controller::Ensemble ens =
        controller::ensemble_init(cfg.ensemble_size, spec.obs_dim, spec.action_dim,
                                  cfg.hidden_sizes, cfg.learning_rate,
                                  derive_seed(cfg.seed, kSeedEnsemble));
    const double eps = controller::epsilon_init(spec, cfg.epsilon_samples,
                                                derive_seed(cfg.seed, kSeedEpsilon));
    dc.emplace(std::move(ens),
               controller::ScalingState(spec.action_dim, cfg.zeta_window, eps));
  }
  const bool guided = cfg.mode() == agents::ExplorationMode::guided;

  replay::RingBuffer<replay::Transition> buffer(cfg.replay_capacity);
  replay::RingBuffer<replay::MCRecord> mc_buffer(cfg.mc_capacity);
  replay::EpisodeBuffer episode;

  RandomStream reset_rng(derive_seed(cfg.seed, kSeedEnvReset));
  RandomStream batch_rng(derive_seed(cfg.seed, kSeedBatch));
  RandomStream ctrl_batch_rng(derive_seed(cfg.seed, kSeedControllerBatch));
  RandomStream qdiag_rng(derive_seed(cfg.seed, kSeedQDiag));
  const uint64_t eval_seed_base = derive_seed(cfg.seed, kSeedEval);

  MetricsWriter metrics(cfg.output_dir);
  std::unique_ptr<QDiagWriter> qdiag_writer;
  std::unique_ptr<envs::Env> probe_env;
  bool qdiag_enabled = cfg.qdiag_interval > 0 && dc.has_value();
  if (qdiag_enabled && !env->supports_state_injection()) {
    std::cerr << "warning: " << cfg.env_name
              << " does not support state injection; Q diagnostics disabled\n";
    qdiag_enabled = false;
  }
  if (cfg.qdiag_interval > 0 && !dc.has_value())
    std::cerr << "warning: Q diagnostics need a controller "
                 "(mocco agent or guided exploration); disabled\n";
  if (qdiag_enabled) {
    qdiag_writer = std::make_unique<QDiagWriter>(cfg.output_dir);
    probe_env = envs::make_env(cfg.env_name);
  }

  std::ofstream trace;
  if (cfg.trace_interval > 0 && guided) {
    trace.open(cfg.output_dir + "/trace.csv", std::ios::binary);
    if (!trace) throw ConfigError("cannot open trace file");
    trace << "step";
    for (int d = 0; d < spec.action_dim; ++d) trace << ",zeta_" << d;
    for (int d = 0; d < spec.action_dim; ++d) trace << ",a_e_" << d;
    trace << "\n";
  }

  TrainResult result;
  result.output_dir = cfg.output_dir;
  result.metrics_jsonl = metrics.jsonl_path();
  result.final10_mean = std::numeric_limits<double>::quiet_NaN();

  std::vector<double> eval_means;
  IntervalStats interval;
  std::vector<const replay::Transition*> td_batch;
  std::vector<const replay::MCRecord*> mc_batch;

  std::vector<double> obs = env->reset(reset_rng.engine()());
  agent.begin_episode();
  double episode_return = 0.0;

  for (long long t = 1; t <= cfg.total_steps; ++t) {
    const std::vector<double> action =
        agent.select_action_train(obs, guided && dc ? &*dc : nullptr);

    if (guided && !agent.in_warmup() && agent.last_correction()) {
      const controller::Correction& c = *agent.last_correction();
      double zsum = 0.0, norm2 = 0.0;
      for (int d = 0; d < spec.action_dim; ++d) {
        zsum += c.zeta[d];
        norm2 += c.a_e[d] * c.a_e[d];
      }
      interval.zeta_sum += zsum / spec.action_dim;
      interval.a_e_norm_sum += std::sqrt(norm2);
      ++interval.corrections;
      if (cfg.trace_interval > 0 && t % cfg.trace_interval == 0) {
        trace << t;
        for (int d = 0; d < spec.action_dim; ++d)
          trace << ',' << format_double(c.zeta[d]);
        for (int d = 0; d < spec.action_dim; ++d)
          trace << ',' << format_double(c.a_e[d]);
        trace << "\n";
      }
    }

    const envs::StepResult sr = env->step(action);
    episode_return += sr.reward;
    episode.stage({obs, action, sr.reward, sr.observation, sr.terminated});

    const bool episode_over = sr.terminated || sr.truncated;
    if (episode_over) {
      if (result.first_success_step < 0 &&
          env->is_success_episode(episode_return, sr.terminated))
        result.first_success_step = t;
      replay::finalize_episode(episode, buffer, mc_buffer, cfg.gamma);
    }

    try {
      if (t > cfg.warmup_steps) {
        if (replay::sample_uniform(buffer, cfg.batch_size, batch_rng, td_batch)) {
          interval.critic_loss_sum +=
              agent.critic_update(td_batch, dc ? &dc->ensemble : nullptr);
          ++interval.critic_updates;
          if (agent.num_critic_updates() % cfg.policy_delay == 0) {
            agent.actor_update(td_batch);
            agent.target_soft_update(cfg.tau);
          }
        }
        if (dc && replay::sample_uniform(mc_buffer, cfg.controller_batch_size,
                                         ctrl_batch_rng, mc_batch)) {
          interval.controller_loss_sum +=
              controller::controller_train_step(dc->ensemble, mc_batch);
          ++interval.controller_updates;
        }
      }
    } catch (const NumericError& e) {
      result.failed = true;
      result.failure_message = e.what();
      result.steps_run = t;
      std::ofstream marker(cfg.output_dir + "/failure.txt", std::ios::binary);
      marker << "numeric divergence at step " << t << ": " << e.what() << "\n";
      break;
    }

    if (qdiag_enabled && t % cfg.qdiag_interval == 0 &&
        replay::sample_uniform(buffer, cfg.qdiag_batch, qdiag_rng, td_batch)) {
      const int horizon =
          cfg.qdiag_horizon > 0 ? cfg.qdiag_horizon : spec.max_episode_steps;
      qdiag_writer->write(q_diagnostics_probe(agent, dc->ensemble, *probe_env,
                                              td_batch, horizon, t));
    }

    if (t % cfg.eval_interval == 0) {
      const auto [mean, stddev] = evaluate_policy(
          agent, *eval_env, cfg.eval_episodes,
          derive_seed(eval_seed_base, static_cast<uint64_t>(t / cfg.eval_interval)));
      eval_means.push_back(mean);

      MetricRecord rec;
      rec.step = t;
      rec.eval_return_mean = mean;
      rec.eval_return_std = stddev;
      rec.critic_loss = interval.critic_updates > 0
                            ? interval.critic_loss_sum / interval.critic_updates
                            : 0.0;
      rec.controller_loss = interval.controller_updates > 0
                                ? interval.controller_loss_sum / interval.controller_updates
                                : 0.0;
      rec.zeta_mean =
          interval.corrections > 0 ? interval.zeta_sum / interval.corrections : 0.0;
      rec.a_e_norm_mean =
          interval.corrections > 0 ? interval.a_e_norm_sum / interval.corrections : 0.0;
      rec.wall_time_s = elapsed_s();
      metrics.write(rec);
      interval.reset();

      if (cfg.early_stop && mean >= cfg.early_stop_return) {
        result.early_stopped = true;
        result.steps_run = t;
        break;
      }
    }

    if (episode_over) {
      obs = env->reset(reset_rng.engine()());
      agent.begin_episode();
      episode_return = 0.0;
    } else {
      obs = sr.observation;
    }
    result.steps_run = t;
  }

  metrics.flush();
  if (qdiag_writer) qdiag_writer->flush();

  {
    std::vector<MetricRecord> rows = read_metrics_jsonl(metrics.jsonl_path());
    result.final10_mean = final_window_mean(rows, 10);
  }
  if (cfg.save_snapshot && !result.failed) {
    agent.save_snapshot(cfg.output_dir + "/snapshot");
    if (dc)
      for (int i = 0; i < dc->ensemble.size(); ++i)
        numcore::save_params(dc->ensemble.members[i],
                             cfg.output_dir + "/snapshot/ensemble" +
                                 std::to_string(i) + ".mlp");
  }
  write_summary(cfg.output_dir, result);
  return result;
}

}  // namespace mocco::harness
