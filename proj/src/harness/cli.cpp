#include "mocco/harness/cli.hpp"

#include <cmath>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mocco/errors.hpp"
#include "mocco/harness/comparison.hpp"
#include "mocco/harness/config.hpp"
#include "mocco/harness/diagnostics.hpp"
#include "mocco/harness/oracles.hpp"
#include "mocco/harness/training.hpp"
#include "mocco/rng.hpp"

namespace mocco::harness {

namespace {

std::vector<std::string> split_csv(const std::string& text) {
  std::vector<std::string> items;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) items.push_back(item);
  return items;
}

struct CommonArgs {
  std::string config_path;
  std::string output_dir;
  std::vector<std::string> overrides;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config file (defaults when omitted)");
    cmd->add_option("-o,--output", output_dir, "output directory (overrides config)");
    cmd->add_option("--set", overrides, "config override, key=value (repeatable)");
  }

  RunConfig build() const {
    RunConfig cfg = load_config(config_path);
    apply_overrides(cfg, overrides);
    if (!output_dir.empty()) cfg.output_dir = output_dir;
    return cfg;
  }
};

int do_train(const RunConfig& cfg) {
  const TrainResult r = run_training(cfg);
  if (r.failed) {
    std::cerr << "run aborted: " << r.failure_message << "\n";
    return 1;
  }
  std::cout << "metrics: " << r.metrics_jsonl << "\n";
  std::cout << "steps_run: " << r.steps_run
            << (r.early_stopped ? " (early stop)" : "") << "\n";
  if (r.first_success_step >= 0)
    std::cout << "first_success_step: " << r.first_success_step << "\n";
  if (!std::isnan(r.final10_mean))
    std::cout << "final10_mean: " << r.final10_mean << "\n";
  return 0;
}

void print_table(const SweepResult& sweep) {
  std::cout << "table: " << sweep.table_path << "\n";
  for (const AggregateRow& row : sweep.rows)
    std::cout << "  " << row.label << ": final10 " << row.final10_mean << " +- "
              << row.final10_std << ", median steps to first success "
              << row.median_first_success << ", failed " << row.failed_runs << "/"
              << row.runs << "\n";
}

// Probe state for the action-surface dump: the observation of a fresh
// deterministic reset.
std::vector<double> surface_probe_state(const RunConfig& cfg) {
  auto env = envs::make_env(cfg.env_name);
  return env->reset(derive_seed(cfg.seed, 991));
}

int do_diag(RunConfig cfg, int surface_res) {
  if (!cfg.needs_controller())
    throw ConfigError("diag needs a controller: use agent_name=mocco or "
                      "exploration_mode=guided");
  if (cfg.qdiag_interval == 0) cfg.qdiag_interval = 5000;
  if (cfg.trace_interval == 0) cfg.trace_interval = 100;
  cfg.save_snapshot = true;

  const TrainResult r = run_training(cfg);
  if (r.failed) {
    std::cerr << "run aborted: " << r.failure_message << "\n";
    return 1;
  }
  std::cout << "metrics: " << r.metrics_jsonl << "\n";
  std::cout << "qdiag: " << cfg.output_dir << "/qdiag.jsonl\n";

  // Rebuild the final networks from the snapshot for the surface dump.
  auto env = envs::make_env(cfg.env_name);
  if (env->spec().action_dim != 2) {
    std::cerr << "surface dump skipped: " << cfg.env_name
              << " has a " << env->spec().action_dim << "-D action space\n";
    return 0;
  }
  agents::Agent agent(cfg.agent_kind(), cfg.agent_config(), env->spec(),
                      derive_seed(cfg.seed, 990));
  agent.set_actor(numcore::load_params(cfg.output_dir + "/snapshot/actor.mlp"));
  agent.set_critic(0, numcore::load_params(cfg.output_dir + "/snapshot/critic1.mlp"));

  controller::Ensemble ens = controller::ensemble_init(
      cfg.ensemble_size, env->spec().obs_dim, env->spec().action_dim, cfg.hidden_sizes,
      cfg.learning_rate, derive_seed(cfg.seed, 992));
  for (int i = 0; i < ens.size(); ++i)
    ens.members[i] = numcore::load_params(cfg.output_dir + "/snapshot/ensemble" +
                                          std::to_string(i) + ".mlp");
  const std::string surface_path = cfg.output_dir + "/surface.csv";
  surface_dump(agent, ens, surface_probe_state(cfg), surface_res, surface_path);
  std::cout << "surface: " << surface_path << "\n";
  return 0;
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"Guided-exploration RL laboratory"};
  app.require_subcommand(1);

  CommonArgs train_args;
  std::string train_env, train_agent, train_mode, train_seed, train_steps;
  CLI::App* train = app.add_subcommand("train", "run one training job");
  train_args.attach(train);
  train->add_option("--env", train_env, "environment name");
  train->add_option("--agent", train_agent, "td3 or mocco");
  train->add_option("--mode", train_mode, "none|gaussian|ou|guided (aliases: no_expl, normal, ge)");
  train->add_option("--seed", train_seed, "run seed");
  train->add_option("--steps", train_steps, "total environment steps");

  CommonArgs cmp_args;
  std::string cmp_modes = "none,gaussian,ou,guided";
  std::string cmp_seeds = "0..9";
  CLI::App* compare = app.add_subcommand("compare", "exploration-mode sweep");
  cmp_args.attach(compare);
  compare->add_option("--modes", cmp_modes, "comma list of exploration modes");
  compare->add_option("--seeds", cmp_seeds, "seed list: N, a,b,c or lo..hi");

  CommonArgs abl_args;
  std::string abl_param = "beta", abl_values, abl_seeds = "0..4";
  CLI::App* ablate = app.add_subcommand("ablate", "sweep one config key");
  abl_args.attach(ablate);
  ablate->add_option("--param", abl_param, "config key to sweep (beta, zeta_window, mc_capacity, ...)");
  ablate->add_option("--values", abl_values, "comma list of values")->required();
  ablate->add_option("--seeds", abl_seeds, "seed list: N, a,b,c or lo..hi");

  CommonArgs diag_args;
  std::string diag_seed;
  int surface_res = 41;
  CLI::App* diag = app.add_subcommand("diag", "training run with Q-calibration probes and surface dump");
  diag_args.attach(diag);
  diag->add_option("--seed", diag_seed, "run seed");
  diag->add_option("--surface-res", surface_res, "action-surface lattice resolution");

  CLI::App* oracles_cmd =
      app.add_subcommand("test-oracles", "print independently computed reference values");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (train->parsed()) {
      if (!train_env.empty()) train_args.overrides.push_back("env_name=" + train_env);
      if (!train_agent.empty()) train_args.overrides.push_back("agent_name=" + train_agent);
      if (!train_mode.empty())
        train_args.overrides.push_back("exploration_mode=" + train_mode);
      if (!train_seed.empty()) train_args.overrides.push_back("seed=" + train_seed);
      if (!train_steps.empty()) train_args.overrides.push_back("total_steps=" + train_steps);
      return do_train(train_args.build());
    }
    if (compare->parsed()) {
      RunConfig base = cmp_args.build();
      const std::string out = base.output_dir;
      print_table(run_comparison(base, split_csv(cmp_modes), parse_seed_list(cmp_seeds), out));
      return 0;
    }
    if (ablate->parsed()) {
      RunConfig base = abl_args.build();
      const std::string out = base.output_dir;
      print_table(run_ablation(base, abl_param, split_csv(abl_values),
                               parse_seed_list(abl_seeds), out));
      return 0;
    }
    if (diag->parsed()) {
      if (!diag_seed.empty()) diag_args.overrides.push_back("seed=" + diag_seed);
      return do_diag(diag_args.build(), surface_res);
    }
    if (oracles_cmd->parsed()) {
      oracles::print_oracle_report(std::cout);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace mocco::harness
