#include "mocco/harness/diagnostics.hpp"

#include <fstream>

#include "mocco/errors.hpp"

namespace mocco::harness {

namespace {

// Discounted return of: inject `state`, play `action`, then follow the
// greedy policy for at most horizon steps in total.
double rollout_return(const agents::Agent& agent, envs::Env& env,
                      const std::vector<double>& state, const std::vector<double>& action,
                      double gamma, int horizon) {
  env.inject_state(state);
  double ret = 0.0;
  double discount = 1.0;
  std::vector<double> a = action;
  for (int k = 0; k < horizon; ++k) {
    const envs::StepResult r = env.step(a);
    ret += discount * r.reward;
    discount *= gamma;
    if (r.terminated || r.truncated) break;
    a = agent.select_action_eval(r.observation);
  }
  return ret;
}

}  // namespace

QDiagnostics q_diagnostics_probe(const agents::Agent& agent,
                                 const controller::Ensemble& ensemble,
                                 envs::Env& probe_env,
                                 const std::vector<const replay::Transition*>& batch,
                                 int rollout_horizon, long long step) {
  if (batch.empty()) throw ConfigError("q_diagnostics_probe: empty batch");
  if (!probe_env.supports_state_injection())
    throw UnsupportedError("q_diagnostics_probe: env lacks state injection");

  const double gamma = agent.config().gamma;
  double td_sum = 0.0, true_sum = 0.0, mc_sum = 0.0;
  for (const replay::Transition* tr : batch) {
    std::vector<double> x = tr->state;
    x.insert(x.end(), tr->action.begin(), tr->action.end());
    td_sum += numcore::mlp_forward(agent.critic(0), x)[0];

    true_sum += rollout_return(agent, probe_env, tr->state, tr->action, gamma,
                               rollout_horizon);

    const std::vector<double> q =
        controller::ensemble_predict(ensemble, tr->state, tr->action);
    double mu = 0.0;
    for (double v : q) mu += v;
    mc_sum += mu / ensemble.size();
  }

  const double n = static_cast<double>(batch.size());
  QDiagnostics rec;
  rec.step = step;
  rec.q_td_mean = td_sum / n;
  rec.q_true_mean = true_sum / n;
  rec.q_mc_mean = mc_sum / n;
  return rec;
}

void surface_dump(const agents::Agent& agent, const controller::Ensemble& ensemble,
                  const std::vector<double>& state, int resolution,
                  const std::string& path) {
  const envs::EnvSpec& spec = agent.env_spec();
  if (spec.action_dim != 2)
    throw UnsupportedError("surface_dump: needs a 2-D action space");
  if (resolution < 1) throw ConfigError("surface_dump: resolution must be >= 1");

  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open surface file: " + path);
  out << "a1,a2,psi,q\n";

  auto grid_point = [&](int idx, int d) {
    if (resolution == 1) return 0.5 * (spec.action_low[d] + spec.action_high[d]);
    return spec.action_low[d] +
           (spec.action_high[d] - spec.action_low[d]) * idx / (resolution - 1);
  };

  std::vector<double> a(2);
  for (int i = 0; i < resolution; ++i) {
    a[0] = grid_point(i, 0);
    for (int j = 0; j < resolution; ++j) {
      a[1] = grid_point(j, 1);
      const double psi = controller::uncertainty(ensemble, state, a);
      std::vector<double> x = state;
      x.insert(x.end(), a.begin(), a.end());
      const double q = numcore::mlp_forward(agent.critic(0), x)[0];
      out << format_double(a[0]) << ',' << format_double(a[1]) << ','
          << format_double(psi) << ',' << format_double(q) << "\n";
    }
  }
}

}  // namespace mocco::harness
