#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mocco/harness/config.hpp"

namespace mocco::harness {

struct RunCell {
  std::string label;  // mode name, or "param=value" for ablations
  uint64_t seed = 0;
  std::string run_dir;
  bool failed = false;
  double final10_mean = 0.0;
  long long first_success_step = -1;
};

struct AggregateRow {
  std::string label;
  int runs = 0;
  int failed_runs = 0;
  double final10_mean = 0.0;  // mean over non-failed seeds
  double final10_std = 0.0;   // population std over non-failed seeds
  // Median steps to the first successful training episode; runs that never
  // succeed are censored at their step budget.
  double median_first_success = 0.0;
};

struct SweepResult {
  std::vector<RunCell> cells;
  std::vector<AggregateRow> rows;
  std::string table_path;
};

// One training run per (mode, seed); per-mode aggregation of the final-10
// evaluation means and of steps-to-first-success. Per-run directories,
// runs.csv, and comparison.csv live under out_dir. A run failure marks its
// cell and the sweep continues.
SweepResult run_comparison(const RunConfig& base, const std::vector<std::string>& modes,
                           const std::vector<uint64_t>& seeds,
                           const std::string& out_dir);

// Same sweep skeleton over values of one config key (e.g. beta,
// zeta_window, mc_capacity); emits ablation.csv.
SweepResult run_ablation(const RunConfig& base, const std::string& param,
                         const std::vector<std::string>& values,
                         const std::vector<uint64_t>& seeds, const std::string& out_dir);

// "3" -> {3}; "0,2,5" -> {0,2,5}; "0..4" -> {0,1,2,3,4}.
std::vector<uint64_t> parse_seed_list(const std::string& text);

}  // namespace mocco::harness
