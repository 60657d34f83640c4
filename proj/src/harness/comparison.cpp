#include "mocco/harness/comparison.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "mocco/errors.hpp"
#include "mocco/harness/metrics.hpp"
#include "mocco/harness/training.hpp"

namespace mocco::harness {

namespace {

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

RunCell execute_cell(const RunConfig& cfg, const std::string& label, uint64_t seed) {
  RunCell cell;
  cell.label = label;
  cell.seed = seed;
  cell.run_dir = cfg.output_dir;
  try {
    const TrainResult r = run_training(cfg);
    cell.failed = r.failed;
    cell.first_success_step = r.first_success_step;
    // Aggregate from the metric file rather than the in-memory result so
    // the table is recomputable from artifacts alone.
    cell.final10_mean = final_window_mean(read_metrics_jsonl(r.metrics_jsonl), 10);
  } catch (const std::exception& e) {
    std::cerr << "run " << label << " seed " << seed << " failed: " << e.what() << "\n";
    cell.failed = true;
    cell.final10_mean = std::numeric_limits<double>::quiet_NaN();
  }
  return cell;
}

AggregateRow aggregate(const std::string& label, const std::vector<RunCell>& cells,
                       long long censor_step) {
  AggregateRow row;
  row.label = label;
  std::vector<double> finals, successes;
  for (const RunCell& c : cells) {
    if (c.label != label) continue;
    ++row.runs;
    if (c.failed) {
      ++row.failed_runs;
      continue;
    }
    finals.push_back(c.final10_mean);
    successes.push_back(c.first_success_step >= 0
                            ? static_cast<double>(c.first_success_step)
                            : static_cast<double>(censor_step));
  }
  if (!finals.empty()) {
    double mean = 0.0;
    for (double v : finals) mean += v;
    mean /= finals.size();
    double var = 0.0;
    for (double v : finals) var += (v - mean) * (v - mean);
    row.final10_mean = mean;
    row.final10_std = std::sqrt(var / finals.size());
  } else {
    row.final10_mean = row.final10_std = std::numeric_limits<double>::quiet_NaN();
  }
  row.median_first_success = median(successes);
  return row;
}

void write_runs_csv(const std::string& path, const std::string& label_column,
                    const std::vector<RunCell>& cells) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  out << label_column << ",seed,status,final10_mean,first_success_step,run_dir\n";
  for (const RunCell& c : cells)
    out << c.label << ',' << c.seed << ',' << (c.failed ? "failed" : "ok") << ','
        << format_double(c.final10_mean) << ',' << c.first_success_step << ','
        << c.run_dir << "\n";
}

void write_table_csv(const std::string& path, const std::string& label_column,
                     const std::vector<AggregateRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  out << label_column
      << ",runs,failed_runs,final10_mean,final10_std,median_steps_to_first_success\n";
  for (const AggregateRow& r : rows)
    out << r.label << ',' << r.runs << ',' << r.failed_runs << ','
        << format_double(r.final10_mean) << ',' << format_double(r.final10_std) << ','
        << format_double(r.median_first_success) << "\n";
}

}  // namespace

std::vector<uint64_t> parse_seed_list(const std::string& text) {
  std::vector<uint64_t> seeds;
  const size_t dots = text.find("..");
  if (dots != std::string::npos) {
    const uint64_t lo = std::stoull(text.substr(0, dots));
    const uint64_t hi = std::stoull(text.substr(dots + 2));
    if (hi < lo) throw ConfigError("seed range must be low..high: " + text);
    for (uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
    return seeds;
  }
  size_t pos = 0;
  while (pos <= text.size()) {
    const size_t comma = std::min(text.find(',', pos), text.size());
    const std::string item = text.substr(pos, comma - pos);
    if (item.empty()) throw ConfigError("bad seed list: " + text);
    seeds.push_back(std::stoull(item));
    pos = comma + 1;
  }
  return seeds;
}

SweepResult run_comparison(const RunConfig& base, const std::vector<std::string>& modes,
                           const std::vector<uint64_t>& seeds,
                           const std::string& out_dir) {
  if (modes.empty() || seeds.empty())
    throw ConfigError("run_comparison: needs at least one mode and one seed");
  std::filesystem::create_directories(out_dir);

  SweepResult result;
  std::vector<std::string> labels;
  for (const std::string& mode : modes) {
    const std::string canon = to_string(agents::exploration_mode_from_string(mode));
    if (std::find(labels.begin(), labels.end(), canon) != labels.end())
      throw ConfigError("duplicate exploration mode in sweep: " + canon);
    labels.push_back(canon);
    for (uint64_t seed : seeds) {
      RunConfig cfg = base;
      cfg.exploration_mode = canon;
      cfg.seed = seed;
      cfg.output_dir = out_dir + "/" + canon + "_seed" + std::to_string(seed);
      result.cells.push_back(execute_cell(cfg, canon, seed));
    }
  }
  for (const std::string& label : labels)
    result.rows.push_back(aggregate(label, result.cells, base.total_steps));

  write_runs_csv(out_dir + "/runs.csv", "mode", result.cells);
  result.table_path = out_dir + "/comparison.csv";
  write_table_csv(result.table_path, "mode", result.rows);
  return result;
}

SweepResult run_ablation(const RunConfig& base, const std::string& param,
                         const std::vector<std::string>& values,
                         const std::vector<uint64_t>& seeds,
                         const std::string& out_dir) {
  if (values.empty() || seeds.empty())
    throw ConfigError("run_ablation: needs at least one value and one seed");
  std::filesystem::create_directories(out_dir);

  SweepResult result;
  std::vector<std::string> labels;
  for (const std::string& value : values) {
    const std::string label = param + "=" + value;
    if (std::find(labels.begin(), labels.end(), label) != labels.end())
      throw ConfigError("duplicate value in sweep: " + label);
    labels.push_back(label);
    for (uint64_t seed : seeds) {
      RunConfig cfg = base;
      apply_overrides(cfg, {label});
      cfg.seed = seed;
      std::string dir_value = value;
      std::replace(dir_value.begin(), dir_value.end(), '.', 'p');
      cfg.output_dir = out_dir + "/" + param + "_" + dir_value + "_seed" +
                       std::to_string(seed);
      result.cells.push_back(execute_cell(cfg, label, seed));
    }
  }
  for (const std::string& label : labels)
    result.rows.push_back(aggregate(label, result.cells, base.total_steps));

  write_runs_csv(out_dir + "/runs.csv", "param_value", result.cells);
  result.table_path = out_dir + "/ablation.csv";
  write_table_csv(result.table_path, "param_value", result.rows);
  return result;
}

}  // namespace mocco::harness
