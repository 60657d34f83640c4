#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace mocco::harness {

// One logged row of a training run. Everything except wall_time_s is
// deterministic for a fixed config and seed.
struct MetricRecord {
  long long step = 0;
  double eval_return_mean = 0.0;
  double eval_return_std = 0.0;
  double critic_loss = 0.0;       // mean over updates since the previous row
  double controller_loss = 0.0;   // 0 when no controller is attached
  double zeta_mean = 0.0;         // mean zeta component, guided runs only
  double a_e_norm_mean = 0.0;     // mean ||a_e||_2, guided runs only
  double wall_time_s = 0.0;
};

// One row of the Q-calibration probe: critic prediction vs the discounted
// return actually collected by replaying the policy vs the MC-ensemble mean.
struct QDiagnostics {
  long long step = 0;
  double q_td_mean = 0.0;
  double q_true_mean = 0.0;
  double q_mc_mean = 0.0;
};

// Shortest round-trip decimal form; the single formatter behind every CSV
// so identical values always print identically.
std::string format_double(double v);

// Writes the metric stream as metrics.jsonl plus a metrics.csv mirror.
// wall_time_s goes to a separate timing.csv so the two metric files stay
// byte-reproducible across repeated runs.
class MetricsWriter {
 public:
  explicit MetricsWriter(const std::string& dir);

  // Rows must arrive with non-decreasing step.
  void write(const MetricRecord& rec);
  void flush();

  const std::string& jsonl_path() const { return jsonl_path_; }
  const std::string& csv_path() const { return csv_path_; }

 private:
  std::string jsonl_path_, csv_path_, timing_path_;
  std::ofstream jsonl_, csv_, timing_;
  long long last_step_ = -1;
};

// JSONL writer for the Q-calibration probe rows (qdiag.jsonl + qdiag.csv).
class QDiagWriter {
 public:
  explicit QDiagWriter(const std::string& dir);
  void write(const QDiagnostics& rec);
  void flush();

  const std::string& jsonl_path() const { return jsonl_path_; }

 private:
  std::string jsonl_path_, csv_path_;
  std::ofstream jsonl_, csv_;
};

std::vector<MetricRecord> read_metrics_jsonl(const std::string& path);
std::vector<QDiagnostics> read_qdiag_jsonl(const std::string& path);

// Mean of the last `count` (or fewer) eval_return_mean values; NaN for an
// empty history.
double final_window_mean(const std::vector<MetricRecord>& rows, int count);

}  // namespace mocco::harness
