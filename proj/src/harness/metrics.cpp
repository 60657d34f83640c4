#include "mocco/harness/metrics.hpp"

#include <charconv>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "mocco/errors.hpp"

namespace mocco::harness {

using ordered_json = nlohmann::ordered_json;

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw NumericError("format_double: conversion failed");
  return std::string(buf, end);
}

namespace {

std::ofstream open_sink(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open output file: " + path);
  return out;
}

}  // namespace

MetricsWriter::MetricsWriter(const std::string& dir)
    : jsonl_path_(dir + "/metrics.jsonl"),
      csv_path_(dir + "/metrics.csv"),
      timing_path_(dir + "/timing.csv") {
  jsonl_ = open_sink(jsonl_path_);
  csv_ = open_sink(csv_path_);
  timing_ = open_sink(timing_path_);
  csv_ << "step,eval_return_mean,eval_return_std,critic_loss,controller_loss,"
          "zeta_mean,a_e_norm_mean\n";
  timing_ << "step,wall_time_s\n";
}

void MetricsWriter::write(const MetricRecord& rec) {
  if (rec.step < last_step_)
    throw ConfigError("metric rows must have non-decreasing step");
  last_step_ = rec.step;

  ordered_json row;
  row["step"] = rec.step;
  row["eval_return_mean"] = rec.eval_return_mean;
  row["eval_return_std"] = rec.eval_return_std;
  row["critic_loss"] = rec.critic_loss;
  row["controller_loss"] = rec.controller_loss;
  row["zeta_mean"] = rec.zeta_mean;
  row["a_e_norm_mean"] = rec.a_e_norm_mean;
  jsonl_ << row.dump() << "\n";

  csv_ << rec.step << ',' << format_double(rec.eval_return_mean) << ','
       << format_double(rec.eval_return_std) << ',' << format_double(rec.critic_loss)
       << ',' << format_double(rec.controller_loss) << ','
       << format_double(rec.zeta_mean) << ',' << format_double(rec.a_e_norm_mean)
       << "\n";

  timing_ << rec.step << ',' << format_double(rec.wall_time_s) << "\n";
}

void MetricsWriter::flush() {
  jsonl_.flush();
  csv_.flush();
  timing_.flush();
}

QDiagWriter::QDiagWriter(const std::string& dir)
    : jsonl_path_(dir + "/qdiag.jsonl"), csv_path_(dir + "/qdiag.csv") {
  jsonl_ = open_sink(jsonl_path_);
  csv_ = open_sink(csv_path_);
  csv_ << "step,q_td_mean,q_true_mean,q_mc_mean\n";
}

void QDiagWriter::write(const QDiagnostics& rec) {
  ordered_json row;
  row["step"] = rec.step;
  row["q_td_mean"] = rec.q_td_mean;
  row["q_true_mean"] = rec.q_true_mean;
  row["q_mc_mean"] = rec.q_mc_mean;
  jsonl_ << row.dump() << "\n";
  csv_ << rec.step << ',' << format_double(rec.q_td_mean) << ','
       << format_double(rec.q_true_mean) << ',' << format_double(rec.q_mc_mean) << "\n";
}

void QDiagWriter::flush() {
  jsonl_.flush();
  csv_.flush();
}

std::vector<MetricRecord> read_metrics_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open metrics file: " + path);
  std::vector<MetricRecord> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const ordered_json row = ordered_json::parse(line);
    MetricRecord rec;
    rec.step = row.at("step").get<long long>();
    rec.eval_return_mean = row.at("eval_return_mean").get<double>();
    rec.eval_return_std = row.at("eval_return_std").get<double>();
    rec.critic_loss = row.at("critic_loss").get<double>();
    rec.controller_loss = row.at("controller_loss").get<double>();
    rec.zeta_mean = row.at("zeta_mean").get<double>();
    rec.a_e_norm_mean = row.at("a_e_norm_mean").get<double>();
    rows.push_back(rec);
  }
  return rows;
}

std::vector<QDiagnostics> read_qdiag_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open qdiag file: " + path);
  std::vector<QDiagnostics> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const ordered_json row = ordered_json::parse(line);
    QDiagnostics rec;
    rec.step = row.at("step").get<long long>();
    rec.q_td_mean = row.at("q_td_mean").get<double>();
    rec.q_true_mean = row.at("q_true_mean").get<double>();
    rec.q_mc_mean = row.at("q_mc_mean").get<double>();
    rows.push_back(rec);
  }
  return rows;
}

double final_window_mean(const std::vector<MetricRecord>& rows, int count) {
  if (rows.empty() || count < 1) return std::numeric_limits<double>::quiet_NaN();
  const size_t n = std::min(rows.size(), static_cast<size_t>(count));
  double sum = 0.0;
  for (size_t i = rows.size() - n; i < rows.size(); ++i) sum += rows[i].eval_return_mean;
  return sum / static_cast<double>(n);
}

}  // namespace mocco::harness
