#pragma once

#include <string>
#include <vector>

#include "pra/dynamic.hpp"
#include "pra/io.hpp"

namespace pra {

struct BenchRunConfig {
  std::string name;
  std::string mode = "static";  // "static" or "dynamic"
  IpVariant ip = IpVariant::U;  // static variant / dynamic first IP
  ScoringFunction scorer;
  Rational wmin_slack{1, 1};
  double time_limit_s = 60.0;
};

struct BenchConfig {
  std::vector<BenchRunConfig> runs;
};

/// {"time_limit_s": 60, "runs": [{"mode":"static","ip":"S",
/// "scorer":"bounded-age:k=10"}, {"mode":"dynamic","first_ip":"U", ...}]}
BenchConfig parse_bench_config(const std::string& text);

struct BenchRow {
  std::string instance;
  std::string config;
  std::string mode;
  std::string ip;
  std::string scorer;
  std::string status;  // optimal | infeasible | time-limit | completed |
                       // failed | error
  double runtime_ms = 0;
  double solver_ms = 0;
  std::int64_t f_trans = -1;
  std::int64_t f_priv = -1;
  Score f_pref = -1;
  Score wmin_total = -1;
  std::int64_t stage_first = 0, stage_ustar = 0, stage_tstar = 0, stage_q = 0,
                stage_fail = 0;
  std::string error;
};

struct IterSample {
  std::string instance;
  std::string config;
  int t = 0;
  double wall_ms = 0;
  double solver_ms = 0;
};

struct BenchReport {
  std::vector<BenchRow> rows;
  std::vector<IterSample> iterations;  // boxplot-ready per-iteration times
};

/// Runs every instance x config job (in parallel when OpenMP is enabled);
/// per-job failures become rows, never abort the batch.
BenchReport run_bench(const std::vector<std::string>& instance_paths,
                      const BenchConfig& config);

std::string report_csv(const BenchReport& report);
/// Solved-or-infeasible counts under growing time thresholds, per config.
std::string curves_csv(const BenchReport& report);
std::string iterations_csv(const BenchReport& report);

}  // namespace pra
