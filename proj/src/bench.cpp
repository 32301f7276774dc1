#include "pra/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>
#include <sstream>

#include <json.hpp>

#include "pra/ip.hpp"
#include "pra/matching.hpp"

namespace pra {

namespace {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

Rational parse_slack(double v) {
  // benchmark configs carry the multiplier as a decimal; keep it exact
  std::int64_t num = std::llround(v * 1000.0);
  return {num, 1000};
}

}  // namespace

BenchConfig parse_bench_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("bench config is not valid JSON: ") + e.what());
  }
  BenchConfig config;
  double default_limit = j.value("time_limit_s", 60.0);
  if (!j.contains("runs") || !j["runs"].is_array())
    throw DataError("/runs: expected an array");
  for (std::size_t i = 0; i < j["runs"].size(); ++i) {
    const json& jr = j["runs"][i];
    BenchRunConfig run;
    run.mode = jr.value("mode", "static");
    if (run.mode != "static" && run.mode != "dynamic")
      throw DataError("/runs/" + std::to_string(i) +
                      "/mode: must be \"static\" or \"dynamic\"");
    std::string ip = run.mode == "static" ? jr.value("ip", "U")
                                          : jr.value("first_ip", "U");
    run.ip = variant_from_name(ip);
    run.scorer = ScoringFunction::parse(jr.value("scorer", "zero"));
    run.wmin_slack = parse_slack(jr.value("wmin_slack", 1.0));
    run.time_limit_s = jr.value("time_limit_s", default_limit);
    std::string scorer_tag = run.scorer.spec();
    std::replace(scorer_tag.begin(), scorer_tag.end(), ',', '+');
    run.name = jr.value("name", run.mode + "-" + ip + "-" + scorer_tag);
    config.runs.push_back(std::move(run));
  }
  return config;
}

namespace {

void run_static(const Instance& inst, const BenchRunConfig& run, BenchRow& row) {
  ModelFixings fixings;
  bool needs_smax = run.ip == IpVariant::R || run.ip == IpVariant::S ||
                    run.ip == IpVariant::U || run.ip == IpVariant::V ||
                    run.ip == IpVariant::Ustar;
  bool needs_wmin = run.ip == IpVariant::S || run.ip == IpVariant::V;
  std::optional<Score> wmin_total;
  if (needs_smax) {
    std::map<int, Score> m;
    std::vector<Score> s =
        smax_range(inst.rooms(), inst.patients(), 1, inst.horizon());
    for (int t = 1; t <= inst.horizon(); ++t) m[t] = s[t - 1];
    fixings.smax = std::move(m);
  }
  try {
    WminResult wm = wmin(inst, run.scorer);
    wmin_total = wm.total;
    row.wmin_total = wm.total;
    if (needs_wmin) {
      std::map<int, Score> m;
      for (int t = 1; t <= inst.horizon(); ++t) m[t] = wm.per_period[t - 1];
      fixings.wmin = std::move(m);
    }
  } catch (const UnsupportedCapacityError&) {
    if (needs_wmin) throw;
  }

  IpModel model = build_model(run.ip, inst, run.scorer, fixings);
  SolveOptions opt;
  opt.time_limit_s = run.time_limit_s;
  opt.fpref_lower_bound = wmin_total;
  auto start = Clock::now();
  IpSolution sol = solve_lexicographic(model, opt);
  row.solver_ms =
      std::chrono::duration<double, std::milli>(Clock::now() - start).count();

  switch (sol.status) {
    case SolveStatus::Optimal: row.status = "optimal"; break;
    case SolveStatus::Infeasible: row.status = "infeasible"; break;
    case SolveStatus::TimeLimit: row.status = "time-limit"; break;
  }
  if (sol.status == SolveStatus::Optimal) {
    row.f_trans = evaluate_transfers(sol.assignment, inst);
    row.f_pref = evaluate_roommate_fit(sol.assignment, inst, run.scorer);
    row.f_priv = evaluate_singles(sol.assignment, inst);
  }
}

void run_dynamic_job(const Instance& inst, const BenchRunConfig& run,
                     BenchRow& row, std::vector<IterSample>& samples) {
  DynamicConfig config;
  config.first_ip = run.ip == IpVariant::V ? IpVariant::V : IpVariant::U;
  config.scorer = run.scorer;
  config.wmin_slack = run.wmin_slack;
  config.stage_time_limit_s = run.time_limit_s;
  DynamicTrajectory traj = run_dynamic(inst, config);
  row.status = traj.completed ? "completed" : "failed";
  if (traj.completed) {
    row.f_trans = traj.totals.transfers;
    row.f_pref = traj.totals.roommate_fit;
    row.f_priv = traj.totals.singles_fulfilled;
    row.wmin_total = traj.wmin_total;
  }
  for (const IterationRecord& rec : traj.iterations) {
    row.solver_ms += rec.solver_ms;
    switch (rec.stage) {
      case DynamicStage::FirstIp: row.stage_first++; break;
      case DynamicStage::Ustar: row.stage_ustar++; break;
      case DynamicStage::Tstar: row.stage_tstar++; break;
      case DynamicStage::Q:
        if (rec.success)
          row.stage_q++;
        else
          row.stage_fail++;
        break;
      case DynamicStage::FeasibilityFail: row.stage_fail++; break;
    }
    samples.push_back({row.instance, row.config, rec.t, rec.wall_ms,
                       rec.solver_ms});
  }
}

}  // namespace

BenchReport run_bench(const std::vector<std::string>& instance_paths,
                      const BenchConfig& config) {
  struct Job {
    std::string path;
    const BenchRunConfig* run;
  };
  std::vector<Job> jobs;
  for (const std::string& path : instance_paths)
    for (const BenchRunConfig& run : config.runs) jobs.push_back({path, &run});

  std::vector<BenchRow> rows(jobs.size());
  std::vector<std::vector<IterSample>> samples(jobs.size());

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const Job& job = jobs[i];
    BenchRow& row = rows[i];
    row.instance = job.path;
    row.config = job.run->name;
    row.mode = job.run->mode;
    row.ip = variant_name(job.run->ip);
    row.scorer = job.run->scorer.spec();
    auto start = Clock::now();
    try {
      Instance inst = load_instance(job.path);
      if (job.run->mode == "static")
        run_static(inst, *job.run, row);
      else
        run_dynamic_job(inst, *job.run, row, samples[i]);
    } catch (const InfeasibleError& e) {
      row.status = "infeasible";
      row.error = e.what();
    } catch (const Error& e) {
      row.status = "error";
      row.error = e.what();
    }
    row.runtime_ms =
        std::chrono::duration<double, std::milli>(Clock::now() - start)
            .count();
  }

  BenchReport report;
  report.rows = std::move(rows);
  for (auto& s : samples)
    report.iterations.insert(report.iterations.end(), s.begin(), s.end());
  return report;
}

namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string report_csv(const BenchReport& report) {
  std::ostringstream out;
  out << "instance,config,mode,ip,scorer,status,runtime_ms,solver_ms,"
         "f_trans,f_priv,f_pref,wmin_total,stage_first,stage_ustar,"
         "stage_tstar,stage_q,stage_fail,error\n";
  for (const BenchRow& r : report.rows) {
    out << csv_escape(r.instance) << ',' << csv_escape(r.config) << ','
        << r.mode << ',' << r.ip << ',' << csv_escape(r.scorer) << ','
        << r.status << ',' << r.runtime_ms << ',' << r.solver_ms << ','
        << r.f_trans << ',' << r.f_priv << ',' << r.f_pref << ','
        << r.wmin_total << ',' << r.stage_first << ',' << r.stage_ustar << ','
        << r.stage_tstar << ',' << r.stage_q << ',' << r.stage_fail << ','
        << csv_escape(r.error) << "\n";
  }
  return out.str();
}

std::string curves_csv(const BenchReport& report) {
  // log-spaced thresholds from 1 ms up to the slowest run
  double max_ms = 1.0;
  for (const BenchRow& r : report.rows) max_ms = std::max(max_ms, r.runtime_ms);
  std::vector<double> thresholds;
  for (double x = 1.0; x < max_ms * 2; x *= 2) thresholds.push_back(x);

  std::set<std::string> configs;
  for (const BenchRow& r : report.rows) configs.insert(r.config);

  std::ostringstream out;
  out << "config,threshold_ms,solved\n";
  for (const std::string& c : configs) {
    for (double th : thresholds) {
      int solved = 0;
      for (const BenchRow& r : report.rows) {
        if (r.config != c) continue;
        bool done = r.status == "optimal" || r.status == "infeasible" ||
                    r.status == "completed";
        if (done && r.runtime_ms <= th) ++solved;
      }
      out << csv_escape(c) << ',' << th << ',' << solved << "\n";
    }
  }
  return out.str();
}

std::string iterations_csv(const BenchReport& report) {
  std::ostringstream out;
  out << "instance,config,t,wall_ms,solver_ms\n";
  for (const IterSample& s : report.iterations)
    out << csv_escape(s.instance) << ',' << csv_escape(s.config) << ',' << s.t
        << ',' << s.wall_ms << ',' << s.solver_ms << "\n";
  return out.str();
}

}  // namespace pra
