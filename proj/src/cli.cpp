#include "pra/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>

#include <CLI11.hpp>

#include "pra/bench.hpp"
#include "pra/dynamic.hpp"
#include "pra/io.hpp"
#include "pra/ip.hpp"
#include "pra/ip_solve.hpp"
#include "pra/matching.hpp"

namespace pra {

namespace {

constexpr int kOk = 0;
constexpr int kInfeasible = 1;
constexpr int kUsage = 2;

Rational parse_slack_arg(const std::string& text) {
  ScoringFunction f;  // reuse the scorer grammar's rational parsing
  f = ScoringFunction::parse("weighted-age:eps=" + text);
  return f.eps;
}

ModelFixings static_fixings(IpVariant ip, const Instance& inst,
                            const ScoringFunction& scorer,
                            std::optional<Score>& wmin_total) {
  ModelFixings fixings;
  bool needs_smax = ip == IpVariant::R || ip == IpVariant::S ||
                    ip == IpVariant::U || ip == IpVariant::V ||
                    ip == IpVariant::Ustar;
  bool needs_wmin = ip == IpVariant::S || ip == IpVariant::V;
  if (needs_smax) {
    std::map<int, Score> m;
    std::vector<Score> s =
        smax_range(inst.rooms(), inst.patients(), 1, inst.horizon());
    for (int t = 1; t <= inst.horizon(); ++t) m[t] = s[t - 1];
    fixings.smax = std::move(m);
  }
  try {
    WminResult wm = wmin(inst, scorer);
    wmin_total = wm.total;
    if (needs_wmin) {
      std::map<int, Score> m;
      for (int t = 1; t <= inst.horizon(); ++t) m[t] = wm.per_period[t - 1];
      fixings.wmin = std::move(m);
    }
  } catch (const UnsupportedCapacityError&) {
    if (needs_wmin) throw;
  }
  return fixings;
}

int cmd_solve(const std::string& instance_path, const std::string& ip_name,
              const std::string& scorer_spec, double time_limit,
              const std::string& out_path) {
  Instance inst = load_instance(instance_path);
  ScoringFunction scorer = ScoringFunction::parse(scorer_spec);
  IpVariant ip = variant_from_name(ip_name);

  std::optional<Score> wmin_total;
  ModelFixings fixings = static_fixings(ip, inst, scorer, wmin_total);
  IpModel model = build_model(ip, inst, scorer, fixings);
  SolveOptions opt;
  opt.time_limit_s = time_limit;
  opt.fpref_lower_bound = wmin_total;
  IpSolution sol = solve_lexicographic(model, opt);

  SolutionFile file;
  file.mode = "static";
  file.ip = variant_name(ip);
  file.scorer = scorer.spec();
  file.stage_values = sol.stage_values;
  if (wmin_total) file.wmin_total = *wmin_total;
  switch (sol.status) {
    case SolveStatus::Optimal: file.status = "optimal"; break;
    case SolveStatus::Infeasible: file.status = "infeasible"; break;
    case SolveStatus::TimeLimit: file.status = "time-limit"; break;
  }
  if (sol.status != SolveStatus::Infeasible && sol.has_incumbent) {
    file.assignment = sol.assignment;
    file.objectives.transfers = evaluate_transfers(sol.assignment, inst);
    file.objectives.roommate_fit =
        evaluate_roommate_fit(sol.assignment, inst, scorer);
    file.objectives.singles_fulfilled = evaluate_singles(sol.assignment, inst);
  }
  std::string text = write_solution(file);
  if (out_path.empty())
    std::cout << text;
  else
    save_text(out_path, text);
  return sol.status == SolveStatus::Infeasible ? kInfeasible : kOk;
}

int cmd_bound(const std::string& instance_path, const std::string& scorer_spec) {
  Instance inst = load_instance(instance_path);
  ScoringFunction scorer = ScoringFunction::parse(scorer_spec);
  WminResult wm = wmin(inst, scorer);
  std::cout << "t,wmin\n";
  for (int t = 1; t <= inst.horizon(); ++t)
    std::cout << t << ',' << wm.per_period[t - 1] << "\n";
  std::cout << "total," << wm.total << "\n";
  return kOk;
}

int cmd_dynamic(const std::string& instance_path, const std::string& first_ip,
                const std::string& scorer_spec, const std::string& slack,
                double time_limit, const std::string& out_path) {
  Instance inst = load_instance(instance_path);
  DynamicConfig config;
  config.first_ip = variant_from_name(first_ip);
  config.scorer = ScoringFunction::parse(scorer_spec);
  config.wmin_slack = parse_slack_arg(slack);
  config.stage_time_limit_s = time_limit;
  config.validate();

  DynamicTrajectory traj = run_dynamic(inst, config);

  SolutionFile file;
  file.mode = "dynamic";
  file.ip = variant_name(config.first_ip);
  file.first_ip = config.first_ip;
  file.scorer = config.scorer.spec();
  file.status = traj.completed ? "completed" : "failed";
  file.assignment = traj.final_assignment;
  file.objectives = traj.totals;
  file.wmin_total = traj.completed ? traj.wmin_total : -1;
  file.trajectory = traj.iterations;
  std::string text = write_solution(file);
  if (out_path.empty())
    std::cout << text;
  else
    save_text(out_path, text);
  return traj.completed ? kOk : kInfeasible;
}

int cmd_export_lp(const std::string& instance_path, const std::string& ip_name,
                  const std::string& scorer_spec, const std::string& out_path) {
  Instance inst = load_instance(instance_path);
  ScoringFunction scorer = ScoringFunction::parse(scorer_spec);
  IpVariant ip = variant_from_name(ip_name);
  std::optional<Score> wmin_total;
  ModelFixings fixings = static_fixings(ip, inst, scorer, wmin_total);
  IpModel model = build_model(ip, inst, scorer, fixings);
  std::string text = export_lp(model);
  if (out_path.empty())
    std::cout << text;
  else
    save_text(out_path, text);
  return kOk;
}

int cmd_bench(const std::string& dir, const std::string& config_path,
              const std::string& out_dir) {
  std::ifstream in(config_path);
  if (!in) throw DataError("cannot open bench config '" + config_path + "'");
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  BenchConfig config = parse_bench_config(text);

  std::vector<std::string> paths;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.path().extension() == ".json")
      paths.push_back(entry.path().string());
  std::sort(paths.begin(), paths.end());
  if (paths.empty()) throw DataError("no .json instances under '" + dir + "'");

  BenchReport report = run_bench(paths, config);
  std::filesystem::create_directories(out_dir);
  save_text(out_dir + "/report.csv", report_csv(report));
  save_text(out_dir + "/curves.csv", curves_csv(report));
  save_text(out_dir + "/iterations.csv", iterations_csv(report));
  std::cout << "wrote " << report.rows.size() << " rows to " << out_dir
            << "/report.csv\n";
  return kOk;
}

}  // namespace

int cli(const std::vector<std::string>& args) {
  CLI::App app{"Patient-to-room assignment toolkit"};
  app.require_subcommand(1);

  std::string instance_path, out_path, ip_name = "Q", scorer_spec = "zero";
  double time_limit = 3600.0;

  auto* solve = app.add_subcommand("solve", "solve one IP variant exactly");
  solve->add_option("--instance", instance_path)->required();
  solve->add_option("--ip", ip_name, "Q|R|S|T|U|V")->required();
  solve->add_option("--scorer", scorer_spec)->required();
  solve->add_option("--time-limit", time_limit, "seconds");
  solve->add_option("--out", out_path);

  auto* bound = app.add_subcommand("bound", "per-period w^min as CSV");
  bound->add_option("--instance", instance_path)->required();
  bound->add_option("--scorer", scorer_spec)->required();

  std::string first_ip = "U", slack = "1";
  auto* dynamic = app.add_subcommand("dynamic", "day-by-day replanning");
  dynamic->add_option("--instance", instance_path)->required();
  dynamic->add_option("--first-ip", first_ip, "U|V");
  dynamic->add_option("--scorer", scorer_spec)->required();
  dynamic->add_option("--wmin-slack", slack, "multiplier >= 1");
  dynamic->add_option("--time-limit", time_limit, "per-stage seconds");
  dynamic->add_option("--out", out_path);

  GeneratorParams params;
  auto* generate = app.add_subcommand("generate", "synthetic instance");
  generate->add_option("--seed", params.seed);
  generate->add_option("--rooms", params.rooms);
  generate->add_option("--double-frac", params.double_fraction);
  generate->add_option("--horizon", params.horizon);
  generate->add_option("--occupancy", params.occupancy);
  generate->add_option("--los-mean", params.los_mean);
  generate->add_option("--age-min", params.age_min);
  generate->add_option("--age-max", params.age_max);
  generate->add_option("--single-prob", params.single_request_prob);
  generate->add_option("--female-ratio", params.female_ratio);
  generate->add_option("--lead-max", params.max_lead);
  generate->add_option("--out", out_path);

  auto* export_lp_cmd = app.add_subcommand("export-lp", "write the LP file");
  export_lp_cmd->add_option("--instance", instance_path)->required();
  export_lp_cmd->add_option("--ip", ip_name)->required();
  export_lp_cmd->add_option("--scorer", scorer_spec)->required();
  export_lp_cmd->add_option("--out", out_path);

  std::string bench_dir, bench_config, bench_out = "bench-out";
  auto* bench = app.add_subcommand("bench", "batch runs over a directory");
  bench->add_option("--dir", bench_dir)->required();
  bench->add_option("--config", bench_config)->required();
  bench->add_option("--out", bench_out);

  std::vector<std::string> argv_like = args;
  try {
    std::vector<const char*> argv;
    argv.push_back("pra");
    for (const std::string& a : argv_like) argv.push_back(a.c_str());
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n" << app.help();
    return kUsage;
  }

  try {
    if (solve->parsed())
      return cmd_solve(instance_path, ip_name, scorer_spec, time_limit,
                       out_path);
    if (bound->parsed()) return cmd_bound(instance_path, scorer_spec);
    if (dynamic->parsed())
      return cmd_dynamic(instance_path, first_ip, scorer_spec, slack,
                         time_limit, out_path);
    if (generate->parsed()) {
      std::string text = write_instance(generate_instance(params));
      if (out_path.empty())
        std::cout << text;
      else
        save_text(out_path, text);
      return kOk;
    }
    if (export_lp_cmd->parsed())
      return cmd_export_lp(instance_path, ip_name, scorer_spec, out_path);
    if (bench->parsed()) return cmd_bench(bench_dir, bench_config, bench_out);
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kInfeasible;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace pra
