#include "pra/dynamic.hpp"

#include <algorithm>
#include <chrono>
#include <set>

#include "pra/ip.hpp"

namespace pra {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start)
      .count();
}

}  // namespace

std::string stage_name(DynamicStage stage, IpVariant first_ip) {
  switch (stage) {
    case DynamicStage::FeasibilityFail: return "feasibility-fail";
    case DynamicStage::FirstIp: return variant_name(first_ip);
    case DynamicStage::Ustar: return "U*";
    case DynamicStage::Tstar: return "T*";
    case DynamicStage::Q: return "Q";
  }
  return "?";
}

void DynamicConfig::validate() const {
  if (first_ip != IpVariant::U && first_ip != IpVariant::V)
    throw ConfigError("first IP of the cascade must be U or V");
  if (stage_time_limit_s <= 0) throw ConfigError("stage time limit must be > 0");
  if (wmin_slack.num < wmin_slack.den || wmin_slack.den <= 0)
    throw ConfigError("w^min slack multiplier must be >= 1");
}

DynamicState make_initial_state(const Instance& inst) {
  DynamicState state;
  state.t = 1;
  state.fixations = inst.preassigned();
  return state;
}

std::vector<std::pair<std::string, std::string>> update_fixings(
    const Instance& inst, const Assignment& z, int t) {
  std::vector<std::pair<std::string, std::string>> fixations;
  for (const Patient& p : inst.patients()) {
    if (!(p.present(t) && p.present(t + 1))) continue;
    const std::string* room = z.room_at(p.id, t);
    if (room == nullptr)
      throw IncompleteAssignmentError("no room for patient '" + p.id +
                                      "' in period " + std::to_string(t));
    fixations.emplace_back(p.id, *room);
  }
  return fixations;
}

namespace {

// Patients known at period t and not yet discharged, stays clamped to the
// window [t, horizon].
Instance registered_view(const Instance& inst, int t,
                         const std::vector<std::pair<std::string, std::string>>&
                             fixations) {
  std::vector<Patient> view;
  std::set<std::string> in_view;
  for (const Patient& p : inst.patients()) {
    if (p.registration > t || p.discharge <= t) continue;
    Patient q = p;
    q.arrival = std::max(p.arrival, t);
    q.registration = std::min(q.registration, q.arrival);
    if (q.arrival >= q.discharge) continue;
    in_view.insert(q.id);
    view.push_back(std::move(q));
  }
  // fixations of patients without a remaining stay are outdated
  std::vector<std::pair<std::string, std::string>> active;
  for (const auto& fix : fixations)
    if (in_view.count(fix.first)) active.push_back(fix);
  return Instance(inst.horizon(), inst.rooms(), std::move(view),
                  std::move(active));
}

struct StageOutcome {
  bool accepted = false;
  bool time_limited = false;
  IpSolution solution;
};

StageOutcome run_stage(const IpModel& model, const SolveOptions& opt) {
  StageOutcome out;
  out.solution = solve_lexicographic(model, opt);
  if (out.solution.status == SolveStatus::Optimal) {
    out.accepted = true;
  } else if (out.solution.status == SolveStatus::TimeLimit &&
             out.solution.has_incumbent) {
    // fallback stages are for infeasibility; a feasible incumbent is kept
    out.accepted = true;
    out.time_limited = true;
  }
  return out;
}

}  // namespace

std::pair<DynamicState, IterationRecord> step(const DynamicState& state,
                                              const Instance& inst,
                                              const DynamicConfig& config) {
  config.validate();
  const int t = state.t;
  const int horizon = inst.horizon();
  auto wall_start = Clock::now();
  double solver_ms = 0;

  IterationRecord rec;
  rec.t = t;

  Instance view = registered_view(inst, t, state.fixations);

  // 1) combinatorial feasibility of the registered view over [t, horizon]
  for (int tt = t; tt <= horizon; ++tt) {
    if (!check_period_feasibility(view, tt)) {
      rec.stage = DynamicStage::FeasibilityFail;
      rec.success = false;
      rec.wall_ms = ms_since(wall_start);
      return {state, rec};
    }
  }

  // 2) per-period fixings over the remaining horizon
  ModelFixings fixings;
  std::map<int, Score> smax_map;
  std::vector<Score> smax =
      smax_range(view.rooms(), view.patients(), t, horizon);
  for (int tt = t; tt <= horizon; ++tt) smax_map[tt] = smax[tt - t];
  fixings.smax = smax_map;

  std::optional<Score> wmin_total_window;
  if (config.first_ip == IpVariant::V) {
    WminResult wm = wmin_range(view.rooms(), view.patients(), config.scorer,
                               t, horizon);
    std::map<int, Score> wmin_map;
    for (int tt = t; tt <= horizon; ++tt) {
      Score capped = wm.per_period[tt - t] * config.wmin_slack.num /
                     config.wmin_slack.den;
      wmin_map[tt] = capped;
    }
    fixings.wmin = wmin_map;
    wmin_total_window = wm.total;
  }

  ModelOptions options;
  options.window_start = t;
  options.with_lp_rows = false;  // the exact solver works on the structured view

  SolveOptions solve_opt;
  solve_opt.time_limit_s = config.stage_time_limit_s;
  if (wmin_total_window) solve_opt.fpref_lower_bound = *wmin_total_window;

  const Assignment* accepted = nullptr;
  IpSolution solution;

  auto attempt = [&](IpVariant variant, const ModelFixings& fix,
                     DynamicStage stage) {
    auto solve_start = Clock::now();
    IpModel model = build_model(variant, view, config.scorer, fix, options);
    StageOutcome out = run_stage(model, solve_opt);
    solver_ms += ms_since(solve_start);
    if (out.accepted) {
      solution = std::move(out.solution);
      accepted = &solution.assignment;
      rec.stage = stage;
      rec.time_limited = out.time_limited;
      rec.success = true;
      for (std::size_t i = 0; i < model.objectives.size() &&
                              i < solution.stage_values.size();
           ++i)
        rec.objective_snapshot.emplace_back(model.objectives[i].label,
                                            solution.stage_values[i]);
    }
    return out.accepted;
  };

  // 3) cascade: V or U, then same-day transfers (U*, T*), then free Q
  bool done = attempt(config.first_ip, fixings, DynamicStage::FirstIp);
  if (!done) {
    ModelFixings smax_only;
    smax_only.smax = fixings.smax;
    done = attempt(IpVariant::Ustar, smax_only, DynamicStage::Ustar);
  }
  if (!done) done = attempt(IpVariant::Tstar, {}, DynamicStage::Tstar);
  if (!done) {
    options.virtual_prev = state.fixations;
    done = attempt(IpVariant::Q, {}, DynamicStage::Q);
  }

  rec.wall_ms = ms_since(wall_start);
  rec.solver_ms = solver_ms;

  if (!done) {
    rec.stage = DynamicStage::Q;
    rec.success = false;
    return {state, rec};
  }

  // 4) freeze this period's rows, advance the fixation set
  DynamicState next;
  next.t = t + 1;
  next.history = state.history;
  for (const Patient& p : inst.patients()) {
    if (!p.present(t)) continue;
    const std::string* room = accepted->room_at(p.id, t);
    if (room == nullptr)
      throw InvariantError("stage solution misses patient '" + p.id +
                           "' in period " + std::to_string(t));
    next.history.set(p.id, t, *room);
  }
  next.fixations = update_fixings(inst, next.history, t);
  return {next, rec};
}

DynamicTrajectory run_dynamic(const Instance& inst,
                              const DynamicConfig& config) {
  config.validate();
  DynamicTrajectory traj;
  DynamicState state = make_initial_state(inst);
  bool failed = false;
  for (int t = 1; t <= inst.horizon() && !failed; ++t) {
    auto [next, rec] = step(state, inst, config);
    traj.iterations.push_back(rec);
    if (!rec.success) {
      failed = true;
      traj.failed_period = t;
      break;
    }
    state = std::move(next);
  }
  traj.final_assignment = state.history;
  traj.completed = !failed;
  if (traj.completed) {
    traj.totals.transfers = evaluate_transfers(traj.final_assignment, inst);
    traj.totals.roommate_fit =
        evaluate_roommate_fit(traj.final_assignment, inst, config.scorer);
    traj.totals.singles_fulfilled =
        evaluate_singles(traj.final_assignment, inst);
    traj.wmin_total = wmin(inst, config.scorer).total;
  }
  return traj;
}

}  // namespace pra
