#pragma once

#include <string>
#include <utility>
#include <vector>

#include "pra/core.hpp"
#include "pra/ip_solve.hpp"
#include "pra/matching.hpp"
#include "pra/scoring.hpp"

namespace pra {

enum class DynamicStage { FeasibilityFail, FirstIp, Ustar, Tstar, Q };
std::string stage_name(DynamicStage stage, IpVariant first_ip);

struct DynamicConfig {
  IpVariant first_ip = IpVariant::U;  // U or V
  ScoringFunction scorer;
  double stage_time_limit_s = 10.0;
  /// Slack multiplier on the per-period w^min caps used by V; 1 is the exact
  /// bound, 2 reproduces the rough-estimate experiment.
  Rational wmin_slack{1, 1};

  void validate() const;
};

struct IterationRecord {
  int t = 0;
  DynamicStage stage = DynamicStage::FirstIp;
  bool success = false;
  bool time_limited = false;  // accepted an incumbent at the stage limit
  double wall_ms = 0;
  double solver_ms = 0;
  std::vector<std::pair<std::string, Score>> objective_snapshot;
};

struct DynamicState {
  int t = 1;
  std::vector<std::pair<std::string, std::string>> fixations;  // F_fix
  Assignment history;  // frozen per-period rows for periods < t
};

struct DynamicTrajectory {
  std::vector<IterationRecord> iterations;
  Assignment final_assignment;
  ObjectiveValues totals;
  Score wmin_total = 0;  // full-knowledge reference bound for f_pref
  bool completed = false;
  int failed_period = -1;
};

DynamicState make_initial_state(const Instance& inst);

/// One replanning iteration: feasibility check over the registered view,
/// then the cascade (V or U, then U*, T*, Q), then fixation bookkeeping.
std::pair<DynamicState, IterationRecord> step(const DynamicState& state,
                                              const Instance& inst,
                                              const DynamicConfig& config);

/// F_fix := {(p, z(p, t)) | p present in t and t+1}; discharged patients
/// drop out.
std::vector<std::pair<std::string, std::string>> update_fixings(
    const Instance& inst, const Assignment& z, int t);

DynamicTrajectory run_dynamic(const Instance& inst,
                              const DynamicConfig& config);

}  // namespace pra
