#pragma once

#include <optional>

#include "pra/ip.hpp"

namespace pra {

enum class SolveStatus { Optimal, Infeasible, TimeLimit };

struct IpSolution {
  SolveStatus status = SolveStatus::Infeasible;
  bool has_incumbent = false;
  std::vector<std::int64_t> values;  // aligned with model.vars
  std::vector<Score> stage_values;   // per-objective optima, priority order
  int failed_stage = -1;             // first infeasible stage
  Assignment assignment;             // decoded rooms, valid with an incumbent
  std::int64_t nodes = 0;
};

struct SolveOptions {
  double time_limit_s = 1e18;
  /// Known global lower bound on f_pref over the solved window (e.g. the sum
  /// of per-period matching optima); lets f_pref stages close early.
  std::optional<Score> fpref_lower_bound;
};

/// Depth-first branch-and-bound over patient-room choices, optimizing the
/// model's objectives in priority order and pinning each optimum before the
/// next stage. Exact; deterministic exploration order.
IpSolution solve_lexicographic(const IpModel& model,
                               const SolveOptions& options = {});

/// Maximum number of single-room requesters that can be sole occupants in
/// period t, over all feasible single-period assignments (capacities {1,2}).
Score compute_smax(const Instance& inst, int t);
Score smax_for_counts(int singles, int doubles, int females, int males,
                      int female_requesters, int male_requesters);

/// Per-period s^max over [t_begin, t_end]; the parallel kernel distributes
/// periods across OpenMP threads, the serial variant is the reference.
std::vector<Score> smax_range(const std::vector<Room>& rooms,
                              const std::vector<Patient>& patients,
                              int t_begin, int t_end);
std::vector<Score> smax_range_serial(const std::vector<Room>& rooms,
                                     const std::vector<Patient>& patients,
                                     int t_begin, int t_end);

}  // namespace pra
