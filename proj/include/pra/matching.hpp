#pragma once

#include <string>
#include <vector>

#include "pra/blossom.hpp"
#include "pra/core.hpp"
#include "pra/scoring.hpp"

namespace pra {

/// Auxiliary matching graph for one period: one vertex per present patient
/// (females first, then males, in input order) plus k = 2R - n_F - n_M
/// auxiliary vertices. The first alpha auxiliaries (X1) stand for single
/// rooms that must be used and carry no mutual edges; the rest (X2) also
/// pair up with each other to absorb empty rooms.
struct RmpGraph {
  int num_vertices = 0;
  int num_females = 0;
  int num_males = 0;
  int num_forced_singles = 0;  // alpha = |X1|
  std::vector<const Patient*> patients;  // vertex -> patient, first nF+nM
  std::vector<WeightedEdge> edges;       // deterministic construction order

  int num_patients() const { return num_females + num_males; }
  bool is_patient_vertex(int v) const { return v < num_patients(); }
};

/// Occupant sets, one per room (possibly empty), plus the total score.
struct RmpSolution {
  std::vector<std::vector<const Patient*>> occupants;
  Score value = 0;
};

RmpGraph build_rmp_graph(const std::vector<const Patient*>& females,
                         const std::vector<const Patient*>& males,
                         const std::vector<Room>& rooms,
                         const ScoringFunction& scorer);

RmpSolution decode_partition(const PerfectMatchingResult& matching,
                             const RmpGraph& graph,
                             const std::vector<Room>& rooms);

enum class TieBreak { None, Lexicographic };

/// Exact single-period roommate optimization; capacities must be in {1, 2}.
RmpSolution solve_rmp(const std::vector<const Patient*>& females,
                      const std::vector<const Patient*>& males,
                      const std::vector<Room>& rooms,
                      const ScoringFunction& scorer,
                      TieBreak tie = TieBreak::Lexicographic);

/// Value-only fast path used by the per-period bound kernels.
Score rmp_value(const std::vector<const Patient*>& females,
                const std::vector<const Patient*>& males,
                const std::vector<Room>& rooms, const ScoringFunction& scorer);

struct WminResult {
  std::vector<Score> per_period;  // indexed t - t_begin
  Score total = 0;
  int t_begin = 1;
};

/// Per-period roommate-fit optima over periods [t_begin, t_end]; their sum
/// is a tight lower bound on f_pref when transfers are unrestricted.
/// The parallel kernel distributes periods across OpenMP threads; the serial
/// variant is the reference implementation kept for testing.
WminResult wmin_range(const std::vector<Room>& rooms,
                      const std::vector<Patient>& patients,
                      const ScoringFunction& scorer, int t_begin, int t_end);
WminResult wmin_range_serial(const std::vector<Room>& rooms,
                             const std::vector<Patient>& patients,
                             const ScoringFunction& scorer, int t_begin,
                             int t_end);

WminResult wmin(const Instance& inst, const ScoringFunction& scorer);

/// Plain-text edge-list dump: "n m" header, then one "u v cost" line per
/// edge.
std::string dump_graph(const RmpGraph& graph);

}  // namespace pra
