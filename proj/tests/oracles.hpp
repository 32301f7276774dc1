// Brute-force reference implementations used to freeze expected values.
// Everything here enumerates raw assignment/matching space directly and must
// stay independent of the solver code paths it checks.
#pragma once

#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "pra/blossom.hpp"
#include "pra/core.hpp"
#include "pra/ip.hpp"
#include "pra/scoring.hpp"

namespace pra::oracle {

/// Minimum total score over all feasible single-period partitions of the
/// given patients into the given rooms; nullopt when no partition exists.
std::optional<Score> best_partition_value(
    const std::vector<const Patient*>& females,
    const std::vector<const Patient*>& males, const std::vector<Room>& rooms,
    const ScoringFunction& scorer);

/// Minimum-cost perfect matching by full enumeration, nullopt when the graph
/// has none.
std::optional<std::int64_t> min_perfect_matching_cost(
    int n, const std::vector<WeightedEdge>& edges);

/// Lexicographic optimum of an IP variant by exhaustive assignment
/// enumeration, with objective senses applied in printed priority order.
/// nullopt = infeasible. Fixing values are inputs (checked elsewhere).
std::optional<std::vector<Score>> lex_optimum(
    IpVariant variant, const Instance& inst, const ScoringFunction& scorer,
    const std::optional<std::map<int, Score>>& smax,
    const std::optional<std::map<int, Score>>& wmin);

/// Visits every feasible fully-free assignment (independent rooms per
/// patient-period). room_of[k] indexes rooms per decision, decisions ordered
/// (period, patient index).
void for_each_feasible(
    const Instance& inst,
    const std::function<void(const Assignment&)>& visit);

/// Max fulfilled single-room requests at period t over all feasible
/// single-period assignments; nullopt when the period is infeasible.
std::optional<Score> smax_oracle(const Instance& inst, int t);

}  // namespace pra::oracle
