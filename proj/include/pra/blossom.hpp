#pragma once

#include <cstdint>
#include <vector>

namespace pra {

struct WeightedEdge {
  int u = 0;
  int v = 0;
  std::int64_t weight = 0;
};

/// Maximum-weight matching on a general (non-bipartite) graph via the
/// primal-dual blossom-shrinking algorithm, O(n^3). With `max_cardinality`
/// the result has maximum cardinality and, among those, maximum weight.
/// Integer weights are processed with exact integer arithmetic.
/// Returns mate[v] = matched partner or -1.
std::vector<int> max_weight_matching(int n,
                                     const std::vector<WeightedEdge>& edges,
                                     bool max_cardinality);

struct PerfectMatchingResult {
  bool perfect = false;          // false: the graph has no perfect matching
  std::vector<int> mate;         // mate[v] or -1
  std::int64_t cost = 0;         // total cost, valid when perfect
};

/// Minimum-cost perfect matching for nonnegative integer costs.
PerfectMatchingResult min_weight_perfect_matching(
    int n, const std::vector<WeightedEdge>& edges);

/// As above, but among all minimum-cost perfect matchings returns the one
/// whose sorted edge list (u < v, ordered by (u, v)) is lexicographically
/// smallest. Costs one extra solve per fixed edge.
PerfectMatchingResult min_weight_perfect_matching_lex(
    int n, const std::vector<WeightedEdge>& edges);

}  // namespace pra
