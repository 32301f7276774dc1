#include "pra/matching.hpp"

#include <algorithm>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace pra {

namespace {

void check_rooms(const std::vector<Room>& rooms) {
  for (const Room& r : rooms) {
    if (r.capacity > 2)
      throw UnsupportedCapacityError(
          "room '" + r.id + "': capacity " + std::to_string(r.capacity) +
          " unsupported for the matching bound (only 1 and 2)");
    if (r.capacity < 1)
      throw DataError("room '" + r.id + "': capacity must be >= 1");
  }
}

int doubles_count(const std::vector<Room>& rooms) {
  int n = 0;
  for (const Room& r : rooms)
    if (r.capacity == 2) ++n;
  return n;
}

}  // namespace

RmpGraph build_rmp_graph(const std::vector<const Patient*>& females,
                         const std::vector<const Patient*>& males,
                         const std::vector<Room>& rooms,
                         const ScoringFunction& scorer) {
  check_rooms(rooms);
  const int num_rooms = static_cast<int>(rooms.size());
  const int nf = static_cast<int>(females.size());
  const int nm = static_cast<int>(males.size());
  const int r2 = doubles_count(rooms);
  if (2 * num_rooms < nf + nm)
    throw InfeasibleError("more patients than matching-graph slots");
  if (!counts_feasible(rooms, nf, nm))
    throw InfeasibleError("no sex-separated packing exists for this period");

  RmpGraph g;
  g.num_females = nf;
  g.num_males = nm;
  g.num_vertices = 2 * num_rooms;
  g.num_forced_singles = std::max(nf + nm - 2 * r2, 0);
  g.patients.reserve(nf + nm);
  for (const Patient* p : females) g.patients.push_back(p);
  for (const Patient* p : males) g.patients.push_back(p);

  const int np = nf + nm;
  const int x1_end = np + g.num_forced_singles;  // X1 vertices [np, x1_end)
  const Score empty_cost = score(scorer, {});
  for (int u = 0; u < g.num_vertices; ++u) {
    for (int v = u + 1; v < g.num_vertices; ++v) {
      if (v < np) {
        // Patient pair: same sex only.
        bool both_f = u < nf && v < nf;
        bool both_m = u >= nf && v >= nf;
        if (both_f || both_m)
          g.edges.push_back(
              {u, v, score_pair(scorer, *g.patients[u], *g.patients[v])});
      } else if (u < np) {
        // Patient with auxiliary: the patient is alone in a room.
        g.edges.push_back({u, v, score(scorer, {g.patients[u]})});
      } else if (u >= x1_end) {
        // Two X2 auxiliaries: an empty room. X1 vertices carry no mutual
        // edges, which forces at least alpha patients into single rooms.
        g.edges.push_back({u, v, empty_cost});
      }
    }
  }
  return g;
}

RmpSolution decode_partition(const PerfectMatchingResult& matching,
                             const RmpGraph& graph,
                             const std::vector<Room>& rooms) {
  if (!matching.perfect)
    throw InvariantError("decode_partition requires a perfect matching");

  std::vector<std::pair<int, int>> pairs;  // patient vertex pairs, u < v
  std::vector<int> singles;                // patient vertices alone
  for (int v = 0; v < graph.num_vertices; ++v) {
    int w = matching.mate[v];
    if (w < v) continue;
    if (graph.is_patient_vertex(v) && graph.is_patient_vertex(w))
      pairs.emplace_back(v, w);
    else if (graph.is_patient_vertex(v))
      singles.push_back(v);
    // auxiliary-auxiliary edges stand for rooms left empty
  }

  std::vector<int> double_rooms, single_rooms;
  for (std::size_t r = 0; r < rooms.size(); ++r)
    (rooms[r].capacity == 2 ? double_rooms : single_rooms).push_back(
        static_cast<int>(r));
  if (pairs.size() > double_rooms.size())
    throw InvariantError("matching produced more pairs than double rooms");

  RmpSolution sol;
  sol.occupants.assign(rooms.size(), {});
  std::size_t next_double = 0;
  for (const auto& [u, v] : pairs) {
    int r = double_rooms[next_double++];
    sol.occupants[r] = {graph.patients[u], graph.patients[v]};
  }
  // Singletons prefer single rooms, then spill into the remaining doubles.
  std::vector<int> solo_rooms = single_rooms;
  for (std::size_t i = next_double; i < double_rooms.size(); ++i)
    solo_rooms.push_back(double_rooms[i]);
  std::size_t next_solo = 0;
  for (int v : singles) {
    if (next_solo >= solo_rooms.size())
      throw InvariantError("matching produced more singletons than rooms");
    sol.occupants[solo_rooms[next_solo++]] = {graph.patients[v]};
  }

  sol.value = matching.cost;
  return sol;
}

namespace {

Score partition_value(const RmpSolution& sol, const ScoringFunction& scorer) {
  Score total = 0;
  for (const auto& occ : sol.occupants) total += score(scorer, occ);
  return total;
}

RmpSolution trivial_all_singles(const std::vector<const Patient*>& females,
                                const std::vector<const Patient*>& males,
                                const std::vector<Room>& rooms,
                                const ScoringFunction& scorer) {
  RmpSolution sol;
  sol.occupants.assign(rooms.size(), {});
  std::size_t next = 0;
  auto place = [&](const Patient* p) {
    if (next >= rooms.size())
      throw InfeasibleError("not enough single rooms for all patients");
    sol.occupants[next++] = {p};
  };
  for (const Patient* p : females) place(p);
  for (const Patient* p : males) place(p);
  sol.value = partition_value(sol, scorer);
  return sol;
}

}  // namespace

RmpSolution solve_rmp(const std::vector<const Patient*>& females,
                      const std::vector<const Patient*>& males,
                      const std::vector<Room>& rooms,
                      const ScoringFunction& scorer, TieBreak tie) {
  check_rooms(rooms);
  if (!counts_feasible(rooms, static_cast<int>(females.size()),
                       static_cast<int>(males.size())))
    throw InfeasibleError("no sex-separated packing exists for this period");
  if (doubles_count(rooms) == 0)
    return trivial_all_singles(females, males, rooms, scorer);

  RmpGraph graph = build_rmp_graph(females, males, rooms, scorer);
  PerfectMatchingResult matching =
      tie == TieBreak::Lexicographic
          ? min_weight_perfect_matching_lex(graph.num_vertices, graph.edges)
          : min_weight_perfect_matching(graph.num_vertices, graph.edges);
  if (!matching.perfect)
    throw InvariantError("feasible period produced no perfect matching");
  RmpSolution sol = decode_partition(matching, graph, rooms);
  sol.value = partition_value(sol, scorer);
  return sol;
}

Score rmp_value(const std::vector<const Patient*>& females,
                const std::vector<const Patient*>& males,
                const std::vector<Room>& rooms,
                const ScoringFunction& scorer) {
  check_rooms(rooms);
  if (females.empty() && males.empty()) return 0;
  if (!counts_feasible(rooms, static_cast<int>(females.size()),
                       static_cast<int>(males.size())))
    throw InfeasibleError("no sex-separated packing exists for this period");
  if (doubles_count(rooms) == 0) {
    Score total = 0;
    for (const Patient* p : females) total += score(scorer, {p});
    for (const Patient* p : males) total += score(scorer, {p});
    return total;
  }
  RmpGraph graph = build_rmp_graph(females, males, rooms, scorer);
  PerfectMatchingResult matching =
      min_weight_perfect_matching(graph.num_vertices, graph.edges);
  if (!matching.perfect)
    throw InvariantError("feasible period produced no perfect matching");
  return matching.cost;
}

namespace {

Score period_value(const std::vector<Room>& rooms,
                   const std::vector<Patient>& patients,
                   const ScoringFunction& scorer, int t) {
  std::vector<const Patient*> females, males;
  for (const Patient& p : patients) {
    if (!p.present(t)) continue;
    (p.sex == Sex::F ? females : males).push_back(&p);
  }
  return rmp_value(females, males, rooms, scorer);
}

}  // namespace

WminResult wmin_range_serial(const std::vector<Room>& rooms,
                             const std::vector<Patient>& patients,
                             const ScoringFunction& scorer, int t_begin,
                             int t_end) {
  WminResult result;
  result.t_begin = t_begin;
  for (int t = t_begin; t <= t_end; ++t) {
    Score v;
    try {
      v = period_value(rooms, patients, scorer, t);
    } catch (const InfeasibleError& e) {
      throw InfeasibleError(
          "period " + std::to_string(t) + " infeasible: " + e.what(), t);
    }
    result.per_period.push_back(v);
    result.total += v;
  }
  return result;
}

WminResult wmin_range(const std::vector<Room>& rooms,
                      const std::vector<Patient>& patients,
                      const ScoringFunction& scorer, int t_begin, int t_end) {
#ifdef _OPENMP
  const int count = t_end - t_begin + 1;
  if (count <= 0) {
    WminResult r;
    r.t_begin = t_begin;
    return r;
  }
  WminResult result;
  result.t_begin = t_begin;
  result.per_period.assign(count, 0);
  int infeasible_at = -1;
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < count; ++i) {
    try {
      result.per_period[i] = period_value(rooms, patients, scorer, t_begin + i);
    } catch (const InfeasibleError&) {
#pragma omp critical
      {
        if (infeasible_at < 0 || t_begin + i < infeasible_at)
          infeasible_at = t_begin + i;
      }
    }
  }
  if (infeasible_at >= 0)
    throw InfeasibleError(
        "period " + std::to_string(infeasible_at) + " infeasible",
        infeasible_at);
  for (Score v : result.per_period) result.total += v;
  return result;
#else
  return wmin_range_serial(rooms, patients, scorer, t_begin, t_end);
#endif
}

WminResult wmin(const Instance& inst, const ScoringFunction& scorer) {
  return wmin_range(inst.rooms(), inst.patients(), scorer, 1, inst.horizon());
}

std::string dump_graph(const RmpGraph& graph) {
  std::ostringstream out;
  out << graph.num_vertices << " " << graph.edges.size() << "\n";
  for (const WeightedEdge& e : graph.edges)
    out << e.u << " " << e.v << " " << e.weight << "\n";
  return out.str();
}

}  // namespace pra
