#pragma once

#include <random>
#include <string>
#include <vector>

#include "pra/core.hpp"
#include "pra/scoring.hpp"

namespace pra::test {

inline Patient pat(std::string id, Sex sex, int arrival, int discharge,
                   int age, bool request = false, int registration = -1) {
  Patient p;
  p.id = std::move(id);
  p.sex = sex;
  p.arrival = arrival;
  p.discharge = discharge;
  p.age = age;
  p.single_request = request;
  p.registration = registration < 0 ? arrival : registration;
  return p;
}

inline std::vector<Room> rooms_spec(int doubles, int singles) {
  std::vector<Room> rooms;
  for (int i = 0; i < doubles; ++i)
    rooms.push_back({"d" + std::to_string(i + 1), 2});
  for (int i = 0; i < singles; ++i)
    rooms.push_back({"s" + std::to_string(i + 1), 1});
  return rooms;
}

/// The seven core scorers exercised by the randomized suites.
inline std::vector<ScoringFunction> core_scorers() {
  return {
      ScoringFunction::parse("zero"),
      ScoringFunction::parse("abs-age"),
      ScoringFunction::parse("bounded-age:k=10"),
      ScoringFunction::parse("age-class-count:k=20"),
      ScoringFunction::parse("age-class-ind:k=20"),
      ScoringFunction::parse("weighted-age:eps=1,scale=100"),
      ScoringFunction::parse("prepost"),
  };
}

inline std::vector<ScoringFunction> all_scorers() {
  auto v = core_scorers();
  v.push_back(ScoringFunction::parse("similar-age:k=10,mode=diff"));
  v.push_back(ScoringFunction::parse("balanced-classes:k=25,x=1"));
  return v;
}

struct RandomWard {
  std::vector<Patient> females, males;
  std::vector<Room> rooms;

  std::vector<const Patient*> female_ptrs() const {
    std::vector<const Patient*> v;
    for (const Patient& p : females) v.push_back(&p);
    return v;
  }
  std::vector<const Patient*> male_ptrs() const {
    std::vector<const Patient*> v;
    for (const Patient& p : males) v.push_back(&p);
    return v;
  }
};

/// Feasible random single-period ward with capacities {1,2}.
inline RandomWard random_ward(std::mt19937_64& rng, int max_patients = 8,
                              int max_rooms = 5) {
  RandomWard ward;
  for (int tries = 0; tries < 1000; ++tries) {
    ward.rooms.clear();
    ward.females.clear();
    ward.males.clear();
    int rooms = 1 + static_cast<int>(rng() % max_rooms);
    int doubles = 0;
    for (int r = 0; r < rooms; ++r) {
      bool dbl = rng() % 100 < 60;
      doubles += dbl;
      ward.rooms.push_back({"r" + std::to_string(r + 1), dbl ? 2 : 1});
    }
    int beds = rooms + doubles;
    int patients = static_cast<int>(rng() % (std::min(max_patients, beds) + 1));
    int females = 0, males = 0;
    for (int i = 0; i < patients; ++i) {
      Sex sex = rng() % 2 == 0 ? Sex::F : Sex::M;
      Patient p = pat((sex == Sex::F ? "f" : "m") +
                          std::to_string(sex == Sex::F ? ++females : ++males),
                      sex, 1, 2 + static_cast<int>(rng() % 3),
                      20 + static_cast<int>(rng() % 60), rng() % 100 < 25);
      (sex == Sex::F ? ward.females : ward.males).push_back(std::move(p));
    }
    if (counts_feasible(ward.rooms, females, males)) return ward;
  }
  throw std::runtime_error("random_ward failed to produce a feasible ward");
}

/// Small random multi-period instance, feasible in every period.
inline Instance random_instance(std::mt19937_64& rng, int max_patients,
                                int max_rooms, int max_periods,
                                double request_prob = 0.25,
                                bool with_preassigned = false) {
  for (int tries = 0; tries < 2000; ++tries) {
    int horizon = 1 + static_cast<int>(rng() % max_periods);
    int room_count = 1 + static_cast<int>(rng() % max_rooms);
    std::vector<Room> rooms;
    for (int r = 0; r < room_count; ++r)
      rooms.push_back({"r" + std::to_string(r + 1),
                       rng() % 100 < 60 ? 2 : 1});
    int patients = static_cast<int>(rng() % (max_patients + 1));
    std::vector<Patient> ps;
    for (int i = 0; i < patients; ++i) {
      int arr = 1 + static_cast<int>(rng() % horizon);
      int len = 1 + static_cast<int>(rng() % horizon);
      int dis = std::min(arr + len, horizon + 1);
      Patient p = pat("p" + std::to_string(i + 1),
                      rng() % 2 == 0 ? Sex::F : Sex::M, arr, dis,
                      20 + static_cast<int>(rng() % 60),
                      rng() % 1000 < request_prob * 1000);
      ps.push_back(std::move(p));
    }
    Instance candidate(horizon, rooms, ps);
    bool ok = true;
    for (int t = 1; t <= horizon && ok; ++t)
      ok = check_period_feasibility(candidate, t);
    if (!ok) continue;

    if (!with_preassigned) return candidate;
    // preassign day-1 patients greedily to a feasible start
    std::vector<std::pair<std::string, std::string>> pre;
    std::vector<int> used(rooms.size(), 0);
    std::vector<int> sex_mark(rooms.size(), 0);  // 0 none, 1 F, 2 M
    bool pre_ok = true;
    for (const Patient& p : ps) {
      if (p.arrival != 1 || p.stay_length() == 0) continue;
      int mark = p.sex == Sex::F ? 1 : 2;
      bool placed = false;
      for (std::size_t r = 0; r < rooms.size() && !placed; ++r) {
        if (used[r] >= rooms[r].capacity) continue;
        if (sex_mark[r] != 0 && sex_mark[r] != mark) continue;
        used[r]++;
        sex_mark[r] = mark;
        pre.emplace_back(p.id, rooms[r].id);
        placed = true;
      }
      if (!placed) pre_ok = false;
    }
    if (!pre_ok) continue;
    return Instance(horizon, rooms, ps, pre);
  }
  throw std::runtime_error("random_instance failed to produce a feasible one");
}

}  // namespace pra::test
