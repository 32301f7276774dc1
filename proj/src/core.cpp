#include "pra/core.hpp"

#include <algorithm>
#include <set>

#include "pra/scoring.hpp"

namespace pra {

Instance::Instance(int horizon, std::vector<Room> rooms,
                   std::vector<Patient> patients,
                   std::vector<std::pair<std::string, std::string>> preassigned)
    : horizon_(horizon),
      rooms_(std::move(rooms)),
      patients_(std::move(patients)),
      preassigned_(std::move(preassigned)) {
  if (horizon_ < 0) throw DataError("horizon must be nonnegative");
  for (std::size_t i = 0; i < rooms_.size(); ++i) {
    const Room& r = rooms_[i];
    if (r.capacity < 1)
      throw DataError("room '" + r.id + "': capacity must be >= 1");
    if (!room_by_id_.emplace(r.id, static_cast<int>(i)).second)
      throw DataError("duplicate room id '" + r.id + "'");
  }
  for (std::size_t i = 0; i < patients_.size(); ++i) {
    const Patient& p = patients_[i];
    if (!patient_by_id_.emplace(p.id, static_cast<int>(i)).second)
      throw DataError("duplicate patient id '" + p.id + "'");
    if (p.arrival < 1 || p.arrival > horizon_)
      throw DataError("patient '" + p.id + "': arrival out of range");
    // A stay covering the final period is encoded discharge = horizon + 1;
    // occupied periods always lie inside [1, horizon].
    if (p.discharge < p.arrival || p.discharge > horizon_ + 1)
      throw DataError("patient '" + p.id + "': discharge out of range");
    if (p.age < 0) throw DataError("patient '" + p.id + "': negative age");
    if (p.registration < 1 || p.registration > p.arrival)
      throw DataError("patient '" + p.id +
                      "': registration must lie in [1, arrival]");
  }
  // Preassigned patients must already be in hospital at the first planning
  // period; window views rebase that period, so only id validity lives here
  // and the arrival rule is enforced at the file boundary.
  for (const auto& [pid, rid] : preassigned_) {
    if (patient_by_id_.find(pid) == patient_by_id_.end())
      throw DataError("preassignment references unknown patient '" + pid + "'");
    if (room_by_id_.find(rid) == room_by_id_.end())
      throw DataError("preassignment references unknown room '" + rid + "'");
  }
}

int Instance::patient_index(const std::string& id) const {
  auto it = patient_by_id_.find(id);
  return it == patient_by_id_.end() ? -1 : it->second;
}

int Instance::room_index(const std::string& id) const {
  auto it = room_by_id_.find(id);
  return it == room_by_id_.end() ? -1 : it->second;
}

int Instance::bed_count() const {
  int beds = 0;
  for (const Room& r : rooms_) beds += r.capacity;
  return beds;
}

int Instance::room_count_with_capacity(int c) const {
  int n = 0;
  for (const Room& r : rooms_)
    if (r.capacity == c) ++n;
  return n;
}

void Instance::check_period(int t) const {
  if (t < 1 || t > horizon_)
    throw RangeError("period " + std::to_string(t) + " outside [1, " +
                     std::to_string(horizon_) + "]");
}

std::vector<int> Instance::present_indices(int t) const {
  check_period(t);
  std::vector<int> out;
  for (std::size_t i = 0; i < patients_.size(); ++i)
    if (patients_[i].present(t)) out.push_back(static_cast<int>(i));
  return out;
}

std::vector<std::string> Instance::patients_present(int t) const {
  std::vector<std::string> out;
  for (int i : present_indices(t)) out.push_back(patients_[i].id);
  return out;
}

std::vector<std::string> Instance::females_present(int t) const {
  std::vector<std::string> out;
  for (int i : present_indices(t))
    if (patients_[i].sex == Sex::F) out.push_back(patients_[i].id);
  return out;
}

std::vector<std::string> Instance::males_present(int t) const {
  std::vector<std::string> out;
  for (int i : present_indices(t))
    if (patients_[i].sex == Sex::M) out.push_back(patients_[i].id);
  return out;
}

std::vector<std::string> Instance::requesters_present(int t) const {
  std::vector<std::string> out;
  for (int i : present_indices(t))
    if (patients_[i].single_request) out.push_back(patients_[i].id);
  return out;
}

void Assignment::set(const std::string& patient, int period,
                     const std::string& room) {
  by_patient_[patient][period] = room;
}

const std::string* Assignment::room_at(const std::string& patient,
                                       int period) const {
  auto pit = by_patient_.find(patient);
  if (pit == by_patient_.end()) return nullptr;
  auto tit = pit->second.find(period);
  if (tit == pit->second.end()) return nullptr;
  return &tit->second;
}

std::size_t Assignment::size() const {
  std::size_t n = 0;
  for (const auto& [p, rows] : by_patient_) n += rows.size();
  return n;
}

std::int64_t evaluate_transfers(const Assignment& z, const Instance& inst) {
  std::int64_t transfers = 0;
  for (const Patient& p : inst.patients()) {
    const std::string* prev = nullptr;
    for (int t = p.arrival; t < p.discharge; ++t) {
      const std::string* room = z.room_at(p.id, t);
      if (room == nullptr)
        throw IncompleteAssignmentError("patient '" + p.id +
                                        "' has no room in period " +
                                        std::to_string(t));
      if (prev != nullptr && *room != *prev) ++transfers;
      prev = room;
    }
  }
  return transfers;
}

namespace {

// Occupant patient indices per room for one period.
std::vector<std::vector<int>> occupants_by_room(const Assignment& z,
                                                const Instance& inst, int t) {
  std::vector<std::vector<int>> occ(inst.rooms().size());
  const auto& patients = inst.patients();
  for (std::size_t i = 0; i < patients.size(); ++i) {
    if (!patients[i].present(t)) continue;
    const std::string* room = z.room_at(patients[i].id, t);
    if (room == nullptr)
      throw IncompleteAssignmentError("patient '" + patients[i].id +
                                      "' has no room in period " +
                                      std::to_string(t));
    int r = inst.room_index(*room);
    if (r < 0)
      throw DataError("assignment references unknown room '" + *room + "'");
    occ[r].push_back(static_cast<int>(i));
  }
  return occ;
}

}  // namespace

Score evaluate_roommate_fit(const Assignment& z, const Instance& inst,
                            const ScoringFunction& scorer) {
  Score total = 0;
  std::vector<const Patient*> subset;
  for (int t = 1; t <= inst.horizon(); ++t) {
    auto occ = occupants_by_room(z, inst, t);
    for (std::size_t r = 0; r < occ.size(); ++r) {
      if (static_cast<int>(occ[r].size()) > inst.rooms()[r].capacity)
        throw InfeasibleError("room '" + inst.rooms()[r].id +
                                  "' over capacity in period " +
                                  std::to_string(t),
                              t);
      subset.clear();
      for (int i : occ[r]) subset.push_back(&inst.patients()[i]);
      total += score(scorer, subset);
    }
  }
  return total;
}

std::int64_t evaluate_singles(const Assignment& z, const Instance& inst) {
  std::int64_t fulfilled = 0;
  for (int t = 1; t <= inst.horizon(); ++t) {
    auto occ = occupants_by_room(z, inst, t);
    for (const auto& room : occ)
      if (room.size() == 1 && inst.patients()[room[0]].single_request)
        ++fulfilled;
  }
  return fulfilled;
}

std::vector<Violation> check_assignment(const Assignment& z,
                                        const Instance& inst) {
  std::vector<Violation> out;
  for (const Patient& p : inst.patients()) {
    for (int t = p.arrival; t < p.discharge; ++t) {
      const std::string* room = z.room_at(p.id, t);
      if (room == nullptr || inst.room_index(*room) < 0)
        out.push_back({Violation::Kind::Missing, p.id, "", t,
                       "patient '" + p.id + "' has no valid room in period " +
                           std::to_string(t)});
    }
  }
  if (!out.empty()) return out;  // counts below need totality

  for (int t = 1; t <= inst.horizon(); ++t) {
    auto occ = occupants_by_room(z, inst, t);
    for (std::size_t r = 0; r < occ.size(); ++r) {
      const Room& room = inst.rooms()[r];
      if (static_cast<int>(occ[r].size()) > room.capacity)
        out.push_back({Violation::Kind::Capacity, "", room.id, t,
                       "room '" + room.id + "' holds " +
                           std::to_string(occ[r].size()) + " > " +
                           std::to_string(room.capacity) + " in period " +
                           std::to_string(t)});
      bool has_f = false, has_m = false;
      for (int i : occ[r])
        (inst.patients()[i].sex == Sex::F ? has_f : has_m) = true;
      if (has_f && has_m)
        out.push_back({Violation::Kind::SexMix, "", room.id, t,
                       "room '" + room.id + "' hosts both sexes in period " +
                           std::to_string(t)});
    }
  }
  return out;
}

bool counts_feasible(const std::vector<Room>& rooms, int females, int males) {
  int total = 0;
  for (const Room& r : rooms) total += r.capacity;
  if (females + males > total) return false;
  // Reachable capacity sums of room subsets; the female-labelled subset must
  // cover `females` while its complement covers `males`.
  std::vector<bool> reach(static_cast<std::size_t>(total) + 1, false);
  reach[0] = true;
  for (const Room& r : rooms)
    for (int s = total; s >= r.capacity; --s)
      if (reach[s - r.capacity]) reach[s] = true;
  for (int s = females; s <= total - males; ++s)
    if (reach[s]) return true;
  return false;
}

bool check_period_feasibility(const Instance& inst, int t) {
  inst.check_period(t);
  int females = 0, males = 0;
  for (const Patient& p : inst.patients())
    if (p.present(t)) (p.sex == Sex::F ? females : males)++;
  return counts_feasible(inst.rooms(), females, males);
}

}  // namespace pra
