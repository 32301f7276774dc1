#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace pra {

/// Scores and objective values are kept as exact 64-bit integers; scorers
/// that are conceptually rational (weighted age difference) declare a
/// fixed-point scale and round once, so all downstream arithmetic is exact.
using Score = std::int64_t;

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class DataError : public Error {
public:
  using Error::Error;
};

class RangeError : public Error {
public:
  using Error::Error;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

class UnsupportedCapacityError : public Error {
public:
  using Error::Error;
};

class IncompleteAssignmentError : public Error {
public:
  using Error::Error;
};

class InvariantError : public Error {
public:
  using Error::Error;
};

class InfeasibleError : public Error {
public:
  explicit InfeasibleError(const std::string& what, int period = -1)
      : Error(what), period_(period) {}
  int period() const { return period_; }

private:
  int period_;
};

enum class Sex { F, M };

struct Patient {
  std::string id;
  Sex sex = Sex::F;
  int arrival = 1;     // first occupied period
  int discharge = 1;   // first period with no bed needed; may be horizon+1
  int age = 0;
  bool single_request = false;
  int registration = 1;  // period the stay becomes known; <= arrival

  /// Occupied periods are [arrival, discharge).
  bool present(int t) const { return arrival <= t && t < discharge; }
  int stay_length() const { return discharge - arrival; }
};

struct Room {
  std::string id;
  int capacity = 1;
};

/// A static planning problem: rooms, patients, and (for instances that start
/// with an occupied ward) the room each already-arrived patient sits in.
class Instance {
public:
  Instance() = default;
  Instance(int horizon, std::vector<Room> rooms, std::vector<Patient> patients,
           std::vector<std::pair<std::string, std::string>> preassigned = {});

  int horizon() const { return horizon_; }
  const std::vector<Room>& rooms() const { return rooms_; }
  const std::vector<Patient>& patients() const { return patients_; }
  const std::vector<std::pair<std::string, std::string>>& preassigned() const {
    return preassigned_;
  }

  int patient_index(const std::string& id) const;  // -1 when unknown
  int room_index(const std::string& id) const;

  int bed_count() const;
  int room_count_with_capacity(int c) const;

  /// Indices of patients needing a bed in period t, in input order.
  std::vector<int> present_indices(int t) const;
  std::vector<std::string> patients_present(int t) const;
  std::vector<std::string> females_present(int t) const;
  std::vector<std::string> males_present(int t) const;
  std::vector<std::string> requesters_present(int t) const;

  void check_period(int t) const;

private:
  int horizon_ = 0;
  std::vector<Room> rooms_;
  std::vector<Patient> patients_;
  std::vector<std::pair<std::string, std::string>> preassigned_;
  std::unordered_map<std::string, int> patient_by_id_;
  std::unordered_map<std::string, int> room_by_id_;
};

/// Room-per-patient-per-period map; the domain must end up being exactly
/// every (p, t) with t in the patient's stay.
class Assignment {
public:
  void set(const std::string& patient, int period, const std::string& room);
  const std::string* room_at(const std::string& patient, int period) const;

  const std::map<std::string, std::map<int, std::string>>& entries() const {
    return by_patient_;
  }
  std::size_t size() const;

private:
  std::map<std::string, std::map<int, std::string>> by_patient_;
};

struct ObjectiveValues {
  std::int64_t transfers = 0;
  Score roommate_fit = 0;
  std::int64_t singles_fulfilled = 0;
};

struct Violation {
  enum class Kind { Missing, Capacity, SexMix };
  Kind kind;
  std::string patient;  // offending patient (Missing) or empty
  std::string room;     // offending room (Capacity/SexMix) or empty
  int period = 0;
  std::string message;
};

struct ScoringFunction;  // scoring.hpp

std::int64_t evaluate_transfers(const Assignment& z, const Instance& inst);
Score evaluate_roommate_fit(const Assignment& z, const Instance& inst,
                            const ScoringFunction& scorer);
std::int64_t evaluate_singles(const Assignment& z, const Instance& inst);
std::vector<Violation> check_assignment(const Assignment& z, const Instance& inst);

/// True iff the patients present in period t can be packed into the rooms
/// with single-sex rooms and capacities respected. Decided exactly via a
/// subset-sum reachability over room capacities.
bool check_period_feasibility(const Instance& inst, int t);

/// Same check over an arbitrary patient set (used by the dynamic planner's
/// registered views). Counts are the number of females/males needing a bed.
bool counts_feasible(const std::vector<Room>& rooms, int females, int males);

}  // namespace pra
