#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pra/core.hpp"
#include "pra/dynamic.hpp"
#include "pra/ip_solve.hpp"

namespace pra {

/// JSON instance files: {"horizon", "rooms": [{"id","capacity"}],
/// "patients": [{"id","sex","arrival","discharge","age","single_request"?,
/// "registration"?}], "preassigned": [{"patient","room"}]}.
/// Schema violations raise DataError with a JSON-pointer path.
Instance parse_instance(const std::string& text);
std::string write_instance(const Instance& inst);

Instance load_instance(const std::string& path);
void save_text(const std::string& path, const std::string& text);

struct GeneratorParams {
  int rooms = 20;
  double double_fraction = 0.8;
  int horizon = 365;
  double occupancy = 0.85;   // target mean bed occupancy
  double los_mean = 5.0;     // geometric length of stay
  int age_min = 18;
  int age_max = 95;
  double single_request_prob = 0.2;
  double female_ratio = 0.5;
  int max_lead = 7;          // registration lead time, uniform {0..max_lead}
  std::uint64_t seed = 1;

  void validate() const;
};

/// Deterministic synthetic ward: admissions top up each day towards the
/// occupancy target and every admission keeps all of its periods packable.
Instance generate_instance(const GeneratorParams& params);

struct SolutionFile {
  std::string mode;    // "static" or "dynamic"
  std::string ip;      // variant (static) or first IP (dynamic)
  std::string scorer;  // scorer spec string
  std::string status;  // optimal | infeasible | time-limit | completed | failed
  Assignment assignment;
  ObjectiveValues objectives;
  std::vector<Score> stage_values;
  Score wmin_total = -1;  // -1 when not computed
  std::vector<IterationRecord> trajectory;  // dynamic runs
  IpVariant first_ip = IpVariant::U;        // names trajectory stages
};

std::string write_solution(const SolutionFile& sol);
SolutionFile parse_solution(const std::string& text);

}  // namespace pra
