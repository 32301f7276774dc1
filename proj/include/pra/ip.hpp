#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pra/core.hpp"
#include "pra/scoring.hpp"

namespace pra {

/// Q/R/S are time-indexed (x_prt, transfers allowed and counted); T/U/V and
/// the same-day-transfer variants T*/U* are stay-indexed (one x_pr per stay).
enum class IpVariant { Q, R, S, T, U, V, Tstar, Ustar };

bool is_stay_indexed(IpVariant v);
std::string variant_name(IpVariant v);
IpVariant variant_from_name(const std::string& name);

struct IpVar {
  enum class Family { X, Y, G, S, D };
  Family family;
  int p = -1, q = -1, r = -1, t = -1;
  std::string name;
};

struct LinTerm {
  int var;
  std::int64_t coef;
};

enum class Rel { Le, Ge, Eq };

struct LinConstraint {
  std::string name;
  std::vector<LinTerm> terms;
  Rel rel = Rel::Le;
  std::int64_t rhs = 0;
};

enum class Sense { Min, Max };

struct IpObjective {
  Sense sense = Sense::Min;
  std::string label;  // f_trans / f_priv / f_pref / keep / zero
  std::vector<LinTerm> terms;
  std::int64_t constant = 0;
};

/// Common stay length of two patients; positive iff the stays intersect.
struct StayOverlap {
  int los = 0;
  bool potential_roommates = false;  // same sex and los > 0
};
StayOverlap stay_overlap(const Patient& p, const Patient& q);

/// Per-period fixing values: s^max pins f_priv to its optimum, w^min caps the
/// per-period roommate score. Keyed by absolute period index.
struct ModelFixings {
  std::optional<std::map<int, Score>> smax;
  std::optional<std::map<int, Score>> wmin;
};

struct ModelOptions {
  int window_start = 1;
  /// Room each patient occupied just before the window; variant Q counts a
  /// transfer when the first in-window room differs (dynamic replanning).
  std::vector<std::pair<std::string, std::string>> virtual_prev;
  /// When false, the generic variable/constraint rows are skipped and only
  /// the structured solver view is built (the dynamic loop's hot path).
  bool with_lp_rows = true;
};

/// Structured view the exact solver works on; kept alongside the generic
/// variable/constraint lists so solutions can be cross-checked against the
/// printed model verbatim.
struct ModelPatient {
  int inst_index;
  std::string id;
  Sex sex;
  bool requester;
  int arr, dis;  // clamped to the window
};

struct ModelPair {
  int i, j;  // model patient indices, i < j
  Score w;
  int los;
  int ov_begin, ov_end;  // overlap [ov_begin, ov_end)
  int y_var = -1;
};

struct IpModel {
  IpVariant variant = IpVariant::Q;
  bool stay_indexed = false;
  int window_start = 1;
  int horizon = 0;

  std::vector<IpVar> vars;
  std::vector<LinConstraint> constraints;
  std::vector<IpObjective> objectives;  // priority order

  std::vector<ModelPatient> patients;
  std::vector<Room> rooms;
  std::vector<ModelPair> pairs;
  std::vector<std::pair<int, int>> prefix;        // (patient, room)
  std::vector<std::pair<int, int>> virtual_prev;  // (patient, room)
  std::map<int, Score> smax;
  std::map<int, Score> wmin;

  // x-variable lookup: time-indexed by (p, r, t), stay-indexed by (p, r).
  std::map<std::tuple<int, int, int>, int> x_time;
  std::map<std::pair<int, int>, int> x_stay;

  int var_count(IpVar::Family f) const;
};

IpModel build_model(IpVariant variant, const Instance& inst,
                    const ScoringFunction& scorer, const ModelFixings& fixings,
                    const ModelOptions& options = {});

std::int64_t eval_terms(const std::vector<LinTerm>& terms,
                        const std::vector<std::int64_t>& values);
bool satisfies(const LinConstraint& c, const std::vector<std::int64_t>& values);

/// CPLEX-style LP text: Minimize/Maximize (first-priority objective, full
/// priority list as a leading comment), Subject To, Bounds, Binaries, End.
std::string export_lp(const IpModel& model);

}  // namespace pra
