#include "pra/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include <json.hpp>

namespace pra {

namespace {

using ordered_json = nlohmann::ordered_json;
using json = nlohmann::json;

std::string ptr(const std::string& base, std::size_t i,
                const std::string& field) {
  return base + "/" + std::to_string(i) + "/" + field;
}

std::int64_t get_int(const json& j, const std::string& path) {
  if (!j.is_number_integer())
    throw DataError(path + ": expected an integer");
  return j.get<std::int64_t>();
}

std::string get_str(const json& j, const std::string& path) {
  if (!j.is_string()) throw DataError(path + ": expected a string");
  return j.get<std::string>();
}

json field(const json& j, const char* key) {
  return j.contains(key) ? j.at(key) : json();
}

}  // namespace

Instance parse_instance(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("instance is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw DataError("/: expected an object");
  if (!j.contains("horizon")) throw DataError("/horizon: missing");
  int horizon = static_cast<int>(get_int(j["horizon"], "/horizon"));

  std::vector<Room> rooms;
  if (!j.contains("rooms") || !j["rooms"].is_array())
    throw DataError("/rooms: expected an array");
  for (std::size_t i = 0; i < j["rooms"].size(); ++i) {
    const json& jr = j["rooms"][i];
    Room r;
    r.id = get_str(field(jr, "id"), ptr("/rooms", i, "id"));
    r.capacity =
        static_cast<int>(get_int(field(jr, "capacity"),
                                 ptr("/rooms", i, "capacity")));
    rooms.push_back(std::move(r));
  }

  std::vector<Patient> patients;
  if (!j.contains("patients") || !j["patients"].is_array())
    throw DataError("/patients: expected an array");
  for (std::size_t i = 0; i < j["patients"].size(); ++i) {
    const json& jp = j["patients"][i];
    Patient p;
    p.id = get_str(field(jp, "id"), ptr("/patients", i, "id"));
    std::string sex = get_str(field(jp, "sex"), ptr("/patients", i, "sex"));
    if (sex == "F")
      p.sex = Sex::F;
    else if (sex == "M")
      p.sex = Sex::M;
    else
      throw DataError(ptr("/patients", i, "sex") + ": must be \"F\" or \"M\"");
    p.arrival = static_cast<int>(
        get_int(field(jp, "arrival"), ptr("/patients", i, "arrival")));
    p.discharge = static_cast<int>(get_int(field(jp, "discharge"),
                                           ptr("/patients", i, "discharge")));
    p.age = static_cast<int>(
        get_int(field(jp, "age"), ptr("/patients", i, "age")));
    if (jp.contains("single_request")) {
      if (!jp["single_request"].is_boolean())
        throw DataError(ptr("/patients", i, "single_request") +
                        ": expected a boolean");
      p.single_request = jp["single_request"].get<bool>();
    }
    p.registration =
        jp.contains("registration")
            ? static_cast<int>(get_int(jp["registration"],
                                       ptr("/patients", i, "registration")))
            : p.arrival;
    patients.push_back(std::move(p));
  }

  std::vector<std::pair<std::string, std::string>> preassigned;
  if (j.contains("preassigned")) {
    if (!j["preassigned"].is_array())
      throw DataError("/preassigned: expected an array");
    for (std::size_t i = 0; i < j["preassigned"].size(); ++i) {
      const json& ja = j["preassigned"][i];
      preassigned.emplace_back(
          get_str(field(ja, "patient"), ptr("/preassigned", i, "patient")),
          get_str(field(ja, "room"), ptr("/preassigned", i, "room")));
    }
  }

  Instance inst(horizon, std::move(rooms), std::move(patients),
                std::move(preassigned));
  for (const auto& [pid, rid] : inst.preassigned()) {
    int p = inst.patient_index(pid);
    if (inst.patients()[p].arrival != 1)
      throw DataError("/preassigned: patient '" + pid +
                      "' has not arrived at the first planning period");
  }
  return inst;
}

std::string write_instance(const Instance& inst) {
  ordered_json j;
  j["horizon"] = inst.horizon();
  j["rooms"] = ordered_json::array();
  for (const Room& r : inst.rooms())
    j["rooms"].push_back({{"id", r.id}, {"capacity", r.capacity}});
  j["patients"] = ordered_json::array();
  for (const Patient& p : inst.patients()) {
    ordered_json jp;
    jp["id"] = p.id;
    jp["sex"] = p.sex == Sex::F ? "F" : "M";
    jp["arrival"] = p.arrival;
    jp["discharge"] = p.discharge;
    jp["age"] = p.age;
    jp["single_request"] = p.single_request;
    jp["registration"] = p.registration;
    j["patients"].push_back(std::move(jp));
  }
  j["preassigned"] = ordered_json::array();
  for (const auto& [pid, rid] : inst.preassigned())
    j["preassigned"].push_back({{"patient", pid}, {"room", rid}});
  return j.dump(2) + "\n";
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open instance file '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return parse_instance(text);
}

void save_text(const std::string& path, const std::string& text) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw DataError("cannot write file '" + path + "'");
    out << text;
  }
  std::rename(tmp.c_str(), path.c_str());
}

void GeneratorParams::validate() const {
  if (rooms < 1) throw ConfigError("generator: rooms must be >= 1");
  if (double_fraction < 0 || double_fraction > 1)
    throw ConfigError("generator: double fraction must lie in [0, 1]");
  if (horizon < 2) throw ConfigError("generator: horizon must be >= 2");
  if (occupancy <= 0 || occupancy > 1)
    throw ConfigError("generator: occupancy must lie in (0, 1]");
  if (los_mean < 1) throw ConfigError("generator: mean stay must be >= 1");
  if (age_min < 0 || age_max < age_min)
    throw ConfigError("generator: bad age range");
  if (single_request_prob < 0 || single_request_prob > 1 ||
      female_ratio < 0 || female_ratio > 1)
    throw ConfigError("generator: probabilities must lie in [0, 1]");
  if (max_lead < 0) throw ConfigError("generator: lead time must be >= 0");
}

namespace {

class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double unit() {  // [0, 1), 53 bits
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }
  int uniform(int lo, int hi) {  // inclusive
    return lo + static_cast<int>(engine_() %
                                 static_cast<std::uint64_t>(hi - lo + 1));
  }
  bool chance(double p) { return unit() < p; }

private:
  std::mt19937_64 engine_;
};

}  // namespace

Instance generate_instance(const GeneratorParams& params) {
  params.validate();
  Rng rng(params.seed);

  std::vector<Room> rooms;
  int doubles =
      static_cast<int>(std::llround(params.double_fraction * params.rooms));
  for (int r = 0; r < params.rooms; ++r)
    rooms.push_back({"r" + std::to_string(r + 1), r < doubles ? 2 : 1});
  int beds = 0;
  for (const Room& r : rooms) beds += r.capacity;

  const int target =
      std::max(0, static_cast<int>(std::llround(params.occupancy * beds)));
  const double p_stop = 1.0 / params.los_mean;

  std::vector<Patient> patients;
  std::vector<int> females(params.horizon + 2, 0), males(params.horizon + 2, 0);
  auto occupancy_at = [&](int t) { return females[t] + males[t]; };

  int next_id = 1;
  for (int day = 1; day < params.horizon; ++day) {
    while (occupancy_at(day) < target) {
      Sex sex = rng.chance(params.female_ratio) ? Sex::F : Sex::M;
      int age = rng.uniform(params.age_min, params.age_max);
      int los = 1;
      while (los < params.horizon && !rng.chance(p_stop)) ++los;
      int discharge = std::min(day + los, params.horizon + 1);
      bool request = rng.chance(params.single_request_prob);
      int lead = params.max_lead > 0 ? rng.uniform(0, params.max_lead) : 0;

      auto fits = [&](Sex s) {
        for (int t = day; t < discharge; ++t) {
          int f = females[t] + (s == Sex::F ? 1 : 0);
          int m = males[t] + (s == Sex::M ? 1 : 0);
          if (!counts_feasible(rooms, f, m)) return false;
        }
        return true;
      };
      if (!fits(sex)) {
        Sex flipped = sex == Sex::F ? Sex::M : Sex::F;
        if (!fits(flipped)) break;  // this day cannot be topped up further
        sex = flipped;
      }

      Patient p;
      p.id = "p" + std::to_string(next_id++);
      p.sex = sex;
      p.arrival = day;
      p.discharge = discharge;
      p.age = age;
      p.single_request = request;
      p.registration = std::max(1, day - lead);
      for (int t = day; t < discharge; ++t)
        (sex == Sex::F ? females : males)[t]++;
      patients.push_back(std::move(p));
    }
  }

  return Instance(params.horizon, std::move(rooms), std::move(patients));
}

std::string write_solution(const SolutionFile& sol) {
  ordered_json j;
  j["mode"] = sol.mode;
  j["ip"] = sol.ip;
  j["scorer"] = sol.scorer;
  j["status"] = sol.status;
  j["objectives"] = {{"transfers", sol.objectives.transfers},
                     {"roommate_fit", sol.objectives.roommate_fit},
                     {"singles_fulfilled", sol.objectives.singles_fulfilled}};
  j["stage_values"] = sol.stage_values;
  if (sol.wmin_total >= 0) j["wmin_total"] = sol.wmin_total;
  ordered_json ja = ordered_json::object();
  for (const auto& [pid, rows] : sol.assignment.entries()) {
    ordered_json jr = ordered_json::object();
    for (const auto& [t, room] : rows) jr[std::to_string(t)] = room;
    ja[pid] = std::move(jr);
  }
  j["assignment"] = std::move(ja);
  if (sol.mode == "dynamic") {
    ordered_json jt = ordered_json::array();
    for (const IterationRecord& rec : sol.trajectory) {
      ordered_json r;
      r["t"] = rec.t;
      r["stage"] = stage_name(rec.stage, sol.first_ip);
      r["success"] = rec.success;
      r["time_limited"] = rec.time_limited;
      r["wall_ms"] = rec.wall_ms;
      r["solver_ms"] = rec.solver_ms;
      ordered_json snap = ordered_json::object();
      for (const auto& [label, value] : rec.objective_snapshot)
        snap[label] = value;
      r["objectives"] = std::move(snap);
      jt.push_back(std::move(r));
    }
    j["trajectory"] = std::move(jt);
  }
  return j.dump(2) + "\n";
}

SolutionFile parse_solution(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("solution is not valid JSON: ") + e.what());
  }
  SolutionFile sol;
  sol.mode = j.value("mode", "static");
  sol.ip = j.value("ip", "");
  sol.scorer = j.value("scorer", "zero");
  sol.status = j.value("status", "");
  if (j.contains("objectives")) {
    sol.objectives.transfers = j["objectives"].value("transfers", 0);
    sol.objectives.roommate_fit = j["objectives"].value("roommate_fit", 0);
    sol.objectives.singles_fulfilled =
        j["objectives"].value("singles_fulfilled", 0);
  }
  if (j.contains("stage_values"))
    for (const auto& v : j["stage_values"])
      sol.stage_values.push_back(v.get<Score>());
  sol.wmin_total = j.value("wmin_total", static_cast<Score>(-1));
  if (j.contains("assignment"))
    for (const auto& [pid, rows] : j["assignment"].items())
      for (const auto& [t, room] : rows.items())
        sol.assignment.set(pid, std::stoi(t), room.get<std::string>());
  return sol;
}

}  // namespace pra
