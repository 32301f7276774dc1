#include "pra/ip.hpp"

#include <algorithm>
#include <sstream>

namespace pra {

bool is_stay_indexed(IpVariant v) {
  return v == IpVariant::T || v == IpVariant::U || v == IpVariant::V ||
         v == IpVariant::Tstar || v == IpVariant::Ustar;
}

std::string variant_name(IpVariant v) {
  switch (v) {
    case IpVariant::Q: return "Q";
    case IpVariant::R: return "R";
    case IpVariant::S: return "S";
    case IpVariant::T: return "T";
    case IpVariant::U: return "U";
    case IpVariant::V: return "V";
    case IpVariant::Tstar: return "T*";
    case IpVariant::Ustar: return "U*";
  }
  return "?";
}

IpVariant variant_from_name(const std::string& name) {
  if (name == "Q") return IpVariant::Q;
  if (name == "R") return IpVariant::R;
  if (name == "S") return IpVariant::S;
  if (name == "T") return IpVariant::T;
  if (name == "U") return IpVariant::U;
  if (name == "V") return IpVariant::V;
  if (name == "T*" || name == "Tstar") return IpVariant::Tstar;
  if (name == "U*" || name == "Ustar") return IpVariant::Ustar;
  throw ConfigError("unknown IP variant '" + name + "'");
}

StayOverlap stay_overlap(const Patient& p, const Patient& q) {
  StayOverlap o;
  o.los = std::min(p.discharge, q.discharge) - std::max(p.arrival, q.arrival);
  o.potential_roommates = p.sex == q.sex && o.los > 0;
  return o;
}

int IpModel::var_count(IpVar::Family f) const {
  int n = 0;
  for (const IpVar& v : vars)
    if (v.family == f) ++n;
  return n;
}

namespace {

std::string sanitize(const std::string& id) {
  std::string out;
  for (char c : id)
    out += (std::isalnum(static_cast<unsigned char>(c)) != 0) ? c : '_';
  return out.empty() ? std::string("_") : out;
}

struct Builder {
  IpModel m;
  const Instance& inst;
  const ScoringFunction& scorer;
  std::vector<std::string> pid, rid;  // sanitized ids per model patient/room

  Builder(IpVariant variant, const Instance& instance,
          const ScoringFunction& sc, const ModelOptions& options)
      : inst(instance), scorer(sc) {
    m.variant = variant;
    m.stay_indexed = is_stay_indexed(variant);
    m.window_start = options.window_start;
    m.horizon = inst.horizon();
    if (m.window_start < 1 || m.window_start > inst.horizon() + 1)
      throw ConfigError("window start outside the planning horizon");

    for (std::size_t i = 0; i < inst.patients().size(); ++i) {
      const Patient& p = inst.patients()[i];
      int arr = std::max(p.arrival, m.window_start);
      if (arr >= p.discharge) continue;  // no in-window stay
      m.patients.push_back({static_cast<int>(i), p.id, p.sex,
                            p.single_request, arr, p.discharge});
      pid.push_back(sanitize(p.id));
    }
    m.rooms = inst.rooms();
    for (const Room& r : m.rooms) rid.push_back(sanitize(r.id));

    for (std::size_t i = 0; i < m.patients.size(); ++i) {
      for (std::size_t j = i + 1; j < m.patients.size(); ++j) {
        const ModelPatient& a = m.patients[i];
        const ModelPatient& b = m.patients[j];
        if (a.sex != b.sex) continue;
        int ov_b = std::max(a.arr, b.arr), ov_e = std::min(a.dis, b.dis);
        if (ov_b >= ov_e) continue;
        ModelPair pr;
        pr.i = static_cast<int>(i);
        pr.j = static_cast<int>(j);
        pr.los = ov_e - ov_b;
        pr.ov_begin = ov_b;
        pr.ov_end = ov_e;
        pr.w = score_pair(scorer, inst.patients()[a.inst_index],
                          inst.patients()[b.inst_index]);
        if (pr.w < 0) throw DataError("scorer produced a negative pair weight");
        m.pairs.push_back(pr);
      }
    }

    bool uses_prefix = variant == IpVariant::T || variant == IpVariant::U ||
                       variant == IpVariant::V;
    bool keeps_objective =
        variant == IpVariant::Tstar || variant == IpVariant::Ustar;
    if (m.stay_indexed && (uses_prefix || keeps_objective)) {
      for (const auto& [p_id, r_id] : inst.preassigned()) {
        int mp = model_patient(p_id);
        if (mp < 0) continue;  // already discharged before the window
        int r = inst.room_index(r_id);
        m.prefix.emplace_back(mp, r);
      }
    }
    if (variant == IpVariant::Q) {
      for (const auto& [p_id, r_id] : options.virtual_prev) {
        int mp = model_patient(p_id);
        if (mp < 0) continue;
        int r = inst.room_index(r_id);
        if (r < 0) throw DataError("virtual previous room '" + r_id + "' unknown");
        m.virtual_prev.emplace_back(mp, r);
      }
    }
  }

  int model_patient(const std::string& id) const {
    for (std::size_t i = 0; i < m.patients.size(); ++i)
      if (m.patients[i].id == id) return static_cast<int>(i);
    return -1;
  }

  bool present(int mp, int t) const {
    return m.patients[mp].arr <= t && t < m.patients[mp].dis;
  }

  bool any_present(int t) const {
    for (const ModelPatient& p : m.patients)
      if (p.arr <= t && t < p.dis) return true;
    return false;
  }

  int add_var(IpVar v) {
    m.vars.push_back(std::move(v));
    return static_cast<int>(m.vars.size()) - 1;
  }

  std::string tsuf(int t) const { return "_t" + std::to_string(t); }

  // ---- variables ----

  std::map<std::tuple<int, int, int>, int> s_var;  // (p, r, t)
  std::map<std::tuple<int, int, int>, int> d_var;  // (p, r, t)
  std::map<std::pair<int, int>, int> g_var;        // (r, t)

  void declare_vars() {
    const int P = static_cast<int>(m.patients.size());
    const int R = static_cast<int>(m.rooms.size());
    for (int p = 0; p < P; ++p) {
      for (int r = 0; r < R; ++r) {
        if (m.stay_indexed) {
          int v = add_var({IpVar::Family::X, p, -1, r, -1,
                           "x_p" + pid[p] + "_r" + rid[r]});
          m.x_stay[{p, r}] = v;
        } else {
          for (int t = m.patients[p].arr; t < m.patients[p].dis; ++t) {
            int v = add_var({IpVar::Family::X, p, -1, r, t,
                             "x_p" + pid[p] + "_r" + rid[r] + tsuf(t)});
            m.x_time[{p, r, t}] = v;
          }
        }
      }
    }
    for (ModelPair& pr : m.pairs) {
      if (m.stay_indexed) {
        pr.y_var = add_var({IpVar::Family::Y, pr.i, pr.j, -1, -1,
                            "y_p" + pid[pr.i] + "_q" + pid[pr.j]});
      }
    }
    if (!m.stay_indexed) {
      // time-indexed y per shared period
      for (ModelPair& pr : m.pairs) {
        pr.y_var = -1;  // per-period vars tracked in y_time
        for (int t = pr.ov_begin; t < pr.ov_end; ++t) {
          int v = add_var({IpVar::Family::Y, pr.i, pr.j, -1, t,
                           "y_p" + pid[pr.i] + "_q" + pid[pr.j] + tsuf(t)});
          y_time[{pr.i, pr.j, t}] = v;
        }
      }
    }
    for (int r = 0; r < R; ++r)
      for (int t = m.window_start; t <= m.horizon; ++t)
        if (any_present(t))
          g_var[{r, t}] = add_var(
              {IpVar::Family::G, -1, -1, r, t, "g_r" + rid[r] + tsuf(t)});
    for (int p = 0; p < P; ++p) {
      if (!m.patients[p].requester) continue;
      for (int r = 0; r < R; ++r)
        for (int t = m.patients[p].arr; t < m.patients[p].dis; ++t)
          s_var[{p, r, t}] = add_var({IpVar::Family::S, p, -1, r, t,
                                      "s_p" + pid[p] + "_r" + rid[r] + tsuf(t)});
    }
    if (!m.stay_indexed) {
      for (int p = 0; p < P; ++p)
        for (int r = 0; r < R; ++r)
          for (int t = m.patients[p].arr; t + 1 < m.patients[p].dis; ++t)
            d_var[{p, r, t}] = add_var({IpVar::Family::D, p, -1, r, t,
                                        "d_p" + pid[p] + "_r" + rid[r] +
                                            tsuf(t)});
    }
  }

  std::map<std::tuple<int, int, int>, int> y_time;  // (i, j, t)

  int x_of(int p, int r, int t) const {
    return m.stay_indexed ? m.x_stay.at({p, r}) : m.x_time.at({p, r, t});
  }

  // ---- constraints ----

  void add(LinConstraint c) { m.constraints.push_back(std::move(c)); }

  void every_patient() {
    const int R = static_cast<int>(m.rooms.size());
    for (std::size_t p = 0; p < m.patients.size(); ++p) {
      if (m.stay_indexed) {
        LinConstraint c{"assign_p" + pid[p], {}, Rel::Eq, 1};
        for (int r = 0; r < R; ++r) c.terms.push_back({m.x_stay.at({(int)p, r}), 1});
        add(std::move(c));
      } else {
        for (int t = m.patients[p].arr; t < m.patients[p].dis; ++t) {
          LinConstraint c{"assign_p" + pid[p] + tsuf(t), {}, Rel::Eq, 1};
          for (int r = 0; r < R; ++r)
            c.terms.push_back({m.x_time.at({(int)p, r, t}), 1});
          add(std::move(c));
        }
      }
    }
  }

  void prefix_constraints() {
    for (const auto& [p, r] : m.prefix)
      add({"prefix_p" + pid[p], {{x_of(p, r, m.patients[p].arr), 1}}, Rel::Eq,
           1});
  }

  void combined_capacity() {
    const int R = static_cast<int>(m.rooms.size());
    for (int r = 0; r < R; ++r) {
      const std::int64_t cap = m.rooms[r].capacity;
      for (int t = m.window_start; t <= m.horizon; ++t) {
        if (!any_present(t)) continue;
        LinConstraint cf{"capf_r" + rid[r] + tsuf(t), {}, Rel::Le, 0};
        LinConstraint cm{"capm_r" + rid[r] + tsuf(t), {}, Rel::Le, cap};
        for (std::size_t p = 0; p < m.patients.size(); ++p) {
          if (!present(static_cast<int>(p), t)) continue;
          auto& c = m.patients[p].sex == Sex::F ? cf : cm;
          c.terms.push_back({x_of(static_cast<int>(p), r, t), 1});
          if (m.patients[p].requester && cap > 1)
            c.terms.push_back({s_var.at({(int)p, r, t}), cap - 1});
        }
        cf.terms.push_back({g_var.at({r, t}), -cap});
        cm.terms.push_back({g_var.at({r, t}), cap});
        add(std::move(cf));
        add(std::move(cm));
      }
    }
  }

  void s_linking() {
    for (const auto& [key, sv] : s_var) {
      auto [p, r, t] = key;
      add({"slink_p" + pid[p] + "_r" + rid[r] + tsuf(t),
           {{sv, 1}, {x_of(p, r, t), -1}},
           Rel::Le,
           0});
    }
  }

  void y_linking() {
    const int R = static_cast<int>(m.rooms.size());
    for (const ModelPair& pr : m.pairs) {
      if (m.stay_indexed) {
        for (int r = 0; r < R; ++r)
          add({"ylink_p" + pid[pr.i] + "_q" + pid[pr.j] + "_r" + rid[r],
               {{m.x_stay.at({pr.i, r}), 1},
                {m.x_stay.at({pr.j, r}), 1},
                {pr.y_var, -1}},
               Rel::Le,
               1});
      } else {
        for (int t = pr.ov_begin; t < pr.ov_end; ++t)
          for (int r = 0; r < R; ++r)
            add({"ylink_p" + pid[pr.i] + "_q" + pid[pr.j] + "_r" + rid[r] +
                     tsuf(t),
                 {{m.x_time.at({pr.i, r, t}), 1},
                  {m.x_time.at({pr.j, r, t}), 1},
                  {y_time.at({pr.i, pr.j, t}), -1}},
                 Rel::Le,
                 1});
      }
    }
  }

  void delta_linking() {
    for (const auto& [key, dv] : d_var) {
      auto [p, r, t] = key;
      add({"dlink_p" + pid[p] + "_r" + rid[r] + tsuf(t),
           {{m.x_time.at({p, r, t}), 1},
            {m.x_time.at({p, r, t + 1}), -1},
            {dv, -1}},
           Rel::Le,
           0});
    }
  }

  void smax_fixing() {
    for (int t = m.window_start; t <= m.horizon; ++t) {
      LinConstraint c{"smax" + tsuf(t), {}, Rel::Ge, 0};
      for (const auto& [key, sv] : s_var) {
        auto [p, r, tt] = key;
        if (tt == t) c.terms.push_back({sv, 1});
      }
      if (c.terms.empty()) continue;
      auto it = m.smax.find(t);
      if (it == m.smax.end())
        throw ConfigError("missing s^max fixing for period " +
                          std::to_string(t));
      c.rhs = it->second;
      if (c.rhs == 0) continue;  // trivially satisfied
      add(std::move(c));
    }
  }

  void wmin_fixing() {
    for (int t = m.window_start; t <= m.horizon; ++t) {
      LinConstraint c{"wmin" + tsuf(t), {}, Rel::Le, 0};
      for (const ModelPair& pr : m.pairs) {
        if (t < pr.ov_begin || t >= pr.ov_end || pr.w == 0) continue;
        int yv = m.stay_indexed ? pr.y_var : y_time.at({pr.i, pr.j, t});
        c.terms.push_back({yv, pr.w});
      }
      if (c.terms.empty()) continue;
      auto it = m.wmin.find(t);
      if (it == m.wmin.end())
        throw ConfigError("missing w^min fixing for period " +
                          std::to_string(t));
      c.rhs = it->second;
      add(std::move(c));
    }
  }

  // ---- objectives ----

  IpObjective f_trans() {
    IpObjective o{Sense::Min, "f_trans", {}, 0};
    if (lean_) return o;
    for (const auto& [key, dv] : d_var) o.terms.push_back({dv, 1});
    for (const auto& [p, r] : m.virtual_prev) {
      if (!present(p, m.window_start)) continue;
      o.constant += 1;
      o.terms.push_back({m.x_time.at({p, r, m.window_start}), -1});
    }
    return o;
  }

  IpObjective f_priv() {
    IpObjective o{Sense::Max, "f_priv", {}, 0};
    if (lean_) return o;
    for (const auto& [key, sv] : s_var) o.terms.push_back({sv, 1});
    return o;
  }

  IpObjective f_pref() {
    IpObjective o{Sense::Min, "f_pref", {}, 0};
    if (lean_) return o;
    for (const ModelPair& pr : m.pairs) {
      if (pr.w == 0) continue;
      if (m.stay_indexed) {
        o.terms.push_back({pr.y_var, pr.w * pr.los});
      } else {
        for (int t = pr.ov_begin; t < pr.ov_end; ++t)
          o.terms.push_back({y_time.at({pr.i, pr.j, t}), pr.w});
      }
    }
    return o;
  }

  IpObjective keep_fixed() {
    IpObjective o{Sense::Max, "keep", {}, 0};
    if (lean_) return o;
    for (const auto& [p, r] : m.prefix)
      o.terms.push_back({m.x_stay.at({p, r}), 1});
    return o;
  }

  bool lean_ = false;

  IpModel build(const ModelFixings& fixings, bool with_rows) {
    lean_ = !with_rows;
    const IpVariant v = m.variant;
    bool needs_smax = v == IpVariant::R || v == IpVariant::S ||
                      v == IpVariant::U || v == IpVariant::V ||
                      v == IpVariant::Ustar;
    bool needs_wmin = v == IpVariant::S || v == IpVariant::V;
    if (needs_smax) {
      if (!fixings.smax)
        throw ConfigError("variant " + variant_name(v) +
                          " requires s^max fixings");
      m.smax = *fixings.smax;
    }
    if (needs_wmin) {
      if (!fixings.wmin)
        throw ConfigError("variant " + variant_name(v) +
                          " requires w^min fixings");
      m.wmin = *fixings.wmin;
    }

    if (with_rows) {
      declare_vars();
      every_patient();
      if (m.stay_indexed &&
          (v == IpVariant::T || v == IpVariant::U || v == IpVariant::V))
        prefix_constraints();
      combined_capacity();
      s_linking();
      y_linking();
      if (!m.stay_indexed) delta_linking();
      if (needs_smax) smax_fixing();
      if (needs_wmin) wmin_fixing();
    }

    switch (v) {
      case IpVariant::Q:
        m.objectives = {f_trans(), f_priv(), f_pref()};
        break;
      case IpVariant::R:
        m.objectives = {f_pref(), f_trans()};
        break;
      case IpVariant::S:
        m.objectives = {f_trans()};
        break;
      case IpVariant::T:
        m.objectives = {f_priv(), f_pref()};
        break;
      case IpVariant::U:
        m.objectives = {f_pref()};
        break;
      case IpVariant::V:
        m.objectives = {{Sense::Min, "zero", {}, 0}};
        break;
      case IpVariant::Tstar:
        m.objectives = {f_priv(), f_pref(), keep_fixed()};
        break;
      case IpVariant::Ustar:
        m.objectives = {f_pref(), keep_fixed()};
        break;
    }
    return std::move(m);
  }
};

}  // namespace

IpModel build_model(IpVariant variant, const Instance& inst,
                    const ScoringFunction& scorer, const ModelFixings& fixings,
                    const ModelOptions& options) {
  Builder b(variant, inst, scorer, options);
  return b.build(fixings, options.with_lp_rows);
}

std::int64_t eval_terms(const std::vector<LinTerm>& terms,
                        const std::vector<std::int64_t>& values) {
  std::int64_t sum = 0;
  for (const LinTerm& t : terms) sum += t.coef * values[t.var];
  return sum;
}

bool satisfies(const LinConstraint& c, const std::vector<std::int64_t>& values) {
  std::int64_t lhs = eval_terms(c.terms, values);
  switch (c.rel) {
    case Rel::Le: return lhs <= c.rhs;
    case Rel::Ge: return lhs >= c.rhs;
    case Rel::Eq: return lhs == c.rhs;
  }
  return false;
}

namespace {

void write_terms(std::ostringstream& out, const std::vector<LinTerm>& terms,
                 const std::vector<IpVar>& vars) {
  bool first = true;
  for (const LinTerm& term : terms) {
    std::int64_t c = term.coef;
    if (c == 0) continue;
    if (first) {
      if (c < 0) out << "- ";
    } else {
      out << (c < 0 ? " - " : " + ");
    }
    std::int64_t mag = c < 0 ? -c : c;
    if (mag != 1) out << mag << " ";
    out << vars[term.var].name;
    first = false;
  }
  if (first) out << "0";
}

}  // namespace

std::string export_lp(const IpModel& model) {
  std::ostringstream out;
  out << "\\ Patient-to-room assignment, variant " << variant_name(model.variant)
      << "\n";
  out << "\\ Lexicographic objectives (priority order):\n";
  for (std::size_t i = 0; i < model.objectives.size(); ++i) {
    const IpObjective& o = model.objectives[i];
    out << "\\   " << (i + 1) << ": "
        << (o.sense == Sense::Min ? "minimize " : "maximize ") << o.label
        << "\n";
  }
  const IpObjective* first =
      model.objectives.empty() ? nullptr : &model.objectives.front();
  out << ((first == nullptr || first->sense == Sense::Min) ? "Minimize"
                                                           : "Maximize")
      << "\n obj: ";
  if (first != nullptr) {
    std::ostringstream terms;
    write_terms(terms, first->terms, model.vars);
    out << terms.str();
    if (first->constant != 0) out << " + " << first->constant;
  } else {
    out << "0";
  }
  out << "\nSubject To\n";
  for (const LinConstraint& c : model.constraints) {
    out << " " << c.name << ": ";
    std::ostringstream terms;
    write_terms(terms, c.terms, model.vars);
    out << terms.str();
    switch (c.rel) {
      case Rel::Le: out << " <= "; break;
      case Rel::Ge: out << " >= "; break;
      case Rel::Eq: out << " = "; break;
    }
    out << c.rhs << "\n";
  }
  out << "Bounds\n";
  out << "Binaries\n";
  for (const IpVar& v : model.vars) out << " " << v.name << "\n";
  out << "End\n";
  return out.str();
}

}  // namespace pra
