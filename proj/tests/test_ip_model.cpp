#include <doctest.h>

#include <map>
#include <set>
#include <sstream>

#include "helpers.hpp"
#include "pra/ip.hpp"

using namespace pra;
using test::pat;

namespace {

// Minimal LP reader for round-trip checks: collects variable names from the
// Binaries section and counts Subject To rows.
struct LpSummary {
  std::string sense;
  int constraint_count = 0;
  std::set<std::string> binaries;
  std::set<std::string> objective_vars;
};

LpSummary read_lp(const std::string& text) {
  LpSummary s;
  std::istringstream in(text);
  std::string line;
  enum { None, Objective, Constraints, Bounds, Binaries } section = None;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '\\') continue;
    if (line == "Minimize" || line == "Maximize") {
      s.sense = line;
      section = Objective;
      continue;
    }
    if (line == "Subject To") {
      section = Constraints;
      continue;
    }
    if (line == "Bounds") {
      section = Bounds;
      continue;
    }
    if (line == "Binaries") {
      section = Binaries;
      continue;
    }
    if (line == "End") break;
    if (section == Constraints) s.constraint_count++;
    if (section == Binaries) {
      std::istringstream ls(line);
      std::string name;
      while (ls >> name) s.binaries.insert(name);
    }
    if (section == Objective) {
      std::istringstream ls(line);
      std::string tok;
      while (ls >> tok)
        if (std::isalpha(static_cast<unsigned char>(tok[0])) && tok != "obj:")
          s.objective_vars.insert(tok);
    }
  }
  return s;
}

Instance two_by_two() {
  return Instance(2, test::rooms_spec(1, 1),
                  {pat("1", Sex::F, 1, 3, 30), pat("2", Sex::F, 1, 3, 40)});
}

}  // namespace

TEST_CASE("stay overlap and potential roommates") {
  Patient a = pat("a", Sex::F, 1, 5, 30);
  Patient b = pat("b", Sex::F, 3, 8, 40);
  Patient c = pat("c", Sex::M, 3, 8, 40);
  Patient d = pat("d", Sex::F, 5, 8, 40);
  CHECK(stay_overlap(a, b).los == 2);
  CHECK(stay_overlap(a, b).potential_roommates);
  CHECK_FALSE(stay_overlap(a, c).potential_roommates);  // sex
  CHECK(stay_overlap(a, d).los == 0);
  CHECK_FALSE(stay_overlap(a, d).potential_roommates);  // disjoint
}

TEST_CASE("variant Q model has the printed variable families") {
  Instance inst = two_by_two();
  IpModel m = build_model(IpVariant::Q, inst,
                          ScoringFunction::parse("abs-age"), {});
  CHECK_FALSE(m.stay_indexed);
  CHECK(m.var_count(IpVar::Family::X) == 8);  // 2 patients x 2 rooms x 2 periods
  CHECK(m.var_count(IpVar::Family::Y) == 2);  // one same-sex pair, per period
  CHECK(m.var_count(IpVar::Family::G) == 4);  // 2 rooms x 2 occupied periods
  CHECK(m.var_count(IpVar::Family::S) == 0);  // no requesters
  CHECK(m.var_count(IpVar::Family::D) == 4);  // 2 patients x 2 rooms x 1 step
  CHECK(m.objectives.size() == 3);
  CHECK(m.objectives[0].label == "f_trans");
  CHECK(m.objectives[0].sense == Sense::Min);
  CHECK(m.objectives[1].label == "f_priv");
  CHECK(m.objectives[1].sense == Sense::Max);
  CHECK(m.objectives[2].label == "f_pref");

  // constraint families: assign (4), capf/capm (4 each = 8), ylink (2x2=4),
  // dlink (4); no smax/wmin
  int assign = 0, cap = 0, ylink = 0, dlink = 0;
  for (const LinConstraint& c : m.constraints) {
    if (c.name.rfind("assign", 0) == 0) assign++;
    if (c.name.rfind("cap", 0) == 0) cap++;
    if (c.name.rfind("ylink", 0) == 0) ylink++;
    if (c.name.rfind("dlink", 0) == 0) dlink++;
  }
  CHECK(assign == 4);
  CHECK(cap == 8);
  CHECK(ylink == 4);
  CHECK(dlink == 4);
}

TEST_CASE("stay-indexed models share one y per pair") {
  Instance inst = two_by_two();
  IpModel m = build_model(IpVariant::T, inst,
                          ScoringFunction::parse("abs-age"), {});
  CHECK(m.stay_indexed);
  CHECK(m.var_count(IpVar::Family::X) == 4);  // 2 patients x 2 rooms
  CHECK(m.var_count(IpVar::Family::Y) == 1);
  CHECK(m.var_count(IpVar::Family::D) == 0);
  // f_pref carries los * w coefficients
  REQUIRE(m.objectives.size() == 2);
  const IpObjective& fpref = m.objectives[1];
  REQUIRE(fpref.terms.size() == 1);
  CHECK(fpref.terms[0].coef == 2 * 10);  // two shared periods, weight 10
}

TEST_CASE("missing fixings are rejected") {
  Instance inst = two_by_two();
  CHECK_THROWS_AS(
      build_model(IpVariant::R, inst, ScoringFunction::parse("zero"), {}),
      ConfigError);
  CHECK_THROWS_AS(
      build_model(IpVariant::V, inst, ScoringFunction::parse("zero"), {}),
      ConfigError);
  ModelFixings only_smax;
  only_smax.smax = std::map<int, Score>{{1, 0}, {2, 0}};
  CHECK_THROWS_AS(build_model(IpVariant::S, inst,
                              ScoringFunction::parse("zero"), only_smax),
                  ConfigError);
}

TEST_CASE("prefix constraints appear only in T/U/V") {
  Instance inst(3, test::rooms_spec(1, 1),
                {pat("a", Sex::F, 1, 3, 30), pat("b", Sex::F, 2, 3, 40)},
                {{"a", "d1"}});
  auto count_prefix = [](const IpModel& m) {
    int n = 0;
    for (const LinConstraint& c : m.constraints)
      if (c.name.rfind("prefix", 0) == 0) n++;
    return n;
  };
  IpModel t = build_model(IpVariant::T, inst, ScoringFunction::parse("zero"), {});
  CHECK(count_prefix(t) == 1);
  IpModel tstar =
      build_model(IpVariant::Tstar, inst, ScoringFunction::parse("zero"), {});
  CHECK(count_prefix(tstar) == 0);
  REQUIRE(tstar.objectives.size() == 3);
  CHECK(tstar.objectives[2].label == "keep");
  CHECK(tstar.objectives[2].sense == Sense::Max);
  REQUIRE(tstar.objectives[2].terms.size() == 1);
}

TEST_CASE("one patient, one room, one period") {
  Instance inst(1, {{"1", 1}}, {pat("1", Sex::F, 1, 2, 40)});
  IpModel m =
      build_model(IpVariant::Q, inst, ScoringFunction::parse("zero"), {});
  std::string lp = export_lp(m);
  CHECK(lp.find("x_p1_r1_t1 = 1") != std::string::npos);
  CHECK(lp.find("Minimize") != std::string::npos);
  CHECK(lp.find("Subject To") != std::string::npos);
  CHECK(lp.find("Bounds") != std::string::npos);
  CHECK(lp.find("Binaries") != std::string::npos);
  CHECK(lp.rfind("End\n") == lp.size() - 4);
}

TEST_CASE("empty instance exports a valid file") {
  Instance inst(2, test::rooms_spec(1, 0), {});
  IpModel m =
      build_model(IpVariant::Q, inst, ScoringFunction::parse("zero"), {});
  LpSummary s = read_lp(export_lp(m));
  CHECK(s.constraint_count == 0);
  CHECK(s.binaries.empty());
}

TEST_CASE("exported LP re-parses with matching counts") {
  std::mt19937_64 rng(43);
  for (int round = 0; round < 20; ++round) {
    Instance inst = test::random_instance(rng, 5, 3, 3);
    IpModel m = build_model(IpVariant::Q, inst,
                            ScoringFunction::parse("bounded-age:k=10"), {});
    LpSummary s = read_lp(export_lp(m));
    CHECK(s.constraint_count == static_cast<int>(m.constraints.size()));
    CHECK(s.binaries.size() == m.vars.size());
    // objective must reference declared variables only
    for (const std::string& v : s.objective_vars)
      CHECK(s.binaries.count(v) == 1);
    CHECK(s.sense == "Minimize");
  }
}

TEST_CASE("V exports with its zero objective and both fixings") {
  Instance inst = two_by_two();
  ModelFixings fixings;
  fixings.smax = std::map<int, Score>{{1, 0}, {2, 0}};
  fixings.wmin = std::map<int, Score>{{1, 10}, {2, 10}};
  IpModel m =
      build_model(IpVariant::V, inst, ScoringFunction::parse("abs-age"), fixings);
  std::string lp = export_lp(m);
  CHECK(lp.find("wmin_t1:") != std::string::npos);
  CHECK(lp.find("Minimize\n obj: 0") != std::string::npos);
  // the cap rows carry the pair weights
  bool found = false;
  for (const LinConstraint& c : m.constraints)
    if (c.name == "wmin_t1") {
      found = true;
      REQUIRE(c.terms.size() == 1);
      CHECK(c.terms[0].coef == 10);
      CHECK(c.rhs == 10);
    }
  CHECK(found);
}

TEST_CASE("window start clips stays and keeps absolute period names") {
  Instance inst(4, test::rooms_spec(1, 1),
                {pat("a", Sex::F, 1, 5, 30), pat("b", Sex::F, 3, 5, 40)});
  ModelOptions options;
  options.window_start = 3;
  IpModel m = build_model(IpVariant::U, inst, ScoringFunction::parse("abs-age"),
                          [] {
                            ModelFixings f;
                            f.smax = std::map<int, Score>{{3, 0}, {4, 0}};
                            return f;
                          }(),
                          options);
  // both patients present in periods 3 and 4 only
  for (const IpVar& v : m.vars)
    if (v.family == IpVar::Family::G) CHECK(v.t >= 3);
  REQUIRE(m.pairs.size() == 1);
  CHECK(m.pairs[0].los == 2);
  CHECK(m.pairs[0].ov_begin == 3);
}

TEST_CASE("virtual previous rooms enter the Q transfer objective") {
  Instance inst(3, test::rooms_spec(1, 1), {pat("a", Sex::F, 1, 4, 30)});
  ModelOptions options;
  options.window_start = 2;
  options.virtual_prev = {{"a", "s1"}};
  IpModel m =
      build_model(IpVariant::Q, inst, ScoringFunction::parse("zero"), {}, options);
  REQUIRE(m.objectives[0].label == "f_trans");
  CHECK(m.objectives[0].constant == 1);
  bool has_negative = false;
  for (const LinTerm& t : m.objectives[0].terms)
    has_negative |= t.coef == -1;
  CHECK(has_negative);
}
