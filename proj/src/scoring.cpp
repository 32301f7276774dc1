#include "pra/scoring.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

namespace pra {

namespace {

std::int64_t age_class(std::int64_t age, std::int64_t k) {
  // ceil(age / k); age 0 falls into class 0.
  return (age + k - 1) / k;
}

// round(num / den) half away from zero; num >= 0, den > 0.
std::int64_t round_div(std::int64_t num, std::int64_t den) {
  return (num + den / 2) / den;
}

struct AgeSpan {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
};

AgeSpan age_span(const std::vector<const Patient*>& subset) {
  AgeSpan s{std::numeric_limits<std::int64_t>::max(), 0};
  for (const Patient* p : subset) {
    if (p->age < 0) throw DataError("patient '" + p->id + "': negative age");
    s.lo = std::min<std::int64_t>(s.lo, p->age);
    s.hi = std::max<std::int64_t>(s.hi, p->age);
  }
  return s;
}

}  // namespace

void ScoringFunction::validate() const {
  if (k < 1) throw ConfigError("scorer parameter k must be >= 1");
  if (eps.num <= 0 || eps.den <= 0) throw ConfigError("eps must be > 0");
  if (scale < 1) throw ConfigError("scale must be >= 1");
  if (balance_slack < 0) throw ConfigError("x must be >= 0");
}

Score score(const ScoringFunction& scorer,
            const std::vector<const Patient*>& subset) {
  const std::size_t n = subset.size();
  if (n == 0) return 0;

  switch (scorer.kind) {
    case ScorerKind::Zero:
      return 0;

    case ScorerKind::AbsoluteAge: {
      if (n <= 1) return 0;
      AgeSpan s = age_span(subset);
      return s.hi - s.lo;
    }

    case ScorerKind::BoundedAge: {
      if (n <= 1) return 0;
      AgeSpan s = age_span(subset);
      return (s.hi - s.lo) <= scorer.k ? 0 : 1;
    }

    case ScorerKind::AgeClassCount: {
      if (n <= 1) return 0;
      std::set<std::int64_t> classes;
      for (const Patient* p : subset) classes.insert(age_class(p->age, scorer.k));
      return static_cast<Score>(classes.size());
    }

    case ScorerKind::AgeClassIndicator: {
      if (n <= 1) return 0;
      std::set<std::int64_t> classes;
      for (const Patient* p : subset) classes.insert(age_class(p->age, scorer.k));
      return classes.size() == 1 ? 0 : 1;
    }

    case ScorerKind::WeightedAge: {
      // Relative age deviation (max+eps)/(min+eps) - 1, rounded at the
      // declared fixed-point scale; exact rational arithmetic throughout.
      if (n <= 1) return 0;
      AgeSpan s = age_span(subset);
      std::int64_t spread = s.hi - s.lo;
      std::int64_t den = s.lo * scorer.eps.den + scorer.eps.num;
      return round_div(scorer.scale * spread * scorer.eps.den, den);
    }

    case ScorerKind::PrePostSurgery: {
      if (n <= 1) return scorer.prepost_singleton_penalty && n == 1 ? 1 : 0;
      std::int64_t lo = std::numeric_limits<std::int64_t>::max(), hi = 0;
      for (const Patient* p : subset) {
        lo = std::min<std::int64_t>(lo, p->arrival);
        hi = std::max<std::int64_t>(hi, p->arrival);
      }
      return (hi - lo) > 1 ? 0 : 1;
    }

    case ScorerKind::SimilarRoommate: {
      if (n <= 1) return 0;
      for (const Patient* p : subset) {
        bool has_similar = false;
        for (const Patient* q : subset) {
          if (q == p) continue;
          bool similar =
              scorer.mode == SimilarMode::Diff
                  ? std::abs(static_cast<std::int64_t>(p->age) - q->age) <=
                        scorer.k
                  : age_class(p->age, scorer.k) == age_class(q->age, scorer.k);
          if (similar) {
            has_similar = true;
            break;
          }
        }
        if (!has_similar) return 1;
      }
      return 0;
    }

    case ScorerKind::BalancedClasses: {
      std::map<std::int64_t, std::int64_t> cells;
      for (const Patient* p : subset) cells[age_class(p->age, scorer.k)]++;
      std::int64_t lo = std::numeric_limits<std::int64_t>::max(), hi = 0;
      for (const auto& [cls, size] : cells) {
        lo = std::min(lo, size);
        hi = std::max(hi, size);
      }
      return (hi - lo) <= scorer.balance_slack ? 0 : 1;
    }
  }
  throw ConfigError("unknown scorer kind");
}

Score score_pair(const ScoringFunction& scorer, const Patient& a,
                 const Patient& b) {
  return score(scorer, {&a, &b});
}

ScoreType classify(const ScoringFunction& scorer) {
  switch (scorer.kind) {
    case ScorerKind::AbsoluteAge:
    case ScorerKind::AgeClassCount:
    case ScorerKind::WeightedAge:
      return ScoreType::TypeI;
    case ScorerKind::AgeClassIndicator:
      return ScoreType::TypeIII;
    default:
      return ScoreType::TypeII;
  }
}

void PairWeightTable::put(int p, int q, Score w) {
  table_[std::minmax(p, q)] = w;
}

bool PairWeightTable::contains(int p, int q) const {
  return table_.count(std::minmax(p, q)) > 0;
}

Score PairWeightTable::at(int p, int q) const {
  auto it = table_.find(std::minmax(p, q));
  return it == table_.end() ? 0 : it->second;
}

PairWeightTable pair_weights(const ScoringFunction& scorer,
                             const Instance& inst) {
  PairWeightTable table;
  const auto& patients = inst.patients();
  for (std::size_t p = 0; p < patients.size(); ++p) {
    for (std::size_t q = p + 1; q < patients.size(); ++q) {
      if (patients[p].sex != patients[q].sex) continue;
      int los = std::min(patients[p].discharge, patients[q].discharge) -
                std::max(patients[p].arrival, patients[q].arrival);
      if (los <= 0) continue;
      table.put(static_cast<int>(p), static_cast<int>(q),
                score_pair(scorer, patients[p], patients[q]));
    }
  }
  return table;
}

namespace {

const std::map<std::string, ScorerKind>& scorer_names() {
  static const std::map<std::string, ScorerKind> names = {
      {"zero", ScorerKind::Zero},
      {"abs-age", ScorerKind::AbsoluteAge},
      {"bounded-age", ScorerKind::BoundedAge},
      {"age-class-count", ScorerKind::AgeClassCount},
      {"age-class-ind", ScorerKind::AgeClassIndicator},
      {"weighted-age", ScorerKind::WeightedAge},
      {"prepost", ScorerKind::PrePostSurgery},
      {"similar-age", ScorerKind::SimilarRoommate},
      {"balanced-classes", ScorerKind::BalancedClasses},
  };
  return names;
}

std::int64_t parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    std::int64_t v = std::stoll(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("scorer parameter " + key + ": bad integer '" + value +
                      "'");
  }
}

// Decimal ("0.25") or fraction ("1/4") string -> exact rational.
Rational parse_rational(const std::string& key, const std::string& value) {
  if (auto slash = value.find('/'); slash != std::string::npos) {
    return {parse_int(key, value.substr(0, slash)),
            parse_int(key, value.substr(slash + 1))};
  }
  auto dot = value.find('.');
  if (dot == std::string::npos) return {parse_int(key, value), 1};
  std::string whole = value.substr(0, dot), frac = value.substr(dot + 1);
  if (frac.empty() || frac.size() > 9)
    throw ConfigError("scorer parameter " + key + ": bad decimal '" + value +
                      "'");
  std::int64_t den = 1;
  for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
  std::int64_t num =
      parse_int(key, whole.empty() ? "0" : whole) * den + parse_int(key, frac);
  std::int64_t g = std::gcd(num, den);
  if (g > 0) {
    num /= g;
    den /= g;
  }
  return {num, den};
}

}  // namespace

ScoringFunction ScoringFunction::parse(std::string_view spec) {
  std::string text(spec);
  std::string name = text;
  std::string params;
  if (auto colon = text.find(':'); colon != std::string::npos) {
    name = text.substr(0, colon);
    params = text.substr(colon + 1);
  }
  auto it = scorer_names().find(name);
  if (it == scorer_names().end())
    throw ConfigError("unknown scorer '" + name + "'");

  ScoringFunction f;
  f.kind = it->second;
  std::stringstream ss(params);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    auto eq = item.find('=');
    if (eq == std::string::npos)
      throw ConfigError("scorer parameter '" + item + "' is not key=value");
    std::string key = item.substr(0, eq), value = item.substr(eq + 1);
    if (key == "k") {
      f.k = parse_int(key, value);
    } else if (key == "eps") {
      f.eps = parse_rational(key, value);
    } else if (key == "scale") {
      f.scale = parse_int(key, value);
    } else if (key == "x") {
      f.balance_slack = parse_int(key, value);
    } else if (key == "mode") {
      if (value == "diff")
        f.mode = SimilarMode::Diff;
      else if (value == "class")
        f.mode = SimilarMode::Class;
      else
        throw ConfigError("scorer mode must be 'diff' or 'class'");
    } else {
      throw ConfigError("unknown scorer parameter '" + key + "'");
    }
  }
  f.validate();
  return f;
}

std::string ScoringFunction::spec() const {
  std::string name;
  for (const auto& [n, kind] : scorer_names())
    if (kind == this->kind) name = n;
  std::ostringstream out;
  out << name;
  switch (kind) {
    case ScorerKind::BoundedAge:
    case ScorerKind::AgeClassCount:
    case ScorerKind::AgeClassIndicator:
      out << ":k=" << k;
      break;
    case ScorerKind::WeightedAge:
      out << ":eps=" << eps.num;
      if (eps.den != 1) out << "/" << eps.den;
      out << ",scale=" << scale;
      break;
    case ScorerKind::SimilarRoommate:
      out << ":k=" << k
          << ",mode=" << (mode == SimilarMode::Diff ? "diff" : "class");
      break;
    case ScorerKind::BalancedClasses:
      out << ":k=" << k << ",x=" << balance_slack;
      break;
    default:
      break;
  }
  return out.str();
}

}  // namespace pra
