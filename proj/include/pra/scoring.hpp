#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pra/core.hpp"

namespace pra {

enum class ScorerKind {
  Zero,
  AbsoluteAge,
  BoundedAge,
  AgeClassCount,
  AgeClassIndicator,
  WeightedAge,
  PrePostSurgery,
  SimilarRoommate,
  BalancedClasses,
};

enum class SimilarMode { Diff, Class };

enum class ScoreType { TypeI, TypeII, TypeIII };

/// Positive rational, used for the weighted-age offset.
struct Rational {
  std::int64_t num = 1;
  std::int64_t den = 1;
};

/// A named, parameterized map from patient subsets to nonnegative scores.
/// Score 0 means the occupants fit perfectly; every kind scores 0 on the
/// empty set and on singletons.
struct ScoringFunction {
  ScorerKind kind = ScorerKind::Zero;
  std::int64_t k = 1;              // class size / age-difference bound
  Rational eps{1, 1};              // weighted-age offset, > 0
  std::int64_t scale = 1;          // weighted-age fixed-point multiplier
  std::int64_t balance_slack = 0;  // allowed class-size imbalance
  SimilarMode mode = SimilarMode::Diff;
  bool prepost_singleton_penalty = false;  // literal-formula behaviour on |S|=1

  /// Parses `name[:key=value[,key=value]...]`, e.g. "bounded-age:k=10" or
  /// "weighted-age:eps=1,scale=1000". Throws ConfigError on bad input.
  static ScoringFunction parse(std::string_view spec);
  std::string spec() const;

  void validate() const;
};

Score score(const ScoringFunction& scorer,
            const std::vector<const Patient*>& subset);
Score score_pair(const ScoringFunction& scorer, const Patient& a,
                 const Patient& b);

ScoreType classify(const ScoringFunction& scorer);

/// Symmetric weights w_pq = w({p,q}) for same-sex patient pairs with
/// overlapping stays, keyed by (smaller, larger) patient index.
class PairWeightTable {
public:
  void put(int p, int q, Score w);
  bool contains(int p, int q) const;
  Score at(int p, int q) const;  // 0 when the pair is absent
  const std::map<std::pair<int, int>, Score>& entries() const { return table_; }

private:
  std::map<std::pair<int, int>, Score> table_;
};

PairWeightTable pair_weights(const ScoringFunction& scorer,
                             const Instance& inst);

}  // namespace pra
