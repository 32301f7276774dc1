#include <doctest.h>

#include <algorithm>
#include <random>

#include "helpers.hpp"
#include "pra/scoring.hpp"

using namespace pra;
using test::pat;

namespace {

Score score_ages(const ScoringFunction& f, std::vector<int> ages) {
  std::vector<Patient> storage;
  for (std::size_t i = 0; i < ages.size(); ++i)
    storage.push_back(pat("p" + std::to_string(i), Sex::F, 1, 2, ages[i]));
  std::vector<const Patient*> ptrs;
  for (const Patient& p : storage) ptrs.push_back(&p);
  return score(f, ptrs);
}

}  // namespace

TEST_CASE("absolute age difference") {
  auto f = ScoringFunction::parse("abs-age");
  CHECK(score_ages(f, {30, 45}) == 15);
  CHECK(score_ages(f, {30}) == 0);
  CHECK(score_ages(f, {}) == 0);
  CHECK(score_ages(f, {20, 50, 35}) == 30);
}

TEST_CASE("bounded age difference") {
  auto f = ScoringFunction::parse("bounded-age:k=10");
  CHECK(score_ages(f, {30, 41}) == 1);
  CHECK(score_ages(f, {30, 39}) == 0);
  CHECK(score_ages(f, {30, 40}) == 0);
  CHECK(score_ages(f, {77}) == 0);
}

TEST_CASE("age class count uses ceiling classes") {
  auto f = ScoringFunction::parse("age-class-count:k=10");
  CHECK(score_ages(f, {9, 12}) == 2);   // classes 1 and 2
  CHECK(score_ages(f, {11, 12}) == 1);  // one shared class
  CHECK(score_ages(f, {9, 12, 25}) == 3);
  CHECK(score_ages(f, {42}) == 0);
  CHECK(score_ages(f, {}) == 0);
}

TEST_CASE("age class indicator") {
  auto f = ScoringFunction::parse("age-class-ind:k=10");
  CHECK(score_ages(f, {11, 19}) == 0);
  CHECK(score_ages(f, {9, 12}) == 1);
  CHECK(score_ages(f, {33}) == 0);
}

TEST_CASE("weighted age difference at a fixed-point scale") {
  auto f = ScoringFunction::parse("weighted-age:eps=1,scale=100");
  // (59+1)/(29+1) = 2.0 -> deviation 1.0 -> 100
  CHECK(score_ages(f, {29, 59}) == 100);
  CHECK(score_ages(f, {29}) == 0);
  CHECK(score_ages(f, {30, 30}) == 0);
  // (40+1)/(20+1) - 1 = 20/21 -> 0.952... -> 95 at scale 100
  CHECK(score_ages(f, {20, 40}) == 95);
  // half-away rounding: ages {0,1}, eps=2 -> 1/2 -> 0.5 -> 1 at scale 1
  auto g = ScoringFunction::parse("weighted-age:eps=2,scale=1");
  CHECK(score_ages(g, {0, 1}) == 1);
}

TEST_CASE("pre/post surgery mixes admission waves") {
  auto f = ScoringFunction::parse("prepost");
  std::vector<Patient> storage = {pat("a", Sex::F, 3, 9, 50),
                                  pat("b", Sex::F, 5, 9, 52)};
  CHECK(score(f, {&storage[0], &storage[1]}) == 0);  // gap 2 > 1
  storage[1].arrival = 4;
  CHECK(score(f, {&storage[0], &storage[1]}) == 1);  // gap 1
  storage[1].arrival = 3;
  CHECK(score(f, {&storage[0], &storage[1]}) == 1);  // same day
  CHECK(score(f, {&storage[0]}) == 0);  // singleton convention
  ScoringFunction literal = f;
  literal.prepost_singleton_penalty = true;
  CHECK(score(literal, {&storage[0]}) == 1);
}

TEST_CASE("similar roommate wants a near-age partner for everyone") {
  auto f = ScoringFunction::parse("similar-age:k=5,mode=diff");
  CHECK(score_ages(f, {30, 33, 60, 62}) == 0);
  CHECK(score_ages(f, {30, 33, 60}) == 1);  // 60 has no partner
  CHECK(score_ages(f, {30}) == 0);
  auto g = ScoringFunction::parse("similar-age:k=10,mode=class");
  CHECK(score_ages(g, {11, 19}) == 0);   // same class
  CHECK(score_ages(g, {19, 21}) == 1);   // adjacent classes
}

TEST_CASE("balanced classes tolerate slack x") {
  auto f = ScoringFunction::parse("balanced-classes:k=10,x=1");
  CHECK(score_ages(f, {11, 12, 21}) == 0);      // cells 2 and 1
  CHECK(score_ages(f, {11, 12, 13, 21}) == 1);  // cells 3 and 1
  CHECK(score_ages(f, {42}) == 0);
}

TEST_CASE("classification into score types") {
  CHECK(classify(ScoringFunction::parse("abs-age")) == ScoreType::TypeI);
  CHECK(classify(ScoringFunction::parse("age-class-count:k=5")) ==
        ScoreType::TypeI);
  CHECK(classify(ScoringFunction::parse("weighted-age:eps=1,scale=10")) ==
        ScoreType::TypeI);
  CHECK(classify(ScoringFunction::parse("bounded-age:k=5")) ==
        ScoreType::TypeII);
  CHECK(classify(ScoringFunction::parse("prepost")) == ScoreType::TypeII);
  CHECK(classify(ScoringFunction::parse("similar-age:k=5")) ==
        ScoreType::TypeII);
  CHECK(classify(ScoringFunction::parse("balanced-classes:k=5")) ==
        ScoreType::TypeII);
  CHECK(classify(ScoringFunction::parse("age-class-ind:k=5")) ==
        ScoreType::TypeIII);
}

TEST_CASE("scorer grammar") {
  auto f = ScoringFunction::parse("bounded-age:k=10");
  CHECK(f.kind == ScorerKind::BoundedAge);
  CHECK(f.k == 10);
  auto g = ScoringFunction::parse("weighted-age:eps=0.5,scale=1000");
  CHECK(g.eps.num == 1);
  CHECK(g.eps.den == 2);
  CHECK(g.scale == 1000);
  CHECK_THROWS_AS(ScoringFunction::parse("unknown"), ConfigError);
  CHECK_THROWS_AS(ScoringFunction::parse("bounded-age:k=0"), ConfigError);
  CHECK_THROWS_AS(ScoringFunction::parse("bounded-age:q=3"), ConfigError);
  CHECK_THROWS_AS(ScoringFunction::parse("weighted-age:eps=0"), ConfigError);
  CHECK_THROWS_AS(ScoringFunction::parse("similar-age:mode=x"), ConfigError);
  for (const ScoringFunction& scorer : test::all_scorers()) {
    ScoringFunction reparsed = ScoringFunction::parse(scorer.spec());
    CHECK(reparsed.kind == scorer.kind);
    CHECK(reparsed.k == scorer.k);
  }
}

TEST_CASE("score is symmetric and zero on empty and singleton sets") {
  std::mt19937_64 rng(11);
  for (const ScoringFunction& scorer : test::all_scorers()) {
    for (int round = 0; round < 50; ++round) {
      std::vector<Patient> storage;
      int n = static_cast<int>(rng() % 5);
      for (int i = 0; i < n; ++i)
        storage.push_back(pat("p" + std::to_string(i), Sex::F,
                              1 + static_cast<int>(rng() % 5),
                              7 + static_cast<int>(rng() % 5),
                              static_cast<int>(rng() % 100)));
      std::vector<const Patient*> ptrs;
      for (const Patient& p : storage) ptrs.push_back(&p);
      Score base = score(scorer, ptrs);
      CHECK(base >= 0);
      std::shuffle(ptrs.begin(), ptrs.end(), rng);
      CHECK(score(scorer, ptrs) == base);
      if (n <= 1) CHECK(base == 0);
    }
  }
}

TEST_CASE("absolute age spread is monotone under adding patients") {
  std::mt19937_64 rng(13);
  auto f = ScoringFunction::parse("abs-age");
  for (int round = 0; round < 100; ++round) {
    std::vector<Patient> storage;
    for (int i = 0; i < 4; ++i)
      storage.push_back(
          pat("p" + std::to_string(i), Sex::F, 1, 2, static_cast<int>(rng() % 90)));
    std::vector<const Patient*> sub = {&storage[0], &storage[1]};
    Score before = score(f, sub);
    sub.push_back(&storage[2]);
    CHECK(score(f, sub) >= before);
  }
}

TEST_CASE("indicator scorers stay within {0,1}") {
  std::mt19937_64 rng(17);
  for (const char* spec : {"bounded-age:k=7", "age-class-ind:k=15", "prepost",
                           "similar-age:k=7", "balanced-classes:k=15,x=0"}) {
    ScoringFunction f = ScoringFunction::parse(spec);
    for (int round = 0; round < 60; ++round) {
      std::vector<Patient> storage;
      int n = 2 + static_cast<int>(rng() % 3);
      for (int i = 0; i < n; ++i)
        storage.push_back(pat("p" + std::to_string(i), Sex::F,
                              1 + static_cast<int>(rng() % 4),
                              6 + static_cast<int>(rng() % 4),
                              static_cast<int>(rng() % 100)));
      std::vector<const Patient*> ptrs;
      for (const Patient& p : storage) ptrs.push_back(&p);
      Score v = score(f, ptrs);
      CHECK((v == 0 || v == 1));
    }
  }
}

TEST_CASE("pair weights cover exactly the same-sex overlapping pairs") {
  std::mt19937_64 rng(19);
  for (int round = 0; round < 40; ++round) {
    Instance inst = test::random_instance(rng, 20, 4, 6);
    for (const ScoringFunction& scorer :
         {ScoringFunction::parse("abs-age"),
          ScoringFunction::parse("weighted-age:eps=1,scale=100")}) {
      PairWeightTable table = pair_weights(scorer, inst);
      const auto& ps = inst.patients();
      for (std::size_t p = 0; p < ps.size(); ++p) {
        for (std::size_t q = p + 1; q < ps.size(); ++q) {
          int los = std::min(ps[p].discharge, ps[q].discharge) -
                    std::max(ps[p].arrival, ps[q].arrival);
          bool expected = ps[p].sex == ps[q].sex && los > 0;
          CHECK(table.contains(p, q) == expected);
          if (expected) {
            CHECK(table.at(p, q) == score_pair(scorer, ps[p], ps[q]));
            CHECK(table.at(q, p) == table.at(p, q));
          }
        }
      }
    }
  }
}

TEST_CASE("explicit pair weight examples") {
  Instance inst(5, test::rooms_spec(2, 0),
                {pat("f1", Sex::F, 1, 4, 30), pat("f2", Sex::F, 2, 5, 40),
                 pat("m1", Sex::M, 1, 4, 35), pat("f3", Sex::F, 4, 5, 50)});
  PairWeightTable table =
      pair_weights(ScoringFunction::parse("abs-age"), inst);
  CHECK(table.at(0, 1) == 10);       // overlapping females
  CHECK_FALSE(table.contains(0, 2));  // cross sex
  CHECK_FALSE(table.contains(0, 3));  // disjoint stays
}
