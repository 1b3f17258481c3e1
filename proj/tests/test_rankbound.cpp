#include <doctest.h>

#include <bit>
#include <set>
#include <stdexcept>

#include "twodescent/families.hpp"
#include "twodescent/rankbound.hpp"

using namespace twodescent;
using namespace twodescent::rankbound;
using descent::make_curve;

namespace {

std::set<Int> as_set(const std::vector<Int>& v) { return {v.begin(), v.end()}; }

void check_image_invariants(const DescentImage& img) {
  const auto candidates = descent::divisor_class_candidates(img.coefficient, img.middle);
  const std::set<Int> cand(candidates.begin(), candidates.end());
  const auto confirmed = as_set(img.confirmed);
  const auto possible = as_set(img.possible);

  CHECK(confirmed.count(1));
  CHECK(confirmed.count(intmath::squarefree_class(img.coefficient)));
  CHECK(is_subgroup(img.confirmed));
  CHECK(std::has_single_bit(img.confirmed.size()));
  for (Int c : confirmed) CHECK(possible.count(c));
  for (Int c : possible) CHECK(cand.count(c));
  CHECK(img.evidence.size() == candidates.size());

  for (const auto& [cls, ev] : img.evidence) {
    CAPTURE(cls);
    switch (ev.basis) {
      case Basis::Solved: {
        CHECK(confirmed.count(cls));
        bool revalidated = false;
        for (const auto& f : ev.factorizations)
          if (const auto* s = std::get_if<descent::Solved>(&f.verdict))
            revalidated |= descent::validates(f.torsor, s->triple);
        CHECK(revalidated);
        break;
      }
      case Basis::Generated:
        REQUIRE(ev.via);
        CHECK(confirmed.count(ev.via->first));
        CHECK(confirmed.count(ev.via->second));
        CHECK(intmath::class_product(ev.via->first, ev.via->second) == cls);
        break;
      case Basis::Obstructed:
        CHECK_FALSE(possible.count(cls));
        for (const auto& f : ev.factorizations)
          CHECK(std::holds_alternative<descent::ObstructedAt>(f.verdict));
        break;
      case Basis::ClosureExcluded:
        CHECK_FALSE(possible.count(cls));
        REQUIRE(ev.via);
        CHECK_FALSE(possible.count(ev.via->first));
        CHECK(confirmed.count(ev.via->second));
        CHECK(intmath::class_product(ev.via->first, ev.via->second) == cls);
        break;
      case Basis::Undetermined:
        CHECK(possible.count(cls));
        CHECK_FALSE(confirmed.count(cls));
        break;
      case Basis::Identity:
        CHECK(cls == 1);
        break;
      case Basis::TwoTorsion:
        CHECK(cls == intmath::squarefree_class(img.coefficient));
        break;
    }
  }
}

}  // namespace

TEST_CASE("descent_image on small family curves") {
  const auto e7a = descent_image(make_curve(0, -35), Side::Alpha);
  CHECK(as_set(e7a.confirmed) == std::set<Int>{1, -35});
  CHECK(as_set(e7a.possible) == std::set<Int>{1, -35});
  check_image_invariants(e7a);

  const auto e7b = descent_image(make_curve(0, -35), Side::AlphaBar);
  CHECK(e7b.coefficient == 140);
  CHECK(as_set(e7b.confirmed) == std::set<Int>{1, 35});
  CHECK(as_set(e7b.possible) == std::set<Int>{1, 35});
  check_image_invariants(e7b);

  const auto e3b = descent_image(make_curve(0, -15), Side::AlphaBar);
  CHECK(as_set(e3b.confirmed) == std::set<Int>{1, 15, 6, 10});
  check_image_invariants(e3b);
}

TEST_CASE("rank_interval") {
  const auto r7 = rank_interval(make_curve(0, -35));
  CHECK(r7.lower == 0);
  CHECK(r7.upper == 0);

  const auto r3 = rank_interval(make_curve(0, -15));
  CHECK(r3.lower == 1);
  CHECK(r3.upper == 1);

  const auto r31 = rank_interval(make_curve(0, -155));
  CHECK(r31.lower >= 2);

  SUBCASE("interval invariants across a spread of curves") {
    for (Int a : {-3, 0, 2, 5}) {
      for (Int b : {-35, -15, 4, 6, 9, 12, -20, 30, 77}) {
        if (a * a == 4 * b) continue;
        CAPTURE(a);
        CAPTURE(b);
        const auto r = rank_interval(make_curve(a, b), DescentConfig{64, 50, {}});
        CHECK(r.lower <= r.upper);
        CHECK((std::size_t{4} << r.lower) == r.image_e.confirmed.size() * r.image_ebar.confirmed.size());
        check_image_invariants(r.image_e);
        check_image_invariants(r.image_ebar);
      }
    }
  }

  SUBCASE("a larger search bound only tightens") {
    for (Int p : {11, 31, 67, 431}) {
      int lower = -1, upper = 1 << 20;
      for (Int bound : {4, 8, 64, 1024}) {
        const auto r = rank_interval(families::family_curve(p), DescentConfig{bound, 50, {}});
        CHECK(r.lower >= lower);
        CHECK(r.upper <= upper);
        lower = r.lower;
        upper = r.upper;
      }
    }
  }

  SUBCASE("config validation") {
    CHECK_THROWS_AS(rank_interval(make_curve(0, -35), DescentConfig{0, 50, {}}), std::invalid_argument);
  }
}

TEST_CASE("y^2 = x^3 + x: full 2-torsion on the isogenous side is found") {
  const auto r = rank_interval(make_curve(0, 1));
  CHECK(as_set(r.image_ebar.confirmed) == std::set<Int>{1, -1, 2, -2});
  CHECK(r.lower == 0);
  CHECK(r.upper == 0);
}

TEST_CASE("twist and rank_over_quadratic") {
  CHECK(twist(make_curve(0, -35), -1) == make_curve(0, -35));
  CHECK(twist(make_curve(0, -35), 2) == make_curve(0, -140));
  CHECK(twist(make_curve(1, 3), -1) == make_curve(-1, 3));
  CHECK_THROWS_AS(twist(make_curve(0, -35), 12), std::invalid_argument);
  CHECK_THROWS_AS(twist(make_curve(0, -35), 0), std::invalid_argument);
  CHECK_THROWS_AS(rank_over_quadratic(make_curve(0, -35), 1), std::invalid_argument);

  const auto q7 = rank_over_quadratic(make_curve(0, -35), -1);
  CHECK(q7.lower == 0);
  CHECK(q7.upper == 0);
  const auto q3 = rank_over_quadratic(make_curve(0, -15), -1);
  CHECK(q3.lower == 2);
  CHECK(q3.upper == 2);
  const auto q11 = rank_over_quadratic(make_curve(0, -55), -1);
  CHECK(q11.lower >= 2);

  for (Int p : {7, 3, 11, 19, 31, 43, 67}) {
    const auto c = families::family_curve(p);
    const auto base = rank_interval(c);
    const auto q = rank_over_quadratic(c, -1);
    CHECK(q.lower == 2 * base.lower);
    CHECK(q.upper == 2 * base.upper);
  }

  // m = 5 changes the curve; the sum uses both intervals.
  const auto q5 = rank_over_quadratic(make_curve(0, -15), 5);
  CHECK(q5.twisted.image_e.coefficient == -375);
  CHECK(q5.lower == q5.base.lower + q5.twisted.lower);
  CHECK(q5.upper == q5.base.upper + q5.twisted.upper);
}
