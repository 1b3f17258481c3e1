#include <doctest.h>

#include <random>
#include <set>
#include <stdexcept>

#include "oracles.hpp"
#include "twodescent/descent.hpp"
#include "twodescent/families.hpp"

using namespace twodescent;
using namespace twodescent::descent;

namespace {

std::set<Int> as_set(const std::vector<Int>& v) { return {v.begin(), v.end()}; }

// The eight torsors of the rank-zero argument for E_p.
std::vector<TorsorProblem> family_torsors(Int p) {
  return {
      {5 * p, 0, -1}, {5, 0, -p}, {p, 0, -5},                                      // alpha side
      {2, 0, 10 * p}, {4, 0, 5 * p}, {5, 0, 4 * p}, {20, 0, p}, {2 * p, 0, 10},  // alphaBar side
  };
}

}  // namespace

TEST_CASE("make_curve and isogenous") {
  const Curve e7 = make_curve(0, -35);
  CHECK(e7.a() == 0);
  CHECK(e7.b() == -35);
  CHECK_THROWS_AS(make_curve(0, 0), std::invalid_argument);
  CHECK_THROWS_AS(make_curve(4, 4), std::invalid_argument);  // a^2 = 4b
  CHECK(make_curve(0, -15).b() == -15);

  CHECK(isogenous(e7) == make_curve(0, 140));
  CHECK(isogenous(make_curve(0, 9)) == make_curve(0, -36));
  CHECK(isogenous(isogenous(make_curve(0, 9))) == make_curve(0, 144));
  CHECK(isogenous(make_curve(5, 4)) == make_curve(-10, 9));
}

TEST_CASE("divisor_class_candidates") {
  CHECK(as_set(divisor_class_candidates(-35)) == std::set<Int>{1, -1, 5, -5, 7, -7, 35, -35});
  CHECK(as_set(divisor_class_candidates(140)) == std::set<Int>{1, 2, 5, 10, 7, 14, 35, 70});
  CHECK(divisor_class_candidates(1) == std::vector<Int>{1});
  CHECK_THROWS_AS(divisor_class_candidates(0), std::invalid_argument);

  // A positive middle term that can beat both negative ends keeps them.
  CHECK(as_set(divisor_class_candidates(4, 5)) == std::set<Int>{1, -1, 2, -2});
  CHECK(as_set(divisor_class_candidates(4, 3)) == std::set<Int>{1, 2});

  SUBCASE("size is 2^omega, doubled for negative coefficients") {
    std::mt19937_64 rng(21);
    for (int i = 0; i < 500; ++i) {
      Int n = static_cast<Int>(rng() % 1000000) + 1;
      const auto omega = intmath::factorize(n).primes.size();
      CHECK(divisor_class_candidates(n).size() == (std::size_t{1} << omega));
      CHECK(divisor_class_candidates(-n).size() == (std::size_t{1} << (omega + 1)));
      const auto c = divisor_class_candidates(-n);
      CHECK(std::binary_search(c.begin(), c.end(), intmath::squarefree_class(-n)));
    }
  }
}

TEST_CASE("torsor_factorizations") {
  CHECK(torsor_factorizations(140, 5, 0) == std::vector<TorsorProblem>{{5, 0, 28}, {20, 0, 7}});
  CHECK(torsor_factorizations(-35, 35, 0) == std::vector<TorsorProblem>{{35, 0, -1}});
  CHECK(torsor_factorizations(-15, 1, 0) == std::vector<TorsorProblem>{{1, 0, -15}});
  CHECK(torsor_factorizations(140, 1, 0) == std::vector<TorsorProblem>{{1, 0, 140}, {4, 0, 35}});
  CHECK_THROWS_AS(torsor_factorizations(140, -5, 0), std::invalid_argument);
  CHECK_THROWS_AS(torsor_factorizations(140, 3, 0), std::invalid_argument);
  for (const auto& t : torsor_factorizations(-720, -5, 0)) CHECK(t.b1 * t.b2 == -720);
}

TEST_CASE("local_obstruction") {
  CHECK(local_obstruction({35, 0, -1}, 7));
  CHECK(local_obstruction({14, 0, 10}, 16));
  CHECK_THROWS_AS(local_obstruction({1, 0, 1}, 1), std::invalid_argument);
  for (Int m = 2; m <= 200; ++m) CHECK_FALSE(local_obstruction({6, 0, 10}, m));

  SUBCASE("fast path agrees with brute force over residue triples") {
    std::mt19937_64 rng(99);
    for (int i = 0; i < 300; ++i) {
      const Int m = static_cast<Int>(rng() % 30) + 2;
      TorsorProblem t{static_cast<Int>(rng() % 61) - 30, static_cast<Int>(rng() % 11) - 5,
                      static_cast<Int>(rng() % 61) - 30};
      if (t.b1 == 0) t.b1 = 1;
      if (t.b2 == 0) t.b2 = -1;
      CAPTURE(t.b1);
      CAPTURE(t.a);
      CAPTURE(t.b2);
      CAPTURE(m);
      CHECK(local_obstruction(t, m) == local_obstruction_reference(t, m));
    }
    for (Int m : {16, 9, 25, 27, 32}) {
      for (const auto& t : family_torsors(7)) CHECK(local_obstruction(t, m) == local_obstruction_reference(t, m));
      for (const auto& t : family_torsors(3)) CHECK(local_obstruction(t, m) == local_obstruction_reference(t, m));
    }
  }
}

TEST_CASE("local_scan and the default schedule") {
  const auto sched = default_moduli({5, 0, -7}, 50);
  CHECK(std::is_sorted(sched.begin(), sched.end()));
  CHECK(std::count(sched.begin(), sched.end(), 16) == 1);
  CHECK(std::count(sched.begin(), sched.end(), 9) == 1);
  CHECK(std::count(sched.begin(), sched.end(), 47) == 1);
  CHECK(std::count(sched.begin(), sched.end(), 2) == 0);
  CHECK(std::ranges::count(default_moduli({5, 0, 4 * 5827}, 50), 5827) == 1);
  const Int extra[] = {121};
  CHECK(std::ranges::count(default_moduli({1, 0, 1}, 50, extra), 121) == 1);

  CHECK(local_scan({5, 0, -7}, default_moduli({5, 0, -7}, 50)) == 5);
  // Obstructed mod 23 as well, but 5 comes first in the schedule.
  CHECK(local_scan({5, 0, 92}, default_moduli({5, 0, 92}, 50)) == 5);
  CHECK(local_obstruction({5, 0, 92}, 23));
  // (20, 0, 11) forces e odd, which fails mod 16; its sibling (5, 0, 44) is solvable.
  CHECK(local_scan({20, 0, 11}, default_moduli({20, 0, 11}, 50)) == 16);
  CHECK_FALSE(local_scan({5, 0, 44}, default_moduli({5, 0, 44}, 50)));
}

TEST_CASE("global_search") {
  CHECK(global_search({6, 0, 10}, 10) == PrimitiveTriple{4, 1, 1});
  CHECK(global_search({5, 0, 44}, 10) == PrimitiveTriple{7, 1, 1});
  // (14, 1, 2) solves (20, 0, 11) but shares the factor 2 between N, e and b1.
  CHECK_FALSE(global_search({20, 0, 11}, 10));
  CHECK(solves({20, 0, 11}, {14, 1, 2}));
  CHECK_FALSE(validates({20, 0, 11}, {14, 1, 2}));
  CHECK_FALSE(global_search({5, 0, -7}, 1024));
  CHECK_THROWS_AS(global_search({1, 0, 1}, 0), std::invalid_argument);
  CHECK_THROWS_AS(global_search({Int{1} << 62, 0, 1}, 1 << 20), std::overflow_error);

  // Witnesses for E_31.
  CHECK(global_search({5, 0, -31}, 64) == PrimitiveTriple{7, 2, 1});
  CHECK(global_search({5, 0, 124}, 64) == PrimitiveTriple{23, 3, 1});
  // Torsion point (-1, 0) on y^2 = x^3 + 5x^2 + 4x: N = 0 is allowed.
  CHECK(global_search({-1, 5, -4}, 4) == PrimitiveTriple{0, 1, 1});

  SUBCASE("parallel and serial kernels agree with the brute-force box search") {
    for (Int b1 = -20; b1 <= 20; ++b1) {
      for (Int b2 = -20; b2 <= 20; ++b2) {
        if (b1 == 0 || b2 == 0) continue;
        const TorsorProblem t{b1, 0, b2};
        const auto expected = oracle::brute_force_search(t, 50);
        CAPTURE(b1);
        CAPTURE(b2);
        REQUIRE(global_search(t, 50) == expected);
        REQUIRE(global_search_serial(t, 50) == expected);
        if (expected) CHECK(validates(t, *expected));
      }
    }
  }
}

TEST_CASE("solution_to_point and apply_isogeny") {
  const auto p1 = solution_to_point({20, 0, 11}, {14, 1, 2});
  CHECK(p1.x == 5);
  CHECK(p1.y == 35);
  CHECK(on_curve(make_curve(0, 220), p1));

  const auto p2 = solution_to_point({6, 0, 10}, {4, 1, 1});
  CHECK(p2.x == 6);
  CHECK(p2.y == 24);
  CHECK(on_curve(make_curve(0, 60), p2));

  const auto p3 = solution_to_point({1, 0, 3}, {2, 1, 1});
  CHECK(p3.x == 1);
  CHECK(p3.y == 2);
  CHECK_THROWS_AS(solution_to_point({1, 0, 3}, {3, 1, 1}), std::invalid_argument);

  const Curve c220 = make_curve(0, 220);
  CHECK(apply_isogeny(c220, RationalPoint::infinity()).at_infinity);
  const auto img = apply_isogeny(c220, p1);
  CHECK(img.x == 49);
  CHECK(img.y == -273);
  CHECK(on_curve(isogenous(c220), img));

  const Curve c4 = make_curve(0, -4);
  const RationalPoint two_torsion{false, 2, 0};
  const auto t2 = apply_isogeny(c4, two_torsion);
  CHECK_FALSE(t2.at_infinity);
  CHECK(t2.x == 0);
  CHECK(t2.y == 0);
  CHECK(apply_isogeny(c4, RationalPoint{false, 0, 0}).at_infinity);
  CHECK_THROWS_AS(apply_isogeny(c4, RationalPoint{false, 1, 1}), std::invalid_argument);

  SUBCASE("points from random solved torsors land on both curves") {
    std::mt19937_64 rng(5);
    int solved = 0;
    for (int i = 0; i < 400; ++i) {
      const TorsorProblem t{static_cast<Int>(rng() % 81) - 40, static_cast<Int>(rng() % 21) - 10,
                            static_cast<Int>(rng() % 81) - 40};
      if (t.b1 == 0 || t.b2 == 0 || t.a * t.a == 4 * t.b1 * t.b2) continue;
      auto s = global_search(t, 40);
      if (!s) continue;
      ++solved;
      const Curve c = make_curve(t.a, t.b1 * t.b2);
      const auto p = solution_to_point(t, *s);
      CHECK(on_curve(c, p));
      CHECK(on_curve(isogenous(c), apply_isogeny(c, p)));
    }
    CHECK(solved > 20);
  }
}

TEST_CASE("sieve soundness and the rank-zero obstructions") {
  SUBCASE("no solved torsor from the families below 500 is ever obstructed") {
    for (Int p : intmath::primes_up_to(500)) {
      if (p == 2) continue;
      for (const auto& t : family_torsors(p)) {
        auto s = global_search(t, 64);
        if (!s) continue;
        CHECK(validates(t, *s));
        for (Int m : default_moduli(t, 50)) CHECK_FALSE(local_obstruction(t, m));
      }
    }
  }

  SUBCASE("every torsor is obstructed when p = 7, 23 mod 40") {
    for (Int p : intmath::primes_up_to(1000)) {
      if (p % 40 != 7 && p % 40 != 23) continue;
      for (const auto& t : family_torsors(p)) {
        CAPTURE(p);
        CAPTURE(t.b1);
        CHECK(local_scan(t, default_moduli(t, 50)).has_value());
      }
    }
  }
}
