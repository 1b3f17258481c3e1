// Descent via 2-isogeny for curves y^2 = x^3 + a x^2 + b x.
//
// A squarefree class d lies in the image of a descent map exactly when some
// quartic torsor N^2 = b1 M^4 + a M^2 e^2 + b2 e^4 with b1 b2 equal to the
// curve's x-coefficient and b1 in class d has a primitive integer solution
// (M, e nonzero and gcd(N,e) = gcd(M,e) = gcd(b1,e) = gcd(b2,M) = gcd(M,N) = 1).
//
// Insolvability is certified by congruence obstructions modulo prime powers;
// solvability by a bounded search over (M, e).

#pragma once

#include <gmpxx.h>

#include <compare>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "twodescent/intmath.hpp"

namespace twodescent::descent {

using intmath::Int;

/// y^2 = x^3 + a x^2 + b x with b != 0 and a^2 - 4b != 0.
class Curve {
 public:
  Curve(Int a, Int b);

  Int a() const { return a_; }
  Int b() const { return b_; }
  /// a^2 - 4b, the x-coefficient of the isogenous curve.
  Int isogenous_coefficient() const { return bbar_; }

  auto operator<=>(const Curve&) const = default;

 private:
  Int a_;
  Int b_;
  Int bbar_;
};

Curve make_curve(Int a, Int b);

/// y^2 = x^3 - 2a x^2 + (a^2 - 4b) x.
Curve isogenous(const Curve& c);

struct TorsorProblem {
  Int b1;
  Int a;
  Int b2;
  auto operator<=>(const TorsorProblem&) const = default;
};

struct PrimitiveTriple {
  Int N;
  Int M;
  Int e;
  auto operator<=>(const PrimitiveTriple&) const = default;
};

/// The torsor equation alone, with M and e nonzero.
bool solves(const TorsorProblem& t, const PrimitiveTriple& s);

/// Exact check of the torsor equation and all five gcd conditions.
bool validates(const TorsorProblem& t, const PrimitiveTriple& s);

struct ObstructedAt {
  Int modulus;
  bool operator==(const ObstructedAt&) const = default;
};
struct Solved {
  PrimitiveTriple triple;
  bool operator==(const Solved&) const = default;
};
struct Unresolved {
  Int search_bound;
  bool operator==(const Unresolved&) const = default;
};
using SolvabilityVerdict = std::variant<ObstructedAt, Solved, Unresolved>;

/// Squarefree classes of all divisors of `coefficient`, both signs, sorted.
///
/// When both b1 and b2 are negative the torsor's right-hand side is negative
/// for every real (M, e) unless the middle term can dominate, i.e. unless
/// middle > 0 and middle^2 > 4 * coefficient. Negative classes of a positive
/// coefficient are dropped exactly when that cannot happen; with the default
/// middle = 0 they are always dropped.
std::vector<Int> divisor_class_candidates(Int coefficient, Int middle = 0);

/// Every b1 | coefficient (either sign) whose squarefree class is `cls`,
/// paired with b2 = coefficient / b1, ordered by |b1| then sign.
std::vector<TorsorProblem> torsor_factorizations(Int coefficient, Int cls, Int a);

/// True iff no residue triple modulo m satisfies the torsor congruence
/// together with the reduced primitivity constraints at every prime q | m.
/// Evaluated per prime-power component of m; O(m) per component.
bool local_obstruction(const TorsorProblem& t, Int m);

/// Brute-force O(m^3) version of local_obstruction over all residue triples.
bool local_obstruction_reference(const TorsorProblem& t, Int m);

/// Components above this size are skipped by the default schedule.
inline constexpr Int kMaxScheduledModulus = Int{1} << 22;

/// {16, 9, 25} + odd primes <= small_prime_bound + odd primes dividing
/// b1 * b2 or a + extra, deduplicated and ascending.
std::vector<Int> default_moduli(const TorsorProblem& t, Int small_prime_bound,
                                std::span<const Int> extra = {});

std::optional<Int> local_scan(const TorsorProblem& t, std::span<const Int> moduli);

/// First primitive solution with 1 <= M, e <= bound, in order of increasing
/// M + e then increasing M. Diagonals are searched in parallel blocks.
std::optional<PrimitiveTriple> global_search(const TorsorProblem& t, Int bound);

/// Single-threaded reference for global_search; same ordering and result.
std::optional<PrimitiveTriple> global_search_serial(const TorsorProblem& t, Int bound);

struct RationalPoint {
  bool at_infinity = false;
  mpq_class x;
  mpq_class y;

  static RationalPoint infinity() { return RationalPoint{true, 0, 0}; }
  bool operator==(const RationalPoint& o) const {
    return at_infinity == o.at_infinity && (at_infinity || (x == o.x && y == o.y));
  }
};

bool on_curve(const Curve& c, const RationalPoint& p);

/// (b1 M^2 / e^2, b1 N M / e^3) on y^2 = x^3 + a x^2 + b1 b2 x. Needs only
/// solves(t, s); primitivity is not required for the point to exist.
RationalPoint solution_to_point(const TorsorProblem& t, const PrimitiveTriple& s);

/// The 2-isogeny (x, y) -> (y^2/x^2, y (x^2 - b) / x^2) onto isogenous(c).
RationalPoint apply_isogeny(const Curve& c, const RationalPoint& p);

}  // namespace twodescent::descent
