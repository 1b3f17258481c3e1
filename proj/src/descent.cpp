#include "twodescent/descent.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

namespace twodescent::descent {

using intmath::checked_add;
using intmath::checked_mul;
using intmath::Wide;

Curve::Curve(Int a, Int b) : a_(a), b_(b), bbar_(0) {
  if (b == 0) throw std::invalid_argument("curve: coefficient b must be nonzero");
  bbar_ = checked_add(checked_mul(a, a), checked_mul(-4, b));
  if (bbar_ == 0) throw std::invalid_argument("curve: a^2 - 4b = 0 gives a singular curve");
}

Curve make_curve(Int a, Int b) { return Curve(a, b); }

Curve isogenous(const Curve& c) {
  return Curve(checked_mul(-2, c.a()), c.isogenous_coefficient());
}

namespace {

Wide torsor_value(const TorsorProblem& t, Int M, Int e) {
  const Wide m2 = static_cast<Wide>(M) * M;
  const Wide e2 = static_cast<Wide>(e) * e;
  return t.b1 * m2 * m2 + t.a * m2 * e2 + t.b2 * e2 * e2;
}

bool primitive(const TorsorProblem& t, Int N, Int M, Int e) {
  using intmath::gcd;
  return gcd(N, e) == 1 && gcd(M, e) == 1 && gcd(t.b1, e) == 1 && gcd(t.b2, M) == 1 &&
         gcd(M, N) == 1;
}

// The search evaluates up to 3 * max|coef| * bound^4; keep it well inside
// 128 bits so N fits in 64.
void check_search_range(const TorsorProblem& t, Int bound) {
  if (bound < 1) throw std::invalid_argument("global_search: bound must be >= 1");
  const long double coef = std::max({std::fabs(static_cast<long double>(t.b1)),
                                     std::fabs(static_cast<long double>(t.a)),
                                     std::fabs(static_cast<long double>(t.b2))});
  const long double top = 3.0L * coef * std::pow(static_cast<long double>(bound), 4.0L);
  if (top >= std::ldexp(1.0L, 124))
    throw std::overflow_error("global_search: coefficients too large for this bound");
}

std::optional<PrimitiveTriple> search_diagonal(const TorsorProblem& t, Int sum, Int bound) {
  const Int lo = std::max<Int>(1, sum - bound);
  const Int hi = std::min<Int>(bound, sum - 1);
  for (Int M = lo; M <= hi; ++M) {
    const Int e = sum - M;
    const Wide r = torsor_value(t, M, e);
    if (r < 0 || !intmath::may_be_square(r)) continue;
    if (intmath::gcd(M, e) != 1) continue;
    auto root = intmath::square_root(r);
    if (!root) continue;
    const auto N = static_cast<Int>(*root);
    if (primitive(t, N, M, e)) return PrimitiveTriple{N, M, e};
  }
  return std::nullopt;
}

struct Residues {
  std::vector<char> square;       // x is some y^2 mod m
  std::vector<char> unit_square;  // x is y^2 mod m with q not dividing y
};

Residues residue_tables(Int q, Int m) {
  Residues r{std::vector<char>(m, 0), std::vector<char>(m, 0)};
  for (Int y = 0; y < m; ++y) {
    const Int s = intmath::mulmod(y, y, m);
    r.square[s] = 1;
    if (y % q != 0) r.unit_square[s] = 1;
  }
  return r;
}

Int reduce(Int v, Int m) {
  Int r = v % m;
  return r < 0 ? r + m : r;
}

// Admissible triples are closed under (N, M, e) -> (u^2 N, u M, u e) for
// units u, and at least one of M, e is a unit mod q. So it suffices to try
// e = 1 with every M, and M = 1 with every non-unit e.
bool obstructed_prime_power(const TorsorProblem& t, Int q, Int m) {
  const Int b1 = reduce(t.b1, m), a = reduce(t.a, m), b2 = reduce(t.b2, m);
  const bool q_divides_b1 = t.b1 % q == 0;
  const bool q_divides_b2 = t.b2 % q == 0;
  const Residues tables = residue_tables(q, m);
  auto rhs = [&](Int M, Int e) {
    const Int m2 = intmath::mulmod(M, M, m), e2 = intmath::mulmod(e, e, m);
    Int v = intmath::mulmod(b1, intmath::mulmod(m2, m2, m), m);
    v = (v + intmath::mulmod(a, intmath::mulmod(m2, e2, m), m)) % m;
    return (v + intmath::mulmod(b2, intmath::mulmod(e2, e2, m), m)) % m;
  };

  for (Int M = 0; M < m; ++M) {
    const bool M_unit = M % q != 0;
    if (!M_unit && q_divides_b2) continue;
    const Int v = rhs(M, 1);
    if (M_unit ? tables.square[v] : tables.unit_square[v]) return false;
  }
  if (!q_divides_b1) {
    for (Int e = 0; e < m; e += q) {
      if (tables.unit_square[rhs(1, e)]) return false;
    }
  }
  return true;
}

}  // namespace

bool solves(const TorsorProblem& t, const PrimitiveTriple& s) {
  if (s.M == 0 || s.e == 0) return false;
  return static_cast<Wide>(s.N) * s.N == torsor_value(t, s.M, s.e);
}

bool validates(const TorsorProblem& t, const PrimitiveTriple& s) {
  return solves(t, s) && primitive(t, s.N, s.M, s.e);
}

std::vector<Int> divisor_class_candidates(Int coefficient, Int middle) {
  if (coefficient == 0) throw std::invalid_argument("divisor_class_candidates: zero coefficient");
  const auto f = intmath::factorize(coefficient);
  const bool real_negative_pair =
      middle > 0 && static_cast<Wide>(middle) * middle > static_cast<Wide>(4) * coefficient;
  const bool keep_negative = coefficient < 0 || real_negative_pair;

  // Classes are products of subsets of the distinct primes, times a sign.
  std::vector<Int> classes{1};
  for (const auto& pp : f.primes) {
    const std::size_t n = classes.size();
    for (std::size_t i = 0; i < n; ++i) classes.push_back(classes[i] * pp.prime);
  }
  if (keep_negative) {
    const std::size_t n = classes.size();
    for (std::size_t i = 0; i < n; ++i) classes.push_back(-classes[i]);
  }
  std::sort(classes.begin(), classes.end());
  return classes;
}

std::vector<TorsorProblem> torsor_factorizations(Int coefficient, Int cls, Int a) {
  const auto candidates = divisor_class_candidates(coefficient, a);
  if (!std::binary_search(candidates.begin(), candidates.end(), cls))
    throw std::invalid_argument("torsor_factorizations: class " + std::to_string(cls) +
                                " is not a candidate for " + std::to_string(coefficient));
  std::vector<TorsorProblem> out;
  for (Int d : intmath::divisors(intmath::factorize(coefficient))) {
    for (Int b1 : {d, -d}) {
      if (intmath::squarefree_class(b1) == cls) out.push_back({b1, a, coefficient / b1});
    }
  }
  return out;
}

bool local_obstruction(const TorsorProblem& t, Int m) {
  if (m < 2) throw std::invalid_argument("local_obstruction: modulus must be >= 2");
  // Constraints are per prime, so by CRT a solution mod m exists iff one
  // exists modulo each prime-power component.
  for (const auto& [q, k] : intmath::factorize(m).primes) {
    Int qk = 1;
    for (int i = 0; i < k; ++i) qk *= q;
    if (obstructed_prime_power(t, q, qk)) return true;
  }
  return false;
}

bool local_obstruction_reference(const TorsorProblem& t, Int m) {
  if (m < 2) throw std::invalid_argument("local_obstruction: modulus must be >= 2");
  std::vector<Int> primes;
  for (const auto& pp : intmath::factorize(m).primes) primes.push_back(pp.prime);
  auto divides = [](Int q, Int v) { return v % q == 0; };
  for (Int N = 0; N < m; ++N) {
    for (Int M = 0; M < m; ++M) {
      for (Int e = 0; e < m; ++e) {
        bool ok = true;
        for (Int q : primes) {
          const bool qM = divides(q, M), qe = divides(q, e), qN = divides(q, N);
          if ((qM && qe) || (qN && qM) || (qN && qe) || (divides(q, t.b1) && qe) ||
              (divides(q, t.b2) && qM)) {
            ok = false;
            break;
          }
        }
        if (!ok) continue;
        const Wide lhs = static_cast<Wide>(N) * N;
        if ((lhs - torsor_value(t, M, e)) % m == 0) return false;
      }
    }
  }
  return true;
}

std::vector<Int> default_moduli(const TorsorProblem& t, Int small_prime_bound,
                                std::span<const Int> extra) {
  std::set<Int> moduli{16, 9, 25};
  for (Int q : intmath::primes_up_to(small_prime_bound))
    if (q > 2) moduli.insert(q);
  for (Int v : {t.b1, t.b2, t.a}) {
    if (v == 0) continue;
    for (const auto& pp : intmath::factorize(v).primes)
      if (pp.prime > 2 && pp.prime <= kMaxScheduledModulus) moduli.insert(pp.prime);
  }
  for (Int m : extra)
    if (m >= 2 && m <= kMaxScheduledModulus) moduli.insert(m);
  return {moduli.begin(), moduli.end()};
}

std::optional<Int> local_scan(const TorsorProblem& t, std::span<const Int> moduli) {
  for (Int m : moduli)
    if (local_obstruction(t, m)) return m;
  return std::nullopt;
}

std::optional<PrimitiveTriple> global_search(const TorsorProblem& t, Int bound) {
  check_search_range(t, bound);
  const Int last = 2 * bound;
  Int block = 8;
  for (Int first = 2; first <= last;) {
    const Int end = std::min(last + 1, first + block);
    std::vector<std::optional<PrimitiveTriple>> hits(static_cast<std::size_t>(end - first));
#pragma omp parallel for schedule(dynamic, 1)
    for (Int sum = first; sum < end; ++sum) hits[sum - first] = search_diagonal(t, sum, bound);
    for (const auto& h : hits)
      if (h) return h;
    first = end;
    block = std::min<Int>(block * 2, 256);
  }
  return std::nullopt;
}

std::optional<PrimitiveTriple> global_search_serial(const TorsorProblem& t, Int bound) {
  check_search_range(t, bound);
  for (Int sum = 2; sum <= 2 * bound; ++sum) {
    for (Int M = std::max<Int>(1, sum - bound); M <= std::min<Int>(bound, sum - 1); ++M) {
      const Int e = sum - M;
      const auto root = intmath::square_root(torsor_value(t, M, e));
      if (root && primitive(t, static_cast<Int>(*root), M, e))
        return PrimitiveTriple{static_cast<Int>(*root), M, e};
    }
  }
  return std::nullopt;
}

bool on_curve(const Curve& c, const RationalPoint& p) {
  if (p.at_infinity) return true;
  const mpq_class& x = p.x;
  return p.y * p.y == x * x * x + mpq_class(c.a()) * x * x + mpq_class(c.b()) * x;
}

RationalPoint solution_to_point(const TorsorProblem& t, const PrimitiveTriple& s) {
  if (!solves(t, s)) throw std::invalid_argument("solution_to_point: triple does not solve torsor");
  const mpz_class b1(t.b1), N(s.N), M(s.M), e(s.e);
  RationalPoint p;
  p.x = mpq_class(b1 * M * M, e * e);
  p.y = mpq_class(b1 * N * M, e * e * e);
  p.x.canonicalize();
  p.y.canonicalize();
  return p;
}

RationalPoint apply_isogeny(const Curve& c, const RationalPoint& p) {
  if (!on_curve(c, p)) throw std::invalid_argument("apply_isogeny: point is not on the curve");
  if (p.at_infinity || p.x == 0) return RationalPoint::infinity();
  const mpq_class x2 = p.x * p.x;
  RationalPoint img;
  img.x = p.y * p.y / x2;
  img.y = p.y * (x2 - mpq_class(c.b())) / x2;
  return img;
}

}  // namespace twodescent::descent
