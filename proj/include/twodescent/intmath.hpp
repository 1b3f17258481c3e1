// Exact integer kernel used by the descent: gcd, square roots, quadratic
// characters, deterministic primality and factorization, squarefree classes.
//
// Everything operates on signed 64-bit integers. Intermediate products are
// carried in 128 bits; inputs whose results would not fit raise
// std::overflow_error rather than wrapping.

#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace twodescent::intmath {

using Int = std::int64_t;
using Wide = __int128;

Int gcd(Int a, Int b);

/// floor(sqrt(n)); throws std::domain_error for n < 0.
Int isqrt(Int n);
Wide isqrt(Wide n);

/// Non-negative root when n is a perfect square, nullopt otherwise
/// (including every negative n).
std::optional<Int> square_root(Int n);
std::optional<Wide> square_root(Wide n);

inline bool is_perfect_square(Int n) { return square_root(n).has_value(); }

/// Cheap necessary condition for n >= 0 being a square: residue filters
/// modulo 64, 63, 65 and 11. Never rejects a true square.
bool may_be_square(Wide n);

/// Jacobi symbol (a|n) for odd n >= 1; std::domain_error otherwise.
int jacobi(Int a, Int n);

Int mulmod(Int a, Int b, Int m);
Int powmod(Int base, Int exp, Int m);

/// Deterministic for the whole signed 64-bit range (Miller-Rabin with the
/// first twelve prime bases).
bool is_prime(Int n);

struct PrimePower {
  Int prime;
  int exponent;
  bool operator==(const PrimePower&) const = default;
};

struct Factorization {
  int sign = 1;
  std::vector<PrimePower> primes;  // strictly increasing primes

  Int value() const;
  bool operator==(const Factorization&) const = default;
};

/// Sign and prime powers of n; std::domain_error for n == 0.
Factorization factorize(Int n);

/// All positive divisors of |n|, ascending.
std::vector<Int> divisors(const Factorization& f);

/// The squarefree d (same sign as n) with n / d a positive square.
Int squarefree_class(Int n);

/// Product of two squarefree classes, reduced back to a squarefree class.
Int class_product(Int c1, Int c2);

bool is_squarefree(Int n);

/// Primes in [2, limit] in increasing order (sieve of Eratosthenes).
std::vector<Int> primes_up_to(Int limit);

/// Checked helpers; throw std::overflow_error on 64-bit overflow.
Int checked_mul(Int a, Int b);
Int checked_add(Int a, Int b);

}  // namespace twodescent::intmath
