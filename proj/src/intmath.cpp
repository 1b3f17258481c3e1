#include "twodescent/intmath.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace twodescent::intmath {

namespace {

using UWide = unsigned __int128;

constexpr Int kTrialLimit = 1 << 12;

template <std::size_t M>
constexpr std::array<bool, M> square_table() {
  std::array<bool, M> t{};
  for (std::size_t x = 0; x < M; ++x) t[(x * x) % M] = true;
  return t;
}

constexpr auto kSq64 = square_table<64>();
constexpr auto kSq63 = square_table<63>();
constexpr auto kSq65 = square_table<65>();
constexpr auto kSq11 = square_table<11>();

Int abs_checked(Int n) {
  if (n == std::numeric_limits<Int>::min())
    throw std::overflow_error("intmath: |INT64_MIN| is not representable");
  return n < 0 ? -n : n;
}

UWide isqrt_unsigned(UWide n) {
  if (n == 0) return 0;
  auto r = static_cast<UWide>(std::sqrt(static_cast<long double>(n)));
  // long double carries 64 mantissa bits; fix the estimate up or down.
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

bool miller_rabin_witness(Int n, Int a, Int d, int s) {
  Int x = powmod(a % n, d, n);
  if (x == 1 || x == n - 1) return false;
  for (int i = 1; i < s; ++i) {
    x = mulmod(x, x, n);
    if (x == n - 1) return false;
  }
  return true;
}

// Brent's variant of Pollard rho; n is odd, composite, > 1.
Int pollard_brent(Int n) {
  for (Int c = 1;; ++c) {
    Int y = 2, g = 1, q = 1, x = 0, ys = 0;
    Int r = 1;
    constexpr Int block = 128;
    auto f = [&](Int v) { return (mulmod(v, v, n) + c) % n; };
    do {
      x = y;
      for (Int i = 0; i < r; ++i) y = f(y);
      Int k = 0;
      do {
        ys = y;
        for (Int i = 0; i < std::min(block, r - k); ++i) {
          y = f(y);
          q = mulmod(q, x > y ? x - y : y - x, n);
        }
        g = gcd(q, n);
        k += block;
      } while (k < r && g == 1);
      r *= 2;
    } while (g == 1);
    if (g == n) {
      do {
        ys = f(ys);
        g = gcd(x > ys ? x - ys : ys - x, n);
      } while (g == 1);
    }
    if (g != n) return g;
  }
}

void factor_into(Int n, std::vector<Int>& out) {
  if (n == 1) return;
  if (is_prime(n)) {
    out.push_back(n);
    return;
  }
  Int d = pollard_brent(n);
  factor_into(d, out);
  factor_into(n / d, out);
}

}  // namespace

Int gcd(Int a, Int b) {
  a = abs_checked(a);
  b = abs_checked(b);
  while (b != 0) {
    Int t = a % b;
    a = b;
    b = t;
  }
  return a;
}

Int isqrt(Int n) {
  if (n < 0) throw std::domain_error("isqrt: negative argument");
  return static_cast<Int>(isqrt_unsigned(static_cast<UWide>(n)));
}

Wide isqrt(Wide n) {
  if (n < 0) throw std::domain_error("isqrt: negative argument");
  return static_cast<Wide>(isqrt_unsigned(static_cast<UWide>(n)));
}

std::optional<Int> square_root(Int n) {
  if (n < 0 || !may_be_square(n)) return std::nullopt;
  Int r = isqrt(n);
  if (static_cast<Wide>(r) * r != n) return std::nullopt;
  return r;
}

std::optional<Wide> square_root(Wide n) {
  if (n < 0 || !may_be_square(n)) return std::nullopt;
  auto r = isqrt_unsigned(static_cast<UWide>(n));
  if (r * r != static_cast<UWide>(n)) return std::nullopt;
  return static_cast<Wide>(r);
}

bool may_be_square(Wide n) {
  if (n < 0) return false;
  auto u = static_cast<UWide>(n);
  return kSq64[static_cast<unsigned>(u & 63)] &&
         kSq63[static_cast<unsigned>(u % 63)] &&
         kSq65[static_cast<unsigned>(u % 65)] &&
         kSq11[static_cast<unsigned>(u % 11)];
}

int jacobi(Int a, Int n) {
  if (n <= 0 || n % 2 == 0)
    throw std::domain_error("jacobi: modulus must be odd and positive");
  a %= n;
  if (a < 0) a += n;
  int result = 1;
  while (a != 0) {
    while (a % 2 == 0) {
      a /= 2;
      Int r = n % 8;
      if (r == 3 || r == 5) result = -result;
    }
    std::swap(a, n);
    if (a % 4 == 3 && n % 4 == 3) result = -result;
    a %= n;
  }
  return n == 1 ? result : 0;
}

Int mulmod(Int a, Int b, Int m) {
  Wide r = static_cast<Wide>(a) * b % m;
  if (r < 0) r += m;
  return static_cast<Int>(r);
}

Int powmod(Int base, Int exp, Int m) {
  if (m == 1) return 0;
  Int result = 1;
  base %= m;
  if (base < 0) base += m;
  while (exp > 0) {
    if (exp & 1) result = mulmod(result, base, m);
    base = mulmod(base, base, m);
    exp >>= 1;
  }
  return result;
}

bool is_prime(Int n) {
  if (n < 2) return false;
  static constexpr std::array<Int, 12> bases{2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  for (Int p : bases) {
    if (n % p == 0) return n == p;
  }
  if (n < 41 * 41) return true;
  Int d = n - 1;
  int s = 0;
  while (d % 2 == 0) {
    d /= 2;
    ++s;
  }
  for (Int a : bases) {
    if (miller_rabin_witness(n, a, d, s)) return false;
  }
  return true;
}

Int Factorization::value() const {
  Int v = sign;
  for (const auto& [p, k] : primes)
    for (int i = 0; i < k; ++i) v = checked_mul(v, p);
  return v;
}

Factorization factorize(Int n) {
  if (n == 0) throw std::domain_error("factorize: zero has no factorization");
  Factorization f;
  f.sign = n < 0 ? -1 : 1;
  // Work on the magnitude in unsigned form so INT64_MIN factors as -2^63.
  auto m = n < 0 ? ~static_cast<std::uint64_t>(n) + 1 : static_cast<std::uint64_t>(n);
  auto take = [&](std::uint64_t p) {
    int k = 0;
    while (m % p == 0) {
      m /= p;
      ++k;
    }
    if (k > 0) f.primes.push_back({static_cast<Int>(p), k});
  };
  take(2);
  for (std::uint64_t p = 3; p <= static_cast<std::uint64_t>(kTrialLimit) && p * p <= m; p += 2)
    take(p);
  if (m > 1) {
    std::vector<Int> rest;
    factor_into(static_cast<Int>(m), rest);
    std::sort(rest.begin(), rest.end());
    for (Int p : rest) {
      if (!f.primes.empty() && f.primes.back().prime == p)
        ++f.primes.back().exponent;
      else
        f.primes.push_back({p, 1});
    }
  }
  return f;
}

std::vector<Int> divisors(const Factorization& f) {
  std::vector<Int> out{1};
  for (const auto& [p, k] : f.primes) {
    const std::size_t n = out.size();
    Int pk = 1;
    for (int i = 1; i <= k; ++i) {
      pk = checked_mul(pk, p);
      for (std::size_t j = 0; j < n; ++j) out.push_back(checked_mul(out[j], pk));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

Int squarefree_class(Int n) {
  auto f = factorize(n);
  Int d = f.sign;
  for (const auto& [p, k] : f.primes)
    if (k % 2 == 1) d *= p;
  return d;
}

Int class_product(Int c1, Int c2) {
  Int g = gcd(c1, c2);
  return checked_mul(c1 / g, c2 / g);
}

bool is_squarefree(Int n) {
  if (n == 0) return false;
  for (const auto& pp : factorize(n).primes)
    if (pp.exponent > 1) return false;
  return true;
}

std::vector<Int> primes_up_to(Int limit) {
  std::vector<Int> out;
  if (limit < 2) return out;
  std::vector<bool> composite(static_cast<std::size_t>(limit) + 1, false);
  for (Int i = 2; i <= limit; ++i) {
    if (composite[i]) continue;
    out.push_back(i);
    for (Int j = i * i; j <= limit; j += i) composite[j] = true;
  }
  return out;
}

Int checked_mul(Int a, Int b) {
  Int r;
  if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("intmath: product overflows int64");
  return r;
}

Int checked_add(Int a, Int b) {
  Int r;
  if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("intmath: sum overflows int64");
  return r;
}

}  // namespace twodescent::intmath
