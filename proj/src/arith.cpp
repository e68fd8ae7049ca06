#include "quadsieve/arith.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "quadsieve/errors.hpp"

namespace quadsieve::arith {

Residue Residue::make(std::int64_t v, std::int64_t m) {
  if (m < 2) throw DomainError("residue modulus must be >= 2, got " + std::to_string(m));
  return Residue{mod(v, m), m};
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return -floor_div(-a, b); }

std::int64_t mod(std::int64_t a, std::int64_t m) {
  std::int64_t r = a % m;
  return r < 0 ? r + m : r;
}

std::int64_t mul_mod(std::int64_t a, std::int64_t b, std::int64_t m) {
  return static_cast<std::int64_t>(static_cast<__int128>(mod(a, m)) * mod(b, m) % m);
}

std::int64_t pow_mod(std::int64_t base, std::uint64_t exp, std::int64_t m) {
  std::int64_t result = 1 % m;
  std::int64_t b = mod(base, m);
  while (exp > 0) {
    if (exp & 1U) result = mul_mod(result, b, m);
    b = mul_mod(b, b, m);
    exp >>= 1U;
  }
  return result;
}

std::int64_t gcd(std::int64_t a, std::int64_t b) { return std::gcd(a, b); }

std::int64_t inv_mod(std::int64_t a, std::int64_t m) {
  std::int64_t old_r = mod(a, m), r = m;
  std::int64_t old_s = 1, s = 0;
  while (r != 0) {
    std::int64_t q = old_r / r;
    std::int64_t t = old_r - q * r;
    old_r = r;
    r = t;
    t = old_s - q * s;
    old_s = s;
    s = t;
  }
  if (old_r != 1) {
    throw DomainError(std::to_string(a) + " is not invertible mod " + std::to_string(m));
  }
  return mod(old_s, m);
}

mpz_class isqrt(const mpz_class& n) {
  if (n < 0) throw DomainError("isqrt of a negative number");
  mpz_class r;
  mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
  return r;
}

std::uint64_t isqrt(std::uint64_t n) {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<long double>(n)));
  while (r > 0 && static_cast<unsigned __int128>(r) * r > n) --r;
  while (static_cast<unsigned __int128>(r + 1) * (r + 1) <= n) ++r;
  return r;
}

bool is_square(const mpz_class& n) { return n >= 0 && mpz_perfect_square_p(n.get_mpz_t()) != 0; }

int kronecker(std::int64_t a, std::int64_t n) {
  if (n == 0) return (a == 1 || a == -1) ? 1 : 0;
  int result = 1;
  if (n < 0) {
    n = -n;
    if (a < 0) result = -result;
  }
  // (a/2): 0 for even a, +1 for a = +-1 mod 8, -1 for a = +-3 mod 8
  while (n % 2 == 0) {
    if (a % 2 == 0) return 0;
    n /= 2;
    std::int64_t r8 = mod(a, 8);
    if (r8 == 3 || r8 == 5) result = -result;
  }
  // Jacobi symbol for odd positive n
  std::int64_t x = mod(a, n);
  std::int64_t m = n;
  while (x != 0) {
    while (x % 2 == 0) {
      x /= 2;
      std::int64_t r8 = m % 8;
      if (r8 == 3 || r8 == 5) result = -result;
    }
    std::swap(x, m);
    if (x % 4 == 3 && m % 4 == 3) result = -result;
    x %= m;
  }
  return m == 1 ? result : 0;
}

int kronecker(const mpz_class& a, const mpz_class& n) {
  return mpz_kronecker(a.get_mpz_t(), n.get_mpz_t());
}

bool is_squarefree(std::uint64_t n) {
  if (n == 0) throw DomainError("is_squarefree requires n >= 1");
  if (n > kSquarefreeLimit) {
    throw UnsupportedSizeError("is_squarefree: " + std::to_string(n) + " exceeds the trial-division bound 10^12");
  }
  for (std::uint64_t p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
    if (n % p == 0) {
      n /= p;
      if (n % p == 0) return false;
    }
  }
  return true;
}

bool is_squarefree(const mpz_class& n) {
  if (n < 1) throw DomainError("is_squarefree requires n >= 1");
  if (n > mpz_class(std::to_string(kSquarefreeLimit))) {
    throw UnsupportedSizeError("is_squarefree: " + n.get_str() + " exceeds the trial-division bound 10^12");
  }
  return is_squarefree(static_cast<std::uint64_t>(n.get_ui()));
}

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
    if (n % p == 0) return false;
  }
  return true;
}

std::vector<std::uint64_t> prime_divisors(std::uint64_t n) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
    if (n % p == 0) {
      out.push_back(p);
      while (n % p == 0) n /= p;
    }
  }
  if (n > 1) out.push_back(n);
  return out;
}

std::uint64_t euler_phi(std::uint64_t n) {
  std::uint64_t result = n;
  for (auto p : prime_divisors(n)) result = result / p * (p - 1);
  return result;
}

std::uint64_t multiplicative_order(std::int64_t a, std::int64_t m) {
  if (gcd(mod(a, m), m) != 1) throw DomainError("multiplicative_order: not a unit");
  std::uint64_t order = euler_phi(static_cast<std::uint64_t>(m));
  for (auto p : prime_divisors(order)) {
    while (order % p == 0 && pow_mod(a, order / p, m) == 1) order /= p;
  }
  return order;
}

std::uint64_t discrete_log(std::int64_t g, std::int64_t a, std::int64_t m) {
  if (m < 2) throw DomainError("discrete_log: modulus must be >= 2");
  a = mod(a, m);
  if (gcd(a, m) != 1) {
    throw DomainError("discrete_log: gcd(" + std::to_string(a) + ", " + std::to_string(m) + ") > 1");
  }
  std::int64_t x = 1 % m;
  const std::int64_t gm = mod(g, m);
  for (std::uint64_t b = 0;; ++b) {
    if (x == a) return b;
    x = mul_mod(x, gm, m);
    if (x == 1 % m || b > static_cast<std::uint64_t>(m)) break;
  }
  throw NoSolutionError("discrete_log: " + std::to_string(a) + " is not a power of " + std::to_string(g) +
                        " mod " + std::to_string(m));
}

Residue crt_combine(std::span<const Residue> constraints) {
  if (constraints.empty()) throw DomainError("crt_combine: empty constraint list");
  __int128 value = constraints.front().value;
  __int128 modulus = constraints.front().modulus;
  for (const auto& c : constraints.subspan(1)) {
    // solve x = value (modulus), x = c.value (c.modulus)
    const auto g = static_cast<std::int64_t>(std::gcd(static_cast<std::int64_t>(modulus), c.modulus));
    const __int128 diff = static_cast<__int128>(c.value) - value;
    if (diff % g != 0) {
      throw InconsistencyError("crt_combine: " + std::to_string(c.value) + " mod " + std::to_string(c.modulus) +
                               " contradicts earlier constraints");
    }
    const std::int64_t m2 = c.modulus / g;
    const auto m1 = static_cast<std::int64_t>(modulus / g);
    const std::int64_t t = m2 == 1 ? 0 : mul_mod(static_cast<std::int64_t>((diff / g) % m2), inv_mod(m1 % m2, m2), m2);
    value += modulus * t;
    modulus *= m2;
    value %= modulus;
    if (modulus > static_cast<__int128>(INT64_MAX)) throw UnsupportedSizeError("crt_combine: modulus overflow");
  }
  return Residue::make(static_cast<std::int64_t>(value), static_cast<std::int64_t>(modulus));
}

}  // namespace quadsieve::arith
