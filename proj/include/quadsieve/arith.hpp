#pragma once

// Exact integer primitives shared by the sieve, the continued-fraction engine
// and the class-number oracles. Residue arithmetic stays in 64-bit words;
// anything that grows with tau^k uses mpz_class.

#include <cstdint>
#include <span>
#include <vector>

#include <gmpxx.h>

namespace quadsieve::arith {

/// A residue class value mod modulus with 0 <= value < modulus.
struct Residue {
  std::int64_t value = 0;
  std::int64_t modulus = 2;

  /// Reduces `v` into [0, m). Throws DomainError when m < 2.
  static Residue make(std::int64_t v, std::int64_t m);

  friend bool operator==(const Residue&, const Residue&) = default;
};

/// Floor division and non-negative remainder for a positive divisor.
std::int64_t floor_div(std::int64_t a, std::int64_t b);
std::int64_t ceil_div(std::int64_t a, std::int64_t b);
std::int64_t mod(std::int64_t a, std::int64_t m);

std::int64_t mul_mod(std::int64_t a, std::int64_t b, std::int64_t m);
std::int64_t pow_mod(std::int64_t base, std::uint64_t exp, std::int64_t m);

/// Inverse of a modulo m; throws DomainError when gcd(a, m) != 1.
std::int64_t inv_mod(std::int64_t a, std::int64_t m);

std::int64_t gcd(std::int64_t a, std::int64_t b);

/// floor(sqrt(n)) for arbitrary-precision n >= 0.
mpz_class isqrt(const mpz_class& n);
std::uint64_t isqrt(std::uint64_t n);

bool is_square(const mpz_class& n);

/// Kronecker symbol (a/n). (a/0) is 1 for a = +-1 and 0 otherwise.
int kronecker(std::int64_t a, std::int64_t n);
int kronecker(const mpz_class& a, const mpz_class& n);

/// Largest input accepted by the trial-division squarefree test.
inline constexpr std::uint64_t kSquarefreeLimit = 1'000'000'000'000ULL;

/// True iff no prime square divides n. Trial division up to sqrt(n);
/// throws UnsupportedSizeError above kSquarefreeLimit.
bool is_squarefree(std::uint64_t n);
bool is_squarefree(const mpz_class& n);

bool is_prime(std::uint64_t n);

/// Distinct prime divisors in increasing order (trial division).
std::vector<std::uint64_t> prime_divisors(std::uint64_t n);

/// Euler phi by trial division.
std::uint64_t euler_phi(std::uint64_t n);

/// Multiplicative order of a mod m (gcd(a, m) must be 1).
std::uint64_t multiplicative_order(std::int64_t a, std::int64_t m);

/// Smallest b >= 0 with g^b == a (mod m), by enumeration of <g>.
/// Throws DomainError if gcd(a, m) > 1 and NoSolutionError if a is not
/// in the subgroup generated by g.
std::uint64_t discrete_log(std::int64_t g, std::int64_t a, std::int64_t m);

/// Combines congruences into a single residue modulo the lcm of moduli.
/// Inconsistent constraints throw InconsistencyError.
Residue crt_combine(std::span<const Residue> constraints);

}  // namespace quadsieve::arith
