#pragma once

// Exact continued fractions of quadratic irrationals (P + sqrt(D)) / Q.
// Every comparison against sqrt(D) is settled in integers.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

namespace quadsieve::contfrac {

/// (P + sqrt(D)) / Q with Q | D - P^2. The constructor rescales numerator and
/// denominator by |Q| when the divisibility does not already hold.
class QuadraticSurd {
 public:
  QuadraticSurd(mpz_class p, mpz_class q, mpz_class d);

  static QuadraticSurd sqrt(const mpz_class& d) { return {0, 1, d}; }

  const mpz_class& P() const { return p_; }
  const mpz_class& Q() const { return q_; }
  const mpz_class& D() const { return d_; }

  /// (1 + x) / 2
  QuadraticSurd half_shift() const;

  friend bool operator==(const QuadraticSurd&, const QuadraticSurd&) = default;

 private:
  mpz_class p_, q_, d_;
};

/// [preperiod; (period)] with arbitrary-precision partial quotients.
struct CFExpansion {
  std::vector<mpz_class> preperiod;
  std::vector<mpz_class> period;

  /// `a0,...;(a_m,...,a_l)` with decimal coefficients.
  std::string to_string() const;
  /// First `count` partial quotients of the infinite expansion.
  std::vector<mpz_class> terms(std::size_t count) const;

  friend bool operator==(const CFExpansion&, const CFExpansion&) = default;
};

struct Convergent {
  mpz_class p;
  mpz_class q;
};

/// Q_j(x, y) = A x^2 + B x y + C y^2.
struct BGFormCoeffs {
  mpz_class A, B, C;
};

/// Unit (x + y sqrt(D)) / denominator, denominator in {1, 2}.
struct FundamentalUnit {
  mpz_class x;
  mpz_class y;
  int denominator = 1;
  int norm = 1;

  /// Natural logarithm of the unit (> 1).
  double log(const mpz_class& d) const;
};

/// Expansion with period detection on the (P, Q) state. Throws DomainError
/// when D is a perfect square.
CFExpansion expand(const QuadraticSurd& surd);

/// Shortest preperiod and period describing the same sequence.
CFExpansion canonical(const CFExpansion& cf);

/// The surd whose expansion is `cf` (period must be nonempty).
QuadraticSurd surd_from_expansion(const CFExpansion& cf);

/// Convergents p_j/q_j of [t_0; t_1, ..., t_j] for every prefix.
std::vector<Convergent> convergents(std::span<const mpz_class> terms);

/// D(b, s, k) = (4bs+1)^k + (b(4bs+1)^k + s)^2.
mpz_class family_discriminant(std::uint64_t b, std::uint64_t s, unsigned k);

/// Closed-form expansion of sqrt(D(b, s, k)): leading term b tau^k + s,
/// period of length 2k+1 ending in 2b tau^k + 2s.
CFExpansion mcz_expansion(std::uint64_t b, std::uint64_t s, unsigned k);

/// Expansion of (1 + x)/2 from that of x = [a0; (a1..al)] when a0 is even
/// and every a_i (i >= 1) is even and >= 4. Throws PreconditionError
/// naming the offending coefficient otherwise.
CFExpansion half_shift_cf(const CFExpansion& cf);

/// Closed-form expansion of (1 + sqrt(D(b, s, k)))/2 for D = 1 mod 4.
CFExpansion family_half_expansion(std::uint64_t b, std::uint64_t s, unsigned k);

/// Fundamental unit of the maximal order of Q(sqrt(D)), D squarefree.
FundamentalUnit fundamental_unit(const mpz_class& d);

/// Coefficients of Q_j for the expansion of sqrt(D(b, s, k)), 1 <= j <= 2k+1,
/// built from p_j/q_j = [0; a1..aj] and alpha = sqrt(D) - a0.
BGFormCoeffs bg_form_coeffs(std::uint64_t b, std::uint64_t s, unsigned k, std::size_t j);

/// 1/(a_{j+1}+2) <= q_j |p_j - q_j sqrt(D)| <= 1/a_{j+1}, decided exactly.
bool schmidt_bounds_check(const mpz_class& d, std::size_t j);

/// (j, |p_j^2 - D q_j^2|) for the convergents of sqrt(D), 0 <= j < period.
std::vector<std::pair<std::size_t, mpz_class>> norm_values_over_period(const mpz_class& d);

struct CongruenceReport {
  bool ok = true;
  std::string detail;
};

/// Residues mod q (q | b) of the convergents of [0; a1..a_{2k+1}] and of the
/// coefficients A_j, B_j, C_j against their predicted values.
CongruenceReport family_congruences(std::uint64_t b, std::uint64_t s, unsigned k, std::uint64_t q);

}  // namespace quadsieve::contfrac
