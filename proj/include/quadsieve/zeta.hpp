#pragma once

// Complex-valued companions of the mod-r character sums. Character values
// are kept as exponents of a fixed root of unity, so every finite sum is an
// exact element of Z[zeta_L] until the final evaluation at a chosen MPFR
// precision. Only L(2, .) is an infinite series and carries a tail bound.

#include <cstdint>
#include <mutex>
#include <string>
#include <vector>

#include <boost/multiprecision/mpfr.hpp>
#include <gmpxx.h>

#include "quadsieve/charmod.hpp"

namespace quadsieve::zeta {

using Real = boost::multiprecision::mpfr_float;

inline constexpr unsigned kDefaultPrecisionBits = 256;

/// Holds a process-wide lock and sets the MPFR default precision for the
/// lifetime of the object. Boost keeps that default in a single static.
class PrecisionScope {
 public:
  explicit PrecisionScope(unsigned bits);
  ~PrecisionScope();
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

  static unsigned digits10_for(unsigned bits);

 private:
  std::unique_lock<std::recursive_mutex> lock_;
  unsigned saved_;
};

struct ComplexValue {
  Real re;
  Real im;
  unsigned precision = kDefaultPrecisionBits;
  Real error_bound;

  Real abs() const;
  /// `re im error_bound` in scientific notation with `digits` significant digits.
  std::string to_string(int digits = 30) const;
};

/// chi(generator) = exp(2 pi i exponent / order).
struct ExactComponent {
  std::int64_t modulus = 0;
  std::int64_t generator = 0;
  std::int64_t exponent = 0;
  std::int64_t order = 0;
};

/// Element sum_k c_k zeta_L^k of Z[zeta_L], stored modulo x^L - 1.
class Cyclotomic {
 public:
  explicit Cyclotomic(std::int64_t order);

  std::int64_t order() const { return order_; }
  const std::vector<mpz_class>& coeffs() const { return c_; }

  void add(std::int64_t k, const mpz_class& v);
  Cyclotomic& operator+=(const Cyclotomic& o);
  Cyclotomic& operator-=(const Cyclotomic& o);
  Cyclotomic& operator*=(const mpz_class& v);
  friend Cyclotomic operator*(const Cyclotomic& x, const Cyclotomic& y);

  /// Coordinates in the power basis 1, z, ..., z^(phi(L)-1) of Q(zeta_L).
  std::vector<mpz_class> power_basis() const;
  bool is_zero() const;

  /// Complex value with a bound covering the rounding of every term.
  ComplexValue evaluate(unsigned bits) const;

 private:
  std::int64_t order_;
  std::vector<mpz_class> c_;
};

/// Integer coefficients of the cyclotomic polynomial Phi_n, lowest degree first.
std::vector<mpz_class> cyclotomic_polynomial(std::int64_t n);

/// Solves y * x = z in Q(zeta_L). `ok` is false when y = 0.
struct QuotientResult {
  bool ok = false;
  std::vector<mpq_class> coords;  // power basis
  bool integral() const;
};
QuotientResult divide(const Cyclotomic& z, const Cyclotomic& y);

class CharacterExact {
 public:
  /// Validates the components (cyclic unit groups, coprime moduli,
  /// order | phi(modulus) * exponent) and tabulates exponents on [0, q).
  CharacterExact(std::string label, std::int64_t conductor, std::vector<ExactComponent> components);

  /// The complex sibling of a mod-r character: each image is written as a
  /// power of the configured root of unity. Throws PreconditionError when
  /// the character has no root entry.
  static CharacterExact from_mod_i(const charmod::CharacterModI& chi);

  const std::string& label() const { return label_; }
  std::int64_t conductor() const { return q_; }
  const std::vector<ExactComponent>& components() const { return comps_; }
  /// L with chi(a) = zeta_L^index(a).
  std::int64_t root_order() const { return L_; }
  /// Order of chi as a group element.
  std::int64_t order() const;
  /// -1 when gcd(a, q) > 1.
  std::int64_t index(std::int64_t a) const { return table_[static_cast<std::size_t>(((a % q_) + q_) % q_)]; }

  bool is_odd() const;
  bool is_primitive() const;

 private:
  std::string label_;
  std::int64_t q_;
  std::vector<ExactComponent> comps_;
  std::int64_t L_ = 1;
  std::vector<std::int64_t> table_;
};

ComplexValue evaluate_exact(const CharacterExact& chi, std::int64_t a, unsigned bits = kDefaultPrecisionBits);

/// Image of chi(a) under zeta_L -> root residue mod r.
std::int64_t reduce_mod_r(const CharacterExact& chi, std::int64_t a, std::int64_t root_residue, std::int64_t r);

/// sum_{a=1}^{q} a chi(a).
Cyclotomic m_exact(const CharacterExact& chi);
/// A_chi(a) with exact character values.
Cyclotomic a_exact(const CharacterExact& chi, std::int64_t a);
/// sum_{b=1}^{qd} b chi(b) (d/b).
Cyclotomic twisted_moment(const CharacterExact& chi, std::int64_t d);

ComplexValue gauss_sum(const CharacterExact& chi, unsigned bits = kDefaultPrecisionBits);
ComplexValue l_zero(const CharacterExact& chi, unsigned bits = kDefaultPrecisionBits);

enum class TailMode {
  EulerMaclaurin,  // tail of each residue class summed in closed form
  Truncate,        // bare partial sum, bound 1/terms
};

/// L(2, conj(chi)^2) from the first `terms` terms.
ComplexValue l_value_2(const CharacterExact& chi, std::int64_t terms, TailMode mode = TailMode::EulerMaclaurin,
                       unsigned bits = kDefaultPrecisionBits);

/// (1/(q^2 d)) sum a chi(a) sum b chi(b) chi_d(b). Throws DomainError when
/// gcd(q, d) > 1.
ComplexValue zeta_k_zero(const CharacterExact& chi, std::int64_t d, unsigned bits = kDefaultPrecisionBits);

/// l_zero(chi) * L(0, chi chi_d), the product of two separately evaluated values.
ComplexValue zeta_k_zero_product(const CharacterExact& chi, std::int64_t d, unsigned bits = kDefaultPrecisionBits);

struct Residual {
  Real value;
  Real bound;
  bool within() const { return value <= bound; }
};

/// |A_chi(2n)/q - zeta_K(0, chi)| with d = 4(n^2+1).
Residual lemma31_residual(std::int64_t n, const CharacterExact& chi, unsigned bits = kDefaultPrecisionBits);

/// 2 A_chi(2n) / m_chi and 2 q zeta_K(0, chi) / m_chi in the power basis.
QuotientResult lemma31_integrality(std::int64_t n, const CharacterExact& chi);
QuotientResult zeta_integrality(const CharacterExact& chi, std::int64_t d);

/// Difference of the two sides of the A_chi(2s) decomposition.
Residual lemma43_residual(std::int64_t s, const CharacterExact& chi, unsigned bits = kDefaultPrecisionBits);

/// chi(-d) (d/q) tau(chi)^2 L(2, conj(chi)^2) / pi^2 against the finite sum
/// over (v^2/q^2 - v/q) chi(u^2 + 2suv - v^2).
Residual lemma42_residual(std::int64_t s, std::int64_t d, const CharacterExact& chi, std::int64_t terms,
                          unsigned bits = kDefaultPrecisionBits);

/// q zeta_P(K)(0, chi) - A_chi(2s) - (b/q) S (2 tau^k + (tau^k - 1)/(bs)) with
/// the zeta value taken from the closed formula for the family D(b, s, k).
Residual lemma44_residual(std::uint64_t b, std::uint64_t s, unsigned k, const CharacterExact& chi, std::int64_t terms,
                          unsigned bits = kDefaultPrecisionBits);

}  // namespace quadsieve::zeta
