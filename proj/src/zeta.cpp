#include "quadsieve/zeta.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <numeric>
#include <sstream>

#include <boost/math/constants/constants.hpp>
#include <boost/math/special_functions/bernoulli.hpp>

#include "quadsieve/arith.hpp"
#include "quadsieve/contfrac.hpp"
#include "quadsieve/errors.hpp"
#include "quadsieve/quadfield.hpp"

namespace quadsieve::zeta {

namespace {

std::recursive_mutex& precision_mutex() {
  static std::recursive_mutex m;
  return m;
}

Real pow2(long e) {
  Real out = 1;
  mpfr_mul_2si(out.backend().data(), out.backend().data(), e, MPFR_RNDN);
  return out;
}

// Relative size of one rounding step at `bits`.
Real ulp(unsigned bits) { return pow2(-static_cast<long>(bits) + 1); }

Real to_real(const mpz_class& v) {
  Real out;
  mpfr_set_z(out.backend().data(), v.get_mpz_t(), MPFR_RNDN);
  return out;
}

Real to_real(std::int64_t v) { return to_real(mpz_class(static_cast<long>(v))); }

ComplexValue make_value(unsigned bits) {
  ComplexValue v;
  v.precision = bits;
  v.re = 0;
  v.im = 0;
  v.error_bound = 0;
  return v;
}

ComplexValue scale(ComplexValue v, const Real& f) {
  v.re *= f;
  v.im *= f;
  v.error_bound = v.error_bound * boost::multiprecision::abs(f) + v.abs() * ulp(v.precision) * 4;
  return v;
}

ComplexValue multiply(const ComplexValue& x, const ComplexValue& y) {
  ComplexValue out = make_value(std::max(x.precision, y.precision));
  out.re = x.re * y.re - x.im * y.im;
  out.im = x.re * y.im + x.im * y.re;
  const Real ax = x.abs();
  const Real ay = y.abs();
  out.error_bound = ax * y.error_bound + ay * x.error_bound + x.error_bound * y.error_bound + ax * ay * ulp(out.precision) * 8;
  return out;
}

ComplexValue add(const ComplexValue& x, const ComplexValue& y, int sign = 1) {
  ComplexValue out = make_value(std::max(x.precision, y.precision));
  out.re = x.re + sign * y.re;
  out.im = x.im + sign * y.im;
  out.error_bound = x.error_bound + y.error_bound + (x.abs() + y.abs()) * ulp(out.precision) * 4;
  return out;
}

void require_odd_primitive(const CharacterExact& chi, const char* who) {
  if (!chi.is_primitive()) throw PreconditionError(std::string(who) + ": character " + chi.label() + " is not primitive");
  if (!chi.is_odd()) throw PreconditionError(std::string(who) + ": character " + chi.label() + " is not odd");
}

void require_order_above_two(const CharacterExact& chi, const char* who) {
  if (chi.order() <= 2) {
    throw PreconditionError(std::string(who) + ": character " + chi.label() + " has order " +
                            std::to_string(chi.order()) + ", the identity needs order > 2");
  }
}

// Accumulates integer weights per root-of-unity exponent.
struct Accumulator {
  std::vector<std::int64_t> w;
  explicit Accumulator(std::int64_t L) : w(static_cast<std::size_t>(L), 0) {}
  void add(std::int64_t idx, std::int64_t v) {
    if (idx >= 0) w[static_cast<std::size_t>(idx)] += v;
  }
  Cyclotomic finish() const {
    Cyclotomic c(static_cast<std::int64_t>(w.size()));
    for (std::size_t k = 0; k < w.size(); ++k) {
      if (w[k] != 0) c.add(static_cast<std::int64_t>(k), mpz_class(static_cast<long>(w[k])));
    }
    return c;
  }
};

// sum over the grid of weight(u, v) chi(u^2 + 2suv - v^2).
template <typename Weight>
Cyclotomic form_sum(const CharacterExact& chi, std::int64_t s, std::int64_t lo, Weight weight) {
  const std::int64_t q = chi.conductor();
  const std::int64_t ts = arith::mod(2 * s, q);
  Accumulator acc(chi.root_order());
  for (std::int64_t u = lo; u < q; ++u) {
    for (std::int64_t v = lo; v < q; ++v) {
      const std::int64_t f = (u * u + ts * u % q * v + q * q - v * v) % q;
      acc.add(chi.index(f), weight(u, v));
    }
  }
  return acc.finish();
}

std::int64_t lcm(std::int64_t a, std::int64_t b) { return a / std::gcd(a, b) * b; }

}  // namespace

PrecisionScope::PrecisionScope(unsigned bits)
    : lock_(precision_mutex()), saved_(Real::default_precision()) {
  Real::default_precision(digits10_for(bits));
}

PrecisionScope::~PrecisionScope() { Real::default_precision(saved_); }

unsigned PrecisionScope::digits10_for(unsigned bits) {
  return static_cast<unsigned>(std::ceil(bits * 0.30102999566398120)) + 1;
}

Real ComplexValue::abs() const { return boost::multiprecision::sqrt(re * re + im * im); }

std::string ComplexValue::to_string(int digits) const {
  std::ostringstream ss;
  ss << std::scientific << std::setprecision(digits) << re << ' ' << im << ' ' << std::setprecision(3) << error_bound;
  return ss.str();
}

// ---- cyclotomic arithmetic ------------------------------------------------

Cyclotomic::Cyclotomic(std::int64_t order) : order_(order), c_(static_cast<std::size_t>(order)) {
  if (order < 1) throw DomainError("Cyclotomic: order must be >= 1");
}

void Cyclotomic::add(std::int64_t k, const mpz_class& v) { c_[static_cast<std::size_t>(arith::mod(k, order_))] += v; }

Cyclotomic& Cyclotomic::operator+=(const Cyclotomic& o) {
  if (o.order_ != order_) throw DomainError("Cyclotomic: order mismatch");
  for (std::size_t k = 0; k < c_.size(); ++k) c_[k] += o.c_[k];
  return *this;
}

Cyclotomic& Cyclotomic::operator-=(const Cyclotomic& o) {
  if (o.order_ != order_) throw DomainError("Cyclotomic: order mismatch");
  for (std::size_t k = 0; k < c_.size(); ++k) c_[k] -= o.c_[k];
  return *this;
}

Cyclotomic& Cyclotomic::operator*=(const mpz_class& v) {
  for (auto& x : c_) x *= v;
  return *this;
}

Cyclotomic operator*(const Cyclotomic& x, const Cyclotomic& y) {
  if (x.order_ != y.order_) throw DomainError("Cyclotomic: order mismatch");
  Cyclotomic out(x.order_);
  const std::size_t L = x.c_.size();
  for (std::size_t i = 0; i < L; ++i) {
    if (x.c_[i] == 0) continue;
    for (std::size_t j = 0; j < L; ++j) {
      if (y.c_[j] != 0) out.c_[(i + j) % L] += x.c_[i] * y.c_[j];
    }
  }
  return out;
}

std::vector<mpz_class> cyclotomic_polynomial(std::int64_t n) {
  if (n < 1) throw DomainError("cyclotomic_polynomial: n must be >= 1");
  // x^n - 1 divided by Phi_d for every proper divisor d
  std::vector<mpz_class> num(static_cast<std::size_t>(n) + 1);
  num[0] = -1;
  num[static_cast<std::size_t>(n)] = 1;
  for (std::int64_t d = 1; d < n; ++d) {
    if (n % d != 0) continue;
    const auto den = cyclotomic_polynomial(d);
    const std::size_t dn = num.size() - 1;
    const std::size_t dd = den.size() - 1;
    std::vector<mpz_class> quot(dn - dd + 1);
    for (std::size_t i = dn + 1; i-- > dd;) {
      const mpz_class c = num[i];  // den is monic
      quot[i - dd] = c;
      if (c == 0) continue;
      for (std::size_t j = 0; j <= dd; ++j) num[i - dd + j] -= c * den[j];
    }
    num = std::move(quot);
  }
  return num;
}

std::vector<mpz_class> Cyclotomic::power_basis() const {
  const auto phi = cyclotomic_polynomial(order_);
  const std::size_t deg = phi.size() - 1;
  std::vector<mpz_class> r = c_;
  for (std::size_t i = r.size(); i-- > deg;) {
    const mpz_class c = r[i];
    if (c == 0) continue;
    for (std::size_t j = 0; j <= deg; ++j) r[i - deg + j] -= c * phi[j];
  }
  r.resize(deg);
  return r;
}

bool Cyclotomic::is_zero() const {
  const auto r = power_basis();
  return std::all_of(r.begin(), r.end(), [](const mpz_class& v) { return v == 0; });
}

ComplexValue Cyclotomic::evaluate(unsigned bits) const {
  PrecisionScope scope(bits);
  ComplexValue out = make_value(bits);
  const Real two_pi = 2 * boost::math::constants::pi<Real>();
  Real mass = 0;
  for (std::size_t k = 0; k < c_.size(); ++k) {
    if (c_[k] == 0) continue;
    const Real coeff = to_real(c_[k]);
    const Real angle = two_pi * static_cast<long>(k) / static_cast<long>(order_);
    out.re += coeff * boost::multiprecision::cos(angle);
    out.im += coeff * boost::multiprecision::sin(angle);
    mass += boost::multiprecision::abs(coeff);
  }
  out.error_bound = mass * (static_cast<long>(c_.size()) + 16) * ulp(bits);
  return out;
}

bool QuotientResult::integral() const {
  return ok && std::all_of(coords.begin(), coords.end(), [](const mpq_class& v) { return v.get_den() == 1; });
}

QuotientResult divide(const Cyclotomic& z, const Cyclotomic& y) {
  if (z.order() != y.order()) throw DomainError("divide: order mismatch");
  const auto target = z.power_basis();
  const std::size_t n = target.size();
  // column j of the matrix is y * zeta^j in the power basis
  std::vector<std::vector<mpq_class>> a(n, std::vector<mpq_class>(n + 1));
  for (std::size_t j = 0; j < n; ++j) {
    Cyclotomic shift(y.order());
    shift.add(static_cast<std::int64_t>(j), 1);
    const auto col = (y * shift).power_basis();
    for (std::size_t i = 0; i < n; ++i) a[i][j] = col[i];
  }
  for (std::size_t i = 0; i < n; ++i) a[i][n] = target[i];
  QuotientResult out;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && a[piv][col] == 0) ++piv;
    if (piv == n) return out;  // y = 0 in Q(zeta_L)
    std::swap(a[piv], a[col]);
    for (std::size_t i = 0; i < n; ++i) {
      if (i == col || a[i][col] == 0) continue;
      const mpq_class f = a[i][col] / a[col][col];
      for (std::size_t j = col; j <= n; ++j) a[i][j] -= f * a[col][j];
    }
  }
  out.ok = true;
  out.coords.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.coords[i] = a[i][n] / a[i][i];
  return out;
}

// ---- characters ---------------------------------------------------------------

CharacterExact::CharacterExact(std::string label, std::int64_t conductor, std::vector<ExactComponent> components)
    : label_(std::move(label)), q_(conductor), comps_(std::move(components)) {
  if (q_ < 3) throw ValidationError("conductor", "conductor " + std::to_string(q_) + " is below 3");
  if (comps_.empty()) throw ValidationError("components_present", "no components");
  std::int64_t product = 1;
  for (const auto& c : comps_) {
    if (c.modulus < 2) throw ValidationError("component_modulus", "modulus " + std::to_string(c.modulus));
    if (std::gcd(product, c.modulus) != 1) throw ValidationError("coprime_moduli", "modulus " + std::to_string(c.modulus));
    product *= c.modulus;
    const std::int64_t phi = static_cast<std::int64_t>(arith::euler_phi(static_cast<std::uint64_t>(c.modulus)));
    if (std::gcd(c.generator, c.modulus) != 1 ||
        static_cast<std::int64_t>(arith::multiplicative_order(c.generator, c.modulus)) != phi) {
      throw ValidationError("primitive_root", std::to_string(c.generator) + " does not generate (Z/" +
                                                  std::to_string(c.modulus) + ")^*");
    }
    if (c.order < 1 || c.exponent < 0 || c.exponent >= c.order) {
      throw ValidationError("image_range", "exponent " + std::to_string(c.exponent) + " of order " + std::to_string(c.order));
    }
    if ((c.exponent * phi) % c.order != 0) {
      throw ValidationError("image_order", "zeta_" + std::to_string(c.order) + "^" + std::to_string(c.exponent) +
                                               " is not a phi(" + std::to_string(c.modulus) + ")-th root of unity");
    }
    L_ = lcm(L_, c.order);
  }
  if (product != q_) {
    throw ValidationError("conductor_product", "moduli multiply to " + std::to_string(product) + ", not " + std::to_string(q_));
  }
  table_.assign(static_cast<std::size_t>(q_), 0);
  std::vector<std::vector<std::int64_t>> logs;
  for (const auto& c : comps_) {
    std::vector<std::int64_t> log(static_cast<std::size_t>(c.modulus), -1);
    std::int64_t x = 1;
    const std::int64_t phi = static_cast<std::int64_t>(arith::euler_phi(static_cast<std::uint64_t>(c.modulus)));
    for (std::int64_t k = 0; k < phi; ++k) {
      log[static_cast<std::size_t>(x)] = k;
      x = arith::mul_mod(x, c.generator, c.modulus);
    }
    logs.push_back(std::move(log));
  }
  for (std::int64_t a = 0; a < q_; ++a) {
    std::int64_t idx = 0;
    for (std::size_t i = 0; i < comps_.size() && idx >= 0; ++i) {
      const auto& c = comps_[i];
      const std::int64_t lg = logs[i][static_cast<std::size_t>(a % c.modulus)];
      if (lg < 0) {
        idx = -1;
      } else {
        idx = (idx + arith::mul_mod(c.exponent * (L_ / c.order), lg, L_)) % L_;
      }
    }
    table_[static_cast<std::size_t>(a)] = idx;
  }
}

CharacterExact CharacterExact::from_mod_i(const charmod::CharacterModI& chi) {
  if (!chi.root()) {
    throw PreconditionError("character " + chi.label() + " has no root of unity image configured");
  }
  const auto& root = *chi.root();
  std::vector<ExactComponent> comps;
  for (const auto& c : chi.components()) {
    const auto e = static_cast<std::int64_t>(arith::discrete_log(root.residue, c.image, chi.target_prime()));
    comps.push_back({c.modulus, c.generator, e % root.order, root.order});
  }
  return CharacterExact(chi.label(), chi.conductor(), std::move(comps));
}

std::int64_t CharacterExact::order() const {
  std::int64_t o = 1;
  for (const auto& c : comps_) o = lcm(o, c.order / std::gcd(c.exponent, c.order));
  return o;
}

bool CharacterExact::is_odd() const { return L_ % 2 == 0 && index(-1) == L_ / 2; }

bool CharacterExact::is_primitive() const {
  for (const auto& c : comps_) {
    if (c.modulus % 2 == 0 && c.modulus != 4) return false;
    const auto primes = arith::prime_divisors(static_cast<std::uint64_t>(c.modulus));
    const std::int64_t below = c.modulus / static_cast<std::int64_t>(primes.front());
    const std::int64_t o = c.order / std::gcd(c.exponent, c.order);
    if (static_cast<std::int64_t>(arith::euler_phi(static_cast<std::uint64_t>(below))) % o == 0) return false;
  }
  return true;
}

ComplexValue evaluate_exact(const CharacterExact& chi, std::int64_t a, unsigned bits) {
  Cyclotomic c(chi.root_order());
  const std::int64_t idx = chi.index(a);
  if (idx >= 0) c.add(idx, 1);
  return c.evaluate(bits);
}

std::int64_t reduce_mod_r(const CharacterExact& chi, std::int64_t a, std::int64_t root_residue, std::int64_t r) {
  const std::int64_t idx = chi.index(a);
  if (idx < 0) return 0;
  return arith::pow_mod(root_residue, static_cast<std::uint64_t>(idx), r);
}

// ---- finite sums --------------------------------------------------------------

Cyclotomic m_exact(const CharacterExact& chi) {
  Accumulator acc(chi.root_order());
  for (std::int64_t a = 1; a <= chi.conductor(); ++a) acc.add(chi.index(a), a);
  return acc.finish();
}

Cyclotomic a_exact(const CharacterExact& chi, std::int64_t a) {
  const std::int64_t q = chi.conductor();
  const std::int64_t am = arith::mod(a, q);
  Accumulator acc(chi.root_order());
  for (std::int64_t c = 0; c < q; ++c) {
    for (std::int64_t d = 0; d < q; ++d) {
      const std::int64_t f = arith::mod(d * d - c * c - am * c % q * d, q);
      const std::int64_t idx = chi.index(f);
      if (idx < 0) continue;
      acc.add(idx, arith::ceil_div(a * c - d, q) * (c - q));
    }
  }
  return acc.finish();
}

Cyclotomic twisted_moment(const CharacterExact& chi, std::int64_t d) {
  Accumulator acc(chi.root_order());
  const std::int64_t n = chi.conductor() * d;
  for (std::int64_t b = 1; b <= n; ++b) {
    const int kd = arith::kronecker(d, b);
    if (kd != 0) acc.add(chi.index(b), kd * b);
  }
  return acc.finish();
}

ComplexValue gauss_sum(const CharacterExact& chi, unsigned bits) {
  const std::int64_t q = chi.conductor();
  const std::int64_t M = lcm(chi.root_order(), q);
  Cyclotomic c(M);
  for (std::int64_t a = 1; a <= q; ++a) {
    const std::int64_t idx = chi.index(a);
    if (idx >= 0) c.add(idx * (M / chi.root_order()) + a * (M / q), 1);
  }
  return c.evaluate(bits);
}

ComplexValue l_zero(const CharacterExact& chi, unsigned bits) {
  PrecisionScope scope(bits);
  return scale(m_exact(chi).evaluate(bits), Real(-1) / chi.conductor());
}

ComplexValue l_value_2(const CharacterExact& chi, std::int64_t terms, TailMode mode, unsigned bits) {
  const std::int64_t q = chi.conductor();
  if (terms < q) throw PreconditionError("l_value_2: terms must be >= the conductor");
  PrecisionScope scope(bits);
  const std::int64_t L = chi.root_order();
  // conj(chi)^2 has exponent -2 index
  auto psi = [&](std::int64_t n) {
    const std::int64_t idx = chi.index(n);
    return idx < 0 ? idx : arith::mod(-2 * idx, L);
  };
  std::vector<Real> by_index(static_cast<std::size_t>(L), Real(0));
  for (std::int64_t n = 1; n <= terms; ++n) {
    const std::int64_t k = psi(n);
    if (k < 0) continue;
    const Real x = n;
    by_index[static_cast<std::size_t>(k)] += 1 / (x * x);
  }
  Real bound = ulp(bits) * terms * 4;
  if (mode == TailMode::Truncate) {
    bound += Real(1) / terms;
  } else {
    // sum_{m>=0} (y+m)^-2 = 1/y + 1/(2y^2) + sum_j B_{2j} / y^{2j+1} + R
    const Real q2 = Real(q) * q;
    const Real target = ulp(bits);
    for (std::int64_t a = 1; a <= q; ++a) {
      const std::int64_t k = psi(a);
      if (k < 0) continue;
      const std::int64_t m0 = (terms - a) / q + 1;
      const Real y = Real(m0) + Real(a) / q;
      Real tail = 1 / y + 1 / (2 * y * y);
      Real prev = boost::multiprecision::abs(tail);
      Real yp = y * y * y;
      Real remainder = 0;
      for (int j = 1;; ++j) {
        const Real t = boost::math::bernoulli_b2n<Real>(j) / yp;
        const Real at = boost::multiprecision::abs(t);
        if (at >= prev || j > 200) {
          remainder = 2 * at;
          break;
        }
        tail += t;
        prev = at;
        if (at < target * boost::multiprecision::abs(tail)) {
          remainder = 2 * boost::multiprecision::abs(boost::math::bernoulli_b2n<Real>(j + 1) / (yp * y * y));
          break;
        }
        yp *= y * y;
      }
      by_index[static_cast<std::size_t>(k)] += tail / q2;
      bound += remainder / q2 + ulp(bits) * 64;
    }
  }
  ComplexValue out = make_value(bits);
  const Real two_pi = 2 * boost::math::constants::pi<Real>();
  Real mass = 0;
  for (std::int64_t k = 0; k < L; ++k) {
    const Real& v = by_index[static_cast<std::size_t>(k)];
    if (v == 0) continue;
    const Real angle = two_pi * k / L;
    out.re += v * boost::multiprecision::cos(angle);
    out.im += v * boost::multiprecision::sin(angle);
    mass += v;
  }
  out.error_bound = bound + mass * (L + 16) * ulp(bits);
  return out;
}

ComplexValue zeta_k_zero(const CharacterExact& chi, std::int64_t d, unsigned bits) {
  const std::int64_t q = chi.conductor();
  if (d <= 0) throw DomainError("zeta_k_zero: d must be positive");
  if (std::gcd(q, d) != 1) {
    throw DomainError("zeta_k_zero: gcd(q, d) = " + std::to_string(std::gcd(q, d)) + " for q = " + std::to_string(q) +
                      ", d = " + std::to_string(d));
  }
  PrecisionScope scope(bits);
  const Cyclotomic prod = m_exact(chi) * twisted_moment(chi, d);
  return scale(prod.evaluate(bits), Real(1) / (Real(q) * q * d));
}

ComplexValue zeta_k_zero_product(const CharacterExact& chi, std::int64_t d, unsigned bits) {
  const std::int64_t q = chi.conductor();
  if (std::gcd(q, d) != 1) throw DomainError("zeta_k_zero_product: gcd(q, d) > 1");
  PrecisionScope scope(bits);
  const ComplexValue l0 = l_zero(chi, bits);
  const ComplexValue twisted = scale(twisted_moment(chi, d).evaluate(bits), Real(-1) / (Real(q) * d));
  return multiply(l0, twisted);
}

// ---- identities ---------------------------------------------------------------

Residual lemma31_residual(std::int64_t n, const CharacterExact& chi, unsigned bits) {
  if (n < 1 || n % 2 == 0) throw PreconditionError("lemma31_residual: n must be odd and positive");
  const std::int64_t D = n * n + 1;
  if (!arith::is_squarefree(static_cast<std::uint64_t>(D))) {
    throw PreconditionError("lemma31_residual: n^2 + 1 = " + std::to_string(D) + " is not squarefree");
  }
  const std::int64_t d = 4 * D;
  const std::int64_t q = chi.conductor();
  if (std::gcd(q, d) != 1) {
    throw PreconditionError("lemma31_residual: gcd(q, d) = " + std::to_string(std::gcd(q, d)) + " for d = " + std::to_string(d));
  }
  require_odd_primitive(chi, "lemma31_residual");
  const auto field = quadfield::field_data(D);
  if (field.h != 1) {
    throw PreconditionError("lemma31_residual: h(" + std::to_string(D) + ") = " + std::to_string(field.h) + ", not 1");
  }
  PrecisionScope scope(bits);
  // q^2 d (A/q - zeta) = q d A - m t
  Cyclotomic diff = a_exact(chi, 2 * n);
  diff *= mpz_class(static_cast<long>(q * d));
  diff -= m_exact(chi) * twisted_moment(chi, d);
  const ComplexValue v = scale(diff.evaluate(bits), Real(1) / (Real(q) * q * d));
  return {v.abs(), v.error_bound};
}

QuotientResult lemma31_integrality(std::int64_t n, const CharacterExact& chi) {
  Cyclotomic two_a = a_exact(chi, 2 * n);
  two_a *= 2;
  return divide(two_a, m_exact(chi));
}

QuotientResult zeta_integrality(const CharacterExact& chi, std::int64_t d) {
  // 2 q zeta_K(0) / m = 2 t / (q d)
  const std::int64_t q = chi.conductor();
  if (std::gcd(q, d) != 1) throw DomainError("zeta_integrality: gcd(q, d) > 1");
  Cyclotomic num = twisted_moment(chi, d);
  num *= 2;
  Cyclotomic den(chi.root_order());
  den.add(0, mpz_class(static_cast<long>(q * d)));
  return divide(num, den);
}

Residual lemma43_residual(std::int64_t s, const CharacterExact& chi, unsigned bits) {
  if (s < 1) throw PreconditionError("lemma43_residual: s must be positive");
  require_odd_primitive(chi, "lemma43_residual");
  require_order_above_two(chi, "lemma43_residual");
  const std::int64_t q = chi.conductor();
  PrecisionScope scope(bits);
  // q^2 (A/q - rhs) = q A - 2 sum uv chi - 2s sum (v^2 - q v) chi
  Cyclotomic diff = a_exact(chi, 2 * s);
  diff *= mpz_class(static_cast<long>(q));
  Cyclotomic uv = form_sum(chi, s, 1, [](std::int64_t u, std::int64_t v) { return u * v; });
  uv *= 2;
  Cyclotomic vv = form_sum(chi, s, 0, [q](std::int64_t, std::int64_t v) { return v * v - q * v; });
  vv *= mpz_class(static_cast<long>(2 * s));
  diff -= uv;
  diff -= vv;
  const ComplexValue v = scale(diff.evaluate(bits), Real(1) / (Real(q) * q));
  return {v.abs(), v.error_bound};
}

namespace {

// chi(-d) (d/q) tau(chi)^2 L(2, conj(chi)^2) / pi^2
ComplexValue lemma42_lhs(const CharacterExact& chi, const mpz_class& d, std::int64_t terms, unsigned bits) {
  const std::int64_t q = chi.conductor();
  const mpz_class mq(static_cast<long>(q));
  mpz_class dm;
  mpz_fdiv_r(dm.get_mpz_t(), mpz_class(-d).get_mpz_t(), mq.get_mpz_t());
  const int kr = arith::kronecker(d, mq);
  const ComplexValue tau = gauss_sum(chi, bits);
  const ComplexValue l2 = l_value_2(chi, terms, TailMode::EulerMaclaurin, bits);
  ComplexValue chi_md = evaluate_exact(chi, dm.get_si(), bits);
  const Real pi = boost::math::constants::pi<Real>();
  ComplexValue out = multiply(multiply(chi_md, multiply(tau, tau)), l2);
  return scale(out, Real(kr) / (pi * pi));
}

}  // namespace

Residual lemma42_residual(std::int64_t s, std::int64_t d, const CharacterExact& chi, std::int64_t terms, unsigned bits) {
  const std::int64_t q = chi.conductor();
  if (d <= 0 || std::gcd(q, d) != 1) throw PreconditionError("lemma42_residual: need d > 0 with gcd(q, d) = 1");
  require_odd_primitive(chi, "lemma42_residual");
  PrecisionScope scope(bits);
  const ComplexValue lhs = lemma42_lhs(chi, mpz_class(static_cast<long>(d)), terms, bits);
  const Cyclotomic vv = form_sum(chi, s, 0, [q](std::int64_t, std::int64_t v) { return v * v - q * v; });
  const ComplexValue rhs = scale(vv.evaluate(bits), Real(1) / (Real(q) * q));
  const ComplexValue diff = add(lhs, rhs, -1);
  return {diff.abs(), diff.error_bound};
}

Residual lemma44_residual(std::uint64_t b, std::uint64_t s, unsigned k, const CharacterExact& chi, std::int64_t terms,
                          unsigned bits) {
  const std::int64_t q = chi.conductor();
  if (b == 0 || s == 0 || k == 0) throw PreconditionError("lemma44_residual: b, s, k must be positive");
  if (b % static_cast<std::uint64_t>(q) != 0) {
    throw PreconditionError("lemma44_residual: q = " + std::to_string(q) + " does not divide b = " + std::to_string(b));
  }
  if ((b + s) % 2 == 0) throw PreconditionError("lemma44_residual: b + s must be odd so that D = 2 mod 4");
  require_odd_primitive(chi, "lemma44_residual");
  require_order_above_two(chi, "lemma44_residual");
  const mpz_class D = contfrac::family_discriminant(b, s, k);
  if (!arith::is_squarefree(D)) throw PreconditionError("lemma44_residual: D = " + D.get_str() + " is not squarefree");
  const mpz_class d = 4 * D;
  {
    mpz_class g;
    const mpz_class mq(static_cast<long>(q));
    mpz_gcd(g.get_mpz_t(), d.get_mpz_t(), mq.get_mpz_t());
    if (g != 1) {
      throw PreconditionError("lemma44_residual: gcd(q, d) = " + g.get_str() + " for d = " + d.get_str());
    }
  }
  mpz_class tk;
  const mpz_class tau = mpz_class(4) * b * s + 1;
  mpz_pow_ui(tk.get_mpz_t(), tau.get_mpz_t(), k);
  const mpz_class W = 2 * mpz_class(b) * tk + 2 * mpz_class(s) + (tk - 1) / s;
  const mpz_class T = 2 * tk + (tk - 1) / (mpz_class(b) * s);

  PrecisionScope scope(bits);
  // q * E = 2 U - q A - b T S, where the zeta value is (2/q^2) U + G W
  Cyclotomic u = form_sum(chi, static_cast<std::int64_t>(s), 1, [](std::int64_t x, std::int64_t y) { return x * y; });
  u *= 2;
  Cyclotomic a = a_exact(chi, 2 * static_cast<std::int64_t>(s));
  a *= mpz_class(static_cast<long>(q));
  Cyclotomic sv = form_sum(chi, static_cast<std::int64_t>(s), 0, [q](std::int64_t, std::int64_t v) { return v * v - q * v; });
  sv *= mpz_class(mpz_class(b) * T);
  u -= a;
  u -= sv;
  const ComplexValue exact_part = scale(u.evaluate(bits), Real(1) / q);
  const ComplexValue g = lemma42_lhs(chi, d, terms, bits);
  const ComplexValue gw = scale(g, to_real(W) * q);
  const ComplexValue total = add(exact_part, gw);
  return {total.abs(), total.error_bound};
}

}  // namespace quadsieve::zeta
