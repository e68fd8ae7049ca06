#include "quadsieve/contfrac.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "quadsieve/arith.hpp"
#include "quadsieve/errors.hpp"

namespace quadsieve::contfrac {

namespace {

mpz_class abs_mpz(const mpz_class& x) { return x < 0 ? mpz_class(-x) : x; }

mpz_class floor_div(const mpz_class& a, const mpz_class& b) {
  mpz_class q;
  mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

mpz_class pow_ui(const mpz_class& base, unsigned long e) {
  mpz_class out;
  mpz_pow_ui(out.get_mpz_t(), base.get_mpz_t(), e);
  return out;
}

// Sign of u + v sqrt(D) for D > 0 nonsquare.
int sign_with_root(const mpz_class& u, const mpz_class& v, const mpz_class& d) {
  const int su = sgn(u);
  const int sv = sgn(v);
  if (sv == 0) return su;
  if (su == 0 || su == sv) return sv;
  // opposite signs: compare u^2 with v^2 D
  const int cmpv = cmp(u * u, v * v * d);
  return cmpv > 0 ? su : sv;
}

mpz_class tau_of(std::uint64_t b, std::uint64_t s) { return mpz_class(4) * b * s + 1; }

}  // namespace

QuadraticSurd::QuadraticSurd(mpz_class p, mpz_class q, mpz_class d) : p_(std::move(p)), q_(std::move(q)), d_(std::move(d)) {
  if (q_ == 0) throw DomainError("quadratic surd with zero denominator");
  if (d_ <= 0) throw DomainError("quadratic surd needs D > 0");
  mpz_class rem = (d_ - p_ * p_) % q_;
  if (rem != 0) {
    const mpz_class scale = abs_mpz(q_);
    p_ *= scale;
    d_ *= scale * scale;
    q_ *= scale;
  }
}

QuadraticSurd QuadraticSurd::half_shift() const { return {q_ + p_, 2 * q_, d_}; }

std::string CFExpansion::to_string() const {
  std::ostringstream ss;
  for (std::size_t i = 0; i < preperiod.size(); ++i) ss << (i ? "," : "") << preperiod[i].get_str();
  ss << ";(";
  for (std::size_t i = 0; i < period.size(); ++i) ss << (i ? "," : "") << period[i].get_str();
  ss << ")";
  return ss.str();
}

std::vector<mpz_class> CFExpansion::terms(std::size_t count) const {
  std::vector<mpz_class> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (i < preperiod.size()) {
      out.push_back(preperiod[i]);
    } else {
      if (period.empty()) break;
      out.push_back(period[(i - preperiod.size()) % period.size()]);
    }
  }
  return out;
}

CFExpansion expand(const QuadraticSurd& surd) {
  if (arith::is_square(surd.D())) throw DomainError("expand: D = " + surd.D().get_str() + " is a perfect square");
  const mpz_class root = arith::isqrt(surd.D());
  mpz_class p = surd.P();
  mpz_class q = surd.Q();
  const mpz_class& d = surd.D();
  std::map<std::pair<mpz_class, mpz_class>, std::size_t> seen;
  std::vector<mpz_class> coeffs;
  while (true) {
    auto [it, inserted] = seen.emplace(std::make_pair(p, q), coeffs.size());
    if (!inserted) {
      const auto start = static_cast<std::ptrdiff_t>(it->second);
      return CFExpansion{{coeffs.begin(), coeffs.begin() + start}, {coeffs.begin() + start, coeffs.end()}};
    }
    // floor((p + sqrt d)/q) = floor((p + root)/q) for q > 0, floor((p + root + 1)/q) for q < 0
    mpz_class a = q > 0 ? floor_div(p + root, q) : floor_div(p + root + 1, q);
    coeffs.push_back(a);
    p = a * q - p;
    q = (d - p * p) / q;
  }
}

CFExpansion canonical(const CFExpansion& cf) {
  CFExpansion out = cf;
  const std::size_t n = out.period.size();
  for (std::size_t len = 1; len < n; ++len) {
    if (n % len != 0) continue;
    bool repeats = true;
    for (std::size_t i = len; i < n && repeats; ++i) repeats = out.period[i] == out.period[i - len];
    if (repeats) {
      out.period.resize(len);
      break;
    }
  }
  while (!out.preperiod.empty() && !out.period.empty() && out.preperiod.back() == out.period.back()) {
    out.preperiod.pop_back();
    std::rotate(out.period.rbegin(), out.period.rbegin() + 1, out.period.rend());
  }
  return out;
}

std::vector<Convergent> convergents(std::span<const mpz_class> terms) {
  std::vector<Convergent> out;
  out.reserve(terms.size());
  mpz_class p_prev = 1, q_prev = 0, p = terms.empty() ? mpz_class(0) : terms[0], q = 1;
  for (std::size_t j = 0; j < terms.size(); ++j) {
    if (j > 0) {
      mpz_class pn = terms[j] * p + p_prev;
      mpz_class qn = terms[j] * q + q_prev;
      p_prev = p;
      q_prev = q;
      p = pn;
      q = qn;
    }
    out.push_back({p, q});
  }
  return out;
}

QuadraticSurd surd_from_expansion(const CFExpansion& cf) {
  if (cf.period.empty()) throw DomainError("surd_from_expansion: empty period");
  // purely periodic tail y = [period...]: Q_l y^2 + (Q_{l-1} - P_l) y - P_{l-1} = 0
  mpz_class p1 = 1, p0 = 0, q1 = 0, q0 = 1;  // (P_{j}, P_{j-1}), (Q_{j}, Q_{j-1}) seeds
  for (const auto& a : cf.period) {
    mpz_class pn = a * p1 + p0;
    mpz_class qn = a * q1 + q0;
    p0 = p1;
    q0 = q1;
    p1 = pn;
    q1 = qn;
  }
  const mpz_class delta = (q0 - p1) * (q0 - p1) + 4 * q1 * p0;
  const mpz_class u = p1 - q0;  // y = (u + sqrt(delta)) / w
  const mpz_class w = 2 * q1;
  // x = (A y + B) / (C y + E) from the preperiod
  mpz_class A = 1, B = 0, C = 0, E = 1;
  for (const auto& a : cf.preperiod) {
    // [.., a, y] : (A', B') = (A a + B, A), same for (C, E)
    mpz_class na = A * a + B;
    mpz_class nc = C * a + E;
    B = A;
    E = C;
    A = na;
    C = nc;
  }
  const mpz_class x1 = A * u + B * w;
  const mpz_class y1 = C * u + E * w;
  // (x1 + A sqrt(delta)) / (y1 + C sqrt(delta))
  mpz_class n0 = x1 * y1 - A * C * delta;
  mpz_class n1 = A * y1 - x1 * C;
  mpz_class m = y1 * y1 - C * C * delta;
  if (n1 < 0) {
    n0 = -n0;
    n1 = -n1;
    m = -m;
  }
  mpz_class g;
  mpz_gcd(g.get_mpz_t(), n0.get_mpz_t(), m.get_mpz_t());
  mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), n1.get_mpz_t());
  n0 /= g;
  n1 /= g;
  m /= g;
  return QuadraticSurd(n0, m, n1 * n1 * delta);
}

mpz_class family_discriminant(std::uint64_t b, std::uint64_t s, unsigned k) {
  const mpz_class tk = pow_ui(tau_of(b, s), k);
  const mpz_class root = mpz_class(b) * tk + s;
  return tk + root * root;
}

CFExpansion mcz_expansion(std::uint64_t b, std::uint64_t s, unsigned k) {
  if (b == 0 || s == 0 || k == 0) throw DomainError("mcz_expansion: b, s, k must be >= 1");
  const mpz_class tau = tau_of(b, s);
  CFExpansion cf;
  cf.preperiod.push_back(mpz_class(b) * pow_ui(tau, k) + s);
  for (unsigned i = 1; i <= 2 * k; ++i) {
    // odd slots climb tau^0, tau^1, ...; even slots descend tau^{k-1}, ...
    const unsigned e = (i % 2 == 1) ? (i - 1) / 2 : k - i / 2;
    cf.period.push_back(2 * mpz_class(b) * pow_ui(tau, e));
  }
  cf.period.push_back(2 * mpz_class(b) * pow_ui(tau, k) + 2 * mpz_class(s));
  return cf;
}

CFExpansion half_shift_cf(const CFExpansion& cf) {
  if (cf.preperiod.size() != 1) {
    throw PreconditionError("half_shift_cf: expansion must have the form [a0; (a1..al)]");
  }
  if (cf.period.empty()) throw PreconditionError("half_shift_cf: empty period");
  const mpz_class& a0 = cf.preperiod.front();
  if (a0 % 2 != 0) throw PreconditionError("half_shift_cf: a0 = " + a0.get_str() + " is odd");
  CFExpansion out;
  out.preperiod.push_back(a0 / 2);
  for (std::size_t i = 0; i < cf.period.size(); ++i) {
    const mpz_class& a = cf.period[i];
    if (a % 2 != 0 || a < 4) {
      throw PreconditionError("half_shift_cf: a" + std::to_string(i + 1) + " = " + a.get_str() +
                              " must be even and >= 4");
    }
    out.period.push_back(1);
    out.period.push_back(1);
    out.period.push_back((a - 2) / 2);
  }
  return out;
}

CFExpansion family_half_expansion(std::uint64_t b, std::uint64_t s, unsigned k) {
  if (b == 0 || s == 0 || k == 0) throw DomainError("family_half_expansion: b, s, k must be >= 1");
  if ((b + s) % 2 != 0) throw DomainError("family_half_expansion: D(b,s,k) = 1 mod 4 needs b + s even");
  const mpz_class tau = tau_of(b, s);
  const mpz_class b0 = (mpz_class(b) * pow_ui(tau, k) + s) / 2;
  CFExpansion cf;
  cf.preperiod.push_back(b0);
  if (b >= 2) {
    const std::size_t len = 3 * (2 * k + 1);
    cf.period.assign(len, mpz_class(1));
    for (unsigned i = 1; i <= k; ++i) {
      cf.period[3 * (2 * i - 1) - 1] = mpz_class(b) * pow_ui(tau, i - 1) - 1;
      cf.period[3 * (2 * i) - 1] = mpz_class(b) * pow_ui(tau, k - i) - 1;
    }
    cf.period[len - 1] = 2 * b0 - 1;
  } else if (k == 1) {
    cf.period = {1, 2, 2, 1, mpz_class(5) * s};
  } else {
    const std::size_t len = 6 * k - 1;
    cf.period.assign(len, mpz_class(1));
    for (unsigned i = 1; i + 1 <= k; ++i) {
      cf.period[6 * (i - 1) + 7 - 1] = pow_ui(tau, i) - 1;
      cf.period[6 * (i - 1) + 4 - 1] = pow_ui(tau, k - i) - 1;
    }
    cf.period[2 - 1] = 2;
    cf.period[6 * k - 3 - 1] = 2;
    cf.period[len - 1] = 2 * b0 - 1;
  }
  return cf;
}

double FundamentalUnit::log(const mpz_class& d) const {
  // log(x + y sqrt d) via mantissa/exponent pairs to stay finite for huge units
  auto log_mpz = [](const mpz_class& v) {
    long exp = 0;
    const double mant = mpz_get_d_2exp(&exp, v.get_mpz_t());
    return std::log(mant) + static_cast<double>(exp) * std::log(2.0);
  };
  const double lx = x > 0 ? log_mpz(x) : -INFINITY;
  const double ly = log_mpz(y) + 0.5 * log_mpz(d);
  const double hi = std::max(lx, ly);
  const double lo = std::min(lx, ly);
  return hi + std::log1p(std::exp(lo - hi)) - std::log(static_cast<double>(denominator));
}

FundamentalUnit fundamental_unit(const mpz_class& d) {
  if (d < 2) throw DomainError("fundamental_unit: D must be >= 2");
  if (arith::is_square(d) || !arith::is_squarefree(d)) {
    throw DomainError("fundamental_unit: D = " + d.get_str() + " is not squarefree");
  }
  const bool one_mod_four = d % 4 == 1;
  const QuadraticSurd omega = one_mod_four ? QuadraticSurd(1, 2, d) : QuadraticSurd::sqrt(d);
  const CFExpansion cf = expand(omega);
  const std::size_t len = cf.period.size();
  // index l-1 of the full sequence; (1 + sqrt 5)/2 is the one purely periodic case
  const auto terms = cf.terms(std::max(len, cf.preperiod.size() + len - 1));
  const Convergent c = convergents(terms).back();
  FundamentalUnit unit;
  if (one_mod_four) {
    unit.x = 2 * c.p - c.q;
    unit.y = c.q;
    unit.denominator = 2;
    if (unit.x % 2 == 0 && unit.y % 2 == 0) {
      unit.x /= 2;
      unit.y /= 2;
      unit.denominator = 1;
    }
  } else {
    unit.x = c.p;
    unit.y = c.q;
  }
  const mpz_class n = unit.x * unit.x - d * unit.y * unit.y;
  const long den2 = static_cast<long>(unit.denominator) * unit.denominator;
  unit.norm = len % 2 == 0 ? 1 : -1;
  if (n != unit.norm * den2) {
    throw Error("fundamental_unit: period-end convergent has norm " + n.get_str() + " for D = " + d.get_str());
  }
  return unit;
}

namespace {

struct FamilyConvergents {
  CFExpansion cf;
  mpz_class d;
  mpz_class trace;  // alpha + conj(alpha) = -2 a0
  mpz_class norm;   // alpha * conj(alpha) = a0^2 - D
  std::vector<Convergent> pq;  // index j -> [0; a1..aj], j = 0..l
};

FamilyConvergents family_convergents(std::uint64_t b, std::uint64_t s, unsigned k) {
  FamilyConvergents f;
  f.cf = mcz_expansion(b, s, k);
  f.d = family_discriminant(b, s, k);
  const mpz_class& a0 = f.cf.preperiod.front();
  f.trace = -2 * a0;
  f.norm = a0 * a0 - f.d;
  std::vector<mpz_class> terms{0};
  terms.insert(terms.end(), f.cf.period.begin(), f.cf.period.end());
  f.pq = convergents(terms);
  return f;
}

BGFormCoeffs coeffs_at(const FamilyConvergents& f, std::size_t j) {
  const auto& [p0, q0] = f.pq[j - 1];
  const auto& [p1, q1] = f.pq[j];
  BGFormCoeffs c;
  c.A = p0 * p0 - p0 * q0 * f.trace + q0 * q0 * f.norm;
  c.B = 2 * p0 * p1 + 2 * q0 * q1 * f.norm - (p0 * q1 + p1 * q0) * f.trace;
  c.C = p1 * p1 - p1 * q1 * f.trace + q1 * q1 * f.norm;
  return c;
}

}  // namespace

BGFormCoeffs bg_form_coeffs(std::uint64_t b, std::uint64_t s, unsigned k, std::size_t j) {
  const auto f = family_convergents(b, s, k);
  if (j < 1 || j > f.cf.period.size()) {
    throw DomainError("bg_form_coeffs: index " + std::to_string(j) + " outside [1, " +
                      std::to_string(f.cf.period.size()) + "]");
  }
  return coeffs_at(f, j);
}

bool schmidt_bounds_check(const mpz_class& d, std::size_t j) {
  const CFExpansion cf = expand(QuadraticSurd::sqrt(d));
  const auto terms = cf.terms(j + 2);
  const auto conv = convergents(std::span(terms).first(j + 1));
  const mpz_class& p = conv.back().p;
  const mpz_class& q = conv.back().q;
  const mpz_class& next = terms[j + 1];
  // x = q |p - q sqrt d| = sigma (q p - q^2 sqrt d) with sigma = sign(p^2 - d q^2)
  const int sigma = sgn(mpz_class(p * p - d * q * q));
  // upper: 1 - next * x >= 0 ; lower: (next + 2) x - 1 >= 0
  const mpz_class upper_u = 1 - sigma * next * q * p;
  const mpz_class upper_v = sigma * next * q * q;
  const mpz_class lower_u = sigma * (next + 2) * q * p - 1;
  const mpz_class lower_v = -sigma * (next + 2) * q * q;
  return sign_with_root(upper_u, upper_v, d) >= 0 && sign_with_root(lower_u, lower_v, d) >= 0;
}

std::vector<std::pair<std::size_t, mpz_class>> norm_values_over_period(const mpz_class& d) {
  const CFExpansion cf = expand(QuadraticSurd::sqrt(d));
  const auto terms = cf.terms(cf.preperiod.size() + cf.period.size() - 1);
  const auto conv = convergents(terms);
  std::vector<std::pair<std::size_t, mpz_class>> out;
  for (std::size_t j = 0; j < conv.size(); ++j) {
    out.emplace_back(j, abs_mpz(mpz_class(conv[j].p * conv[j].p - d * conv[j].q * conv[j].q)));
  }
  return out;
}

CongruenceReport family_congruences(std::uint64_t b, std::uint64_t s, unsigned k, std::uint64_t q) {
  if (q < 2 || b % q != 0) throw PreconditionError("family_congruences: q must divide b");
  const auto f = family_convergents(b, s, k);
  CongruenceReport report;
  const mpz_class mq(q);
  auto residue = [&](const mpz_class& v) {
    mpz_class r;
    mpz_fdiv_r(r.get_mpz_t(), v.get_mpz_t(), mq.get_mpz_t());
    return r;
  };
  auto expect = [&](const std::string& what, std::size_t j, const mpz_class& value, const mpz_class& want) {
    if (!report.ok) return;
    if (residue(value) != residue(want)) {
      report.ok = false;
      report.detail = what + "_" + std::to_string(j) + " = " + residue(value).get_str() + " mod " + mq.get_str() +
                      ", expected " + residue(want).get_str();
    }
  };
  const std::size_t last = 2 * k + 1;
  for (std::size_t j = 1; j <= last; ++j) {
    const auto& [p, qq] = f.pq[j];
    if (j < last) {
      expect("p", j, p, j % 2 == 1 ? 1 : 0);
      expect("q", j, qq, j % 2 == 1 ? 0 : 1);
    } else {
      expect("p", j, p, 1);
      expect("q", j, qq, mpz_class(2 * s));
    }
    const auto c = coeffs_at(f, j);
    const mpz_class sign = j % 2 == 0 ? 1 : -1;
    expect("A", j, c.A, sign);
    expect("B", j, c.B, j < last ? mpz_class(2 * s) : mpz_class(-2 * mpz_class(s)));
    expect("C", j, c.C, -sign);
  }
  if (report.ok) report.detail = "all congruences hold mod " + mq.get_str();
  return report;
}

}  // namespace quadsieve::contfrac
