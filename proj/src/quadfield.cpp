#include "quadsieve/quadfield.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <numeric>
#include <sstream>
#include <tuple>

#include <boost/math/special_functions/expint.hpp>

#include "quadsieve/arith.hpp"
#include "quadsieve/errors.hpp"
#include "quadsieve/parallel.hpp"

namespace quadsieve::quadfield {

namespace {

using i128 = __int128;

// Smallest-prime-factor table for fast divisor enumeration in scans.
constexpr std::uint32_t kSpfLimit = 1U << 23;

const std::vector<std::uint32_t>& spf_table() {
  static std::vector<std::uint32_t> table;
  static std::once_flag once;
  std::call_once(once, [] {
    table.assign(kSpfLimit, 0);
    for (std::uint32_t i = 2; i < kSpfLimit; ++i) {
      if (table[i] != 0) continue;
      for (std::uint64_t j = i; j < kSpfLimit; j += i) {
        if (table[j] == 0) table[j] = i;
      }
    }
  });
  return table;
}

std::vector<std::pair<std::int64_t, int>> factorize(std::int64_t n) {
  std::vector<std::pair<std::int64_t, int>> out;
  auto push = [&](std::int64_t p) {
    if (!out.empty() && out.back().first == p) {
      ++out.back().second;
    } else {
      out.emplace_back(p, 1);
    }
  };
  if (n < static_cast<std::int64_t>(kSpfLimit)) {
    const auto& spf = spf_table();
    while (n > 1) {
      const std::int64_t p = spf[static_cast<std::size_t>(n)];
      push(p);
      n /= p;
    }
    return out;
  }
  for (std::int64_t p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
    while (n % p == 0) {
      push(p);
      n /= p;
    }
  }
  if (n > 1) push(n);
  return out;
}

std::vector<std::int64_t> divisors(std::int64_t n) {
  std::vector<std::int64_t> out{1};
  for (const auto& [p, e] : factorize(n)) {
    const std::size_t base = out.size();
    std::int64_t pk = 1;
    for (int i = 0; i < e; ++i) {
      pk *= p;
      for (std::size_t j = 0; j < base; ++j) out.push_back(out[j] * pk);
    }
  }
  return out;
}

// b' = -b mod 2|c| in the window fixed by indefinite reduction.
std::int64_t rho_b(std::int64_t b, std::int64_t c, std::int64_t d) {
  const std::int64_t two_c = 2 * std::abs(c);
  const std::int64_t root = static_cast<std::int64_t>(arith::isqrt(static_cast<std::uint64_t>(d)));
  if (static_cast<i128>(c) * c > d) {
    // -|c| < b' <= |c|
    std::int64_t bp = arith::mod(-b, two_c);
    if (bp > std::abs(c)) bp -= two_c;
    return bp;
  }
  return root - arith::mod(root + b, two_c);
}

void check_discriminant(std::int64_t d) {
  if (d <= 0) throw DomainError("discriminant must be positive, got " + std::to_string(d));
  if (d > kMaxDiscriminant) {
    throw UnsupportedSizeError("discriminant " + std::to_string(d) + " exceeds " + std::to_string(kMaxDiscriminant));
  }
  if (arith::is_square(mpz_class(static_cast<long>(d)))) {
    throw DomainError("discriminant " + std::to_string(d) + " is a perfect square");
  }
}

// Squarefree part of d in the sense of the field, D = d or d/4.
std::int64_t field_radicand(std::int64_t d) { return d % 4 == 0 ? d / 4 : d; }

mpz_class to_mpz(std::int64_t v) { return mpz_class(static_cast<long>(v)); }

}  // namespace

mpz_class d_mcz(std::uint64_t b, std::uint64_t s, unsigned k) { return contfrac::family_discriminant(b, s, k); }

bool is_fundamental(std::int64_t d) {
  if (d <= 1) return false;
  if (arith::mod(d, 4) == 1) return arith::is_squarefree(static_cast<std::uint64_t>(d));
  if (d % 4 != 0) return false;
  const std::int64_t m = d / 4;
  const std::int64_t r = arith::mod(m, 4);
  return (r == 2 || r == 3) && arith::is_squarefree(static_cast<std::uint64_t>(m));
}

std::int64_t discriminant_of(std::int64_t D) {
  if (D < 2 || !arith::is_squarefree(static_cast<std::uint64_t>(D))) {
    throw DomainError("D = " + std::to_string(D) + " is not a squarefree integer >= 2");
  }
  return arith::mod(D, 4) == 1 ? D : 4 * D;
}

bool is_reduced(const FormClass& f, std::int64_t d) {
  const i128 b = f.b;
  const i128 a2 = 2 * static_cast<i128>(std::abs(f.a));
  if (b <= 0 || b * b >= d) return false;
  if ((a2 + b) * (a2 + b) <= d) return false;  // sqrt(d) - b < 2|a|
  return a2 - b <= 0 || (a2 - b) * (a2 - b) < d;  // 2|a| < sqrt(d) + b
}

FormClass rho(const FormClass& f) {
  if (f.c == 0) throw DomainError("rho: form with c = 0");
  const std::int64_t d = f.discriminant();
  const std::int64_t bp = rho_b(f.b, f.c, d);
  const i128 num = static_cast<i128>(bp) * bp - d;
  return {f.c, bp, static_cast<std::int64_t>(num / (4 * static_cast<i128>(f.c)))};
}

FormClass reduce(FormClass f) {
  const std::int64_t d = f.discriminant();
  check_discriminant(d);
  // |c| shrinks at least geometrically until it drops under sqrt(d)
  for (int step = 0; step < 4096; ++step) {
    if (is_reduced(f, d)) return f;
    f = rho(f);
  }
  throw Error("reduce: no reduced form reached for discriminant " + std::to_string(d));
}

std::vector<FormClass> reduced_forms(std::int64_t d) {
  check_discriminant(d);
  std::vector<FormClass> out;
  const std::int64_t root = static_cast<std::int64_t>(arith::isqrt(static_cast<std::uint64_t>(d)));
  for (std::int64_t b = (d % 2 == 0 ? 2 : 1); b <= root; b += 2) {
    const std::int64_t n = (d - b * b) / 4;
    for (std::int64_t a : divisors(n)) {
      if (!is_reduced({a, b, -n / a}, d)) continue;
      out.push_back({a, b, -n / a});
      out.push_back({-a, b, n / a});
    }
  }
  std::sort(out.begin(), out.end(), [](const FormClass& x, const FormClass& y) {
    return std::tie(x.a, x.b, x.c) < std::tie(y.a, y.b, y.c);
  });
  return out;
}

ClassNumber class_number_forms(std::int64_t d) {
  if (!is_fundamental(d)) throw DomainError(std::to_string(d) + " is not a fundamental discriminant");
  check_discriminant(d);
  const auto forms = reduced_forms(d);
  auto index_of = [&](const FormClass& f) {
    auto it = std::lower_bound(forms.begin(), forms.end(), f, [](const FormClass& x, const FormClass& y) {
      return std::tie(x.a, x.b, x.c) < std::tie(y.a, y.b, y.c);
    });
    if (it == forms.end() || !(*it == f)) {
      throw InconsistencyError("rho left the reduced forms of discriminant " + std::to_string(d));
    }
    return static_cast<std::size_t>(it - forms.begin());
  };
  std::vector<char> seen(forms.size(), 0);
  ClassNumber out;
  for (std::size_t i = 0; i < forms.size(); ++i) {
    if (seen[i]) continue;
    ++out.h_narrow;
    std::size_t j = i;
    while (!seen[j]) {
      seen[j] = 1;
      j = index_of(rho(forms[j]));
    }
  }
  const auto unit = contfrac::fundamental_unit(to_mpz(field_radicand(d)));
  out.h = unit.norm == -1 ? out.h_narrow : out.h_narrow / 2;
  return out;
}

AnalyticEstimate class_number_estimate(std::int64_t d, std::int64_t terms) {
  if (!is_fundamental(d)) throw DomainError(std::to_string(d) + " is not a fundamental discriminant");
  check_discriminant(d);
  constexpr double pi = std::numbers::pi;
  constexpr double eps = std::numeric_limits<double>::epsilon();
  const double dd = static_cast<double>(d);
  const double sd = std::sqrt(dd);
  if (terms <= 0) terms = static_cast<std::int64_t>(std::ceil(std::sqrt(40.0 * dd / pi))) + 1;

  // L(1, chi_d) = sum chi_d(n) [erfc(n sqrt(pi/d))/n + E1(pi n^2/d)/sqrt(d)]
  double sum = 0, comp = 0, abs_sum = 0;
  const double c = std::sqrt(pi / dd);
  for (std::int64_t n = 1; n <= terms; ++n) {
    const int chi = arith::kronecker(d, n);
    if (chi == 0) continue;
    const double x = static_cast<double>(n);
    const double t = std::erfc(x * c) / x + boost::math::expint(1, pi * x * x / dd) / sd;
    const double term = chi * t;
    const double y = sum + term;
    comp += std::abs(sum) >= std::abs(term) ? (sum - y) + term : (term - y) + sum;
    sum = y;
    abs_sum += t;
  }
  const double L = sum + comp;
  const double N = static_cast<double>(terms);
  const double tail = 2 * sd / (pi * N * N) * std::exp(-pi * N * N / dd) * dd / (2 * pi * N);
  const double rounding = (64.0 + 4.0 * N) * eps * abs_sum;
  const double err_L = tail + rounding;

  const auto unit = contfrac::fundamental_unit(to_mpz(field_radicand(d)));
  const double R = unit.log(to_mpz(field_radicand(d)));
  const double err_R = 64 * eps * R;

  AnalyticEstimate est;
  est.terms = terms;
  est.value = sd * L / (2 * R);
  est.error_bound = sd * err_L / (2 * R) + est.value * (err_R / R + 16 * eps);
  return est;
}

std::int64_t class_number_analytic(std::int64_t d, std::int64_t terms) {
  const auto est = class_number_estimate(d, terms);
  const double r = std::round(est.value);
  if (r < 1 || std::abs(est.value - r) + est.error_bound >= 0.5) {
    std::ostringstream ss;
    ss << "class_number_analytic(" << d << "): estimate " << est.value << " +- " << est.error_bound
       << " does not isolate an integer with " << est.terms << " terms";
    throw PrecisionError(ss.str());
  }
  return static_cast<std::int64_t>(r);
}

FieldData field_data(std::int64_t D) {
  FieldData fd;
  fd.d = discriminant_of(D);
  fd.D = to_mpz(D);
  const auto forms = class_number_forms(fd.d);
  const auto analytic = class_number_analytic(fd.d);
  if (forms.h != analytic) {
    throw InconsistencyError("class number oracles disagree for d = " + std::to_string(fd.d) + ": forms " +
                             std::to_string(forms.h) + ", analytic " + std::to_string(analytic));
  }
  fd.unit = contfrac::fundamental_unit(fd.D);
  fd.unit_norm = fd.unit.norm;
  fd.h = forms.h;
  fd.h_narrow = forms.h_narrow;
  return fd;
}

std::vector<ScanRow> family_scan_n2plus1(std::int64_t n_max, bool odd_only, unsigned jobs) {
  if (n_max < 1) throw DomainError("family_scan_n2plus1: n_max must be >= 1");
  std::vector<std::int64_t> ns;
  for (std::int64_t n = 1; n <= n_max; ++n) {
    if (!odd_only || n % 2 == 1) ns.push_back(n);
  }
  return parallel_map(ns.size(), jobs, [&](std::size_t i) {
    ScanRow row;
    row.n = ns[i];
    row.D = row.n * row.n + 1;
    row.squarefree = arith::is_squarefree(static_cast<std::uint64_t>(row.D));
    if (row.squarefree) row.h = field_data(row.D).h;
    return row;
  });
}

std::string format_scan(const std::vector<ScanRow>& rows) {
  std::ostringstream ss;
  ss << "n\tD\tsquarefree\th\n";
  for (const auto& r : rows) {
    ss << r.n << '\t' << r.D << '\t' << (r.squarefree ? "true" : "false") << '\t';
    if (r.squarefree) {
      ss << r.h;
    } else {
      ss << '-';
    }
    ss << '\n';
  }
  return ss.str();
}

FieldData family_field(std::uint64_t b, std::uint64_t s, unsigned k) {
  const mpz_class D = d_mcz(b, s, k);
  if (D > kMaxDiscriminant / 4) {
    throw UnsupportedSizeError("D(" + std::to_string(b) + "," + std::to_string(s) + "," + std::to_string(k) +
                               ") = " + D.get_str() + " is beyond the oracle range");
  }
  return field_data(D.get_si());
}

bool PropReport::ok() const {
  return std::all_of(cases.begin(), cases.end(), [](const PropCase& c) { return c.passed; });
}

std::string PropReport::to_string() const {
  std::ostringstream ss;
  ss << "group\tb\ts\tk\tD\tsquarefree\th\tresult\n";
  for (const auto& c : cases) {
    ss << c.group << '\t' << c.b << '\t' << c.s << '\t' << c.k << '\t' << c.D.get_str() << '\t'
       << (c.squarefree ? "true" : "false") << '\t';
    if (c.squarefree) {
      ss << c.h;
    } else {
      ss << '-';
    }
    ss << '\t' << (!c.squarefree ? "skip" : c.passed ? "pass" : "FAIL") << '\n';
  }
  return ss.str();
}

PropReport prop_checks(unsigned jobs) {
  std::vector<PropCase> cases;
  auto add = [&](const char* group, std::uint64_t b, std::uint64_t s, unsigned k) {
    const mpz_class D = d_mcz(b, s, k);
    if (D >= kPropCheckLimit) return;
    PropCase c;
    c.group = group;
    c.b = b;
    c.s = s;
    c.k = k;
    c.D = D;
    cases.push_back(std::move(c));
  };
  for (std::uint64_t s : {2, 5, 6, 8, 11, 12, 14}) add("case1", 1, s, 1);
  for (unsigned k = 1; k <= 3; ++k) {
    for (std::uint64_t b = 1; b <= 12; ++b) {
      for (std::uint64_t s = 1; s <= 12; ++s) {
        if (std::gcd(b, s) > 2) add("gcd", b, s, k);
      }
    }
  }
  for (unsigned k = 1; k <= 2; ++k) {
    for (std::uint64_t b = 1; b <= 6; ++b) {
      for (std::uint64_t s = 1; s <= 6; ++s) {
        if (!arith::is_prime(4 * b * s + 1)) add("composite_tau", b, s, k);
      }
    }
  }
  auto done = parallel_map(cases.size(), jobs, [&](std::size_t i) {
    PropCase c = cases[i];
    c.squarefree = arith::is_squarefree(c.D);
    if (c.squarefree) {
      c.h = field_data(c.D.get_si()).h;
      c.passed = c.h > 1;
    }
    return c;
  });
  return PropReport{std::move(done)};
}

bool small_norm_square_property(std::int64_t n, std::int64_t coeff_bound) {
  if (n < 3 || n % 2 == 0) throw DomainError("small_norm_square_property: n must be odd and >= 3");
  const i128 D = static_cast<i128>(n) * n + 1;
  // the norm depends on f only through f^2, so f > 0 covers f != 0
  for (std::int64_t f = 1; f <= coeff_bound; ++f) {
    for (std::int64_t e = -coeff_bound; e <= coeff_bound; ++e) {
      const i128 norm = static_cast<i128>(e) * e - D * f * f;
      const i128 mag = norm < 0 ? -norm : norm;
      if (mag == 0 || mag >= 2 * n) continue;
      const auto m = static_cast<std::uint64_t>(mag);
      const std::uint64_t r = arith::isqrt(m);
      if (r * r != m) return false;
    }
  }
  return true;
}

}  // namespace quadsieve::quadfield
