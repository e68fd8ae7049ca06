#pragma once

// Class numbers of real quadratic fields. Two independent oracles: counting
// cycles of reduced indefinite forms, and the analytic class number formula
// with a rigorous truncation bound.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "quadsieve/contfrac.hpp"

namespace quadsieve::quadfield {

/// Largest discriminant the form and analytic oracles accept.
inline constexpr std::int64_t kMaxDiscriminant = 4'000'000'000LL;

struct FormClass {
  std::int64_t a = 0, b = 0, c = 0;

  std::int64_t discriminant() const { return b * b - 4 * a * c; }
  friend bool operator==(const FormClass&, const FormClass&) = default;
};

struct FieldData {
  mpz_class D;
  std::int64_t d = 0;
  contfrac::FundamentalUnit unit;
  int unit_norm = 1;
  std::int64_t h = 0;
  std::int64_t h_narrow = 0;
};

struct ClassNumber {
  std::int64_t h_narrow = 0;
  std::int64_t h = 0;
};

/// D(b, s, k); b = 0 is allowed.
mpz_class d_mcz(std::uint64_t b, std::uint64_t s, unsigned k);

bool is_fundamental(std::int64_t d);

/// d = D for D = 1 mod 4, 4D otherwise. Throws DomainError for D < 2 or
/// D not squarefree.
std::int64_t discriminant_of(std::int64_t D);

bool is_reduced(const FormClass& f, std::int64_t d);

/// One step of indefinite reduction: (a, b, c) -> (c, b', (b'^2 - d)/(4c)).
FormClass rho(const FormClass& f);

/// Applies rho until the form is reduced. Throws DomainError for square
/// or non-positive discriminants.
FormClass reduce(FormClass f);

/// All reduced forms of discriminant d, sorted.
std::vector<FormClass> reduced_forms(std::int64_t d);

/// Narrow class number by cycle count; h from the norm of the fundamental
/// unit. Throws DomainError unless d is a positive fundamental discriminant.
ClassNumber class_number_forms(std::int64_t d);

struct AnalyticEstimate {
  double value = 0;        // sqrt(d) L(1, chi_d) / (2 log eps)
  double error_bound = 0;  // truncation plus rounding
  std::int64_t terms = 0;
};

/// The real-valued estimate behind class_number_analytic.
AnalyticEstimate class_number_estimate(std::int64_t d, std::int64_t terms = 0);

/// round(estimate); throws PrecisionError when the bound does not isolate
/// a single integer.
std::int64_t class_number_analytic(std::int64_t d, std::int64_t terms = 0);

/// Field data for squarefree D >= 2, cross-checked by both oracles.
FieldData field_data(std::int64_t D);

struct ScanRow {
  std::int64_t n = 0;
  std::int64_t D = 0;
  bool squarefree = false;
  std::int64_t h = 0;  // 0 when D is not squarefree
};

/// Class numbers of Q(sqrt(n^2+1)) for 1 <= n <= n_max. Both oracles run for
/// every squarefree D and must agree (InconsistencyError otherwise).
std::vector<ScanRow> family_scan_n2plus1(std::int64_t n_max, bool odd_only = false, unsigned jobs = 1);

/// TSV with header `n\tD\tsquarefree\th`.
std::string format_scan(const std::vector<ScanRow>& rows);

struct PropCase {
  std::string group;  // "case1", "gcd", "composite_tau"
  std::uint64_t b = 0, s = 0;
  unsigned k = 0;
  mpz_class D;
  bool squarefree = false;
  std::int64_t h = 0;
  bool passed = true;  // vacuous for non-squarefree D
};

struct PropReport {
  std::vector<PropCase> cases;
  bool ok() const;
  std::string to_string() const;
};

/// Upper bound on D for the sampled family members.
inline constexpr std::int64_t kPropCheckLimit = 100'000'000;

/// h(D(1, s, 1)) > 1 for the listed s, and h > 1 on sampled members with
/// gcd(b, s) > 2 or 4bs + 1 composite, D < kPropCheckLimit.
PropReport prop_checks(unsigned jobs = 1);

/// Field data for one squarefree family member D(b, s, k).
FieldData family_field(std::uint64_t b, std::uint64_t s, unsigned k);

/// Every beta = e + f sqrt(n^2+1), |e|, |f| <= bound, f != 0, with
/// 0 < |N(beta)| < 2n has |N(beta)| a perfect square.
bool small_norm_square_property(std::int64_t n, std::int64_t coeff_bound);

}  // namespace quadsieve::quadfield
