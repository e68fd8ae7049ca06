#pragma once

// Dirichlet characters of odd composite conductor whose values are pushed
// through a ring map into Z/r (the reduction modulo a prime ideal I above r
// with residue field Z/r). The ideal itself is never materialized: each
// component contributes the residue assigned to chi(generator).

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "quadsieve/arith.hpp"

namespace quadsieve::charmod {

/// One prime-power factor of the conductor.
struct CharacterComponent {
  std::int64_t modulus = 0;    // odd prime power >= 3
  std::int64_t generator = 0;  // primitive root mod `modulus`
  std::int64_t image = 0;      // chi(generator) as a residue mod r
};

/// The residue taken by a primitive root of unity of the given order under
/// the map to Z/r (e.g. i*omega*xi -> 10 with order 60).
struct RootOfUnityImage {
  std::int64_t residue = 0;
  std::int64_t order = 0;
};

/// Raw character description as read from a stage config.
struct CharacterSpec {
  std::string label;
  std::int64_t conductor = 0;
  std::int64_t target_prime = 0;
  std::vector<CharacterComponent> components;
  std::optional<RootOfUnityImage> root;
  std::string ideal;  // documentation only
};

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ValidationReport {
  std::vector<CheckResult> checks;

  bool ok() const;
  /// First failed check, or nullptr.
  const CheckResult* first_failure() const;
};

/// Runs every structural check without throwing.
ValidationReport inspect(const CharacterSpec& spec);

/// A validated character with a precomputed value table on [0, q).
class CharacterModI {
 public:
  /// Validates `spec`; throws ValidationError naming the first failed check.
  explicit CharacterModI(CharacterSpec spec);

  const std::string& label() const { return spec_.label; }
  std::int64_t conductor() const { return spec_.conductor; }
  std::int64_t target_prime() const { return spec_.target_prime; }
  const std::vector<CharacterComponent>& components() const { return spec_.components; }
  const std::optional<RootOfUnityImage>& root() const { return spec_.root; }
  const CharacterSpec& spec() const { return spec_; }
  const ValidationReport& report() const { return report_; }

  /// chi(a) mod r; 0 when gcd(a, q) > 1.
  std::int64_t operator()(std::int64_t a) const { return table_[static_cast<std::size_t>(arith::mod(a, spec_.conductor))]; }

 private:
  CharacterSpec spec_;
  ValidationReport report_;
  std::vector<std::int64_t> table_;
};

/// Component-by-component evaluation (does not use the cached table).
arith::Residue evaluate(const CharacterModI& chi, std::int64_t a);

/// Throws ValidationError on the first failed check, else returns the report.
ValidationReport validate(const CharacterSpec& spec);

/// m_chi = sum_{a=1}^{q} a chi(a) mod r.
arith::Residue m_char(const CharacterModI& chi);

/// D^2 - C^2 - a C D.
std::int64_t q_form(std::int64_t a, std::int64_t c, std::int64_t d);

/// A_chi(a) = sum_{0<=C,D<q} chi(D^2-C^2-aCD) ceil((aC-D)/q) (C-q) mod r.
arith::Residue a_sum(const CharacterModI& chi, std::int64_t a);

/// B_chi(a) = sum_{0<=C,D<q} chi(D^2-C^2-aCD) C (C-q) mod r.
arith::Residue b_sum(const CharacterModI& chi, std::int64_t a);

/// T(C, D) = ((D - mult*C) mod q, C); a permutation of [0,q)^2.
std::pair<std::int64_t, std::int64_t> t_transform(std::int64_t mult, std::int64_t q, std::int64_t c, std::int64_t d);

}  // namespace quadsieve::charmod
