#include "quadsieve/charmod.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "quadsieve/errors.hpp"

namespace quadsieve::charmod {

using arith::mod;
using arith::pow_mod;

namespace {

bool is_odd_prime_power(std::int64_t m, std::int64_t* prime) {
  if (m < 3 || m % 2 == 0) return false;
  auto ps = arith::prime_divisors(static_cast<std::uint64_t>(m));
  if (ps.size() != 1) return false;
  *prime = static_cast<std::int64_t>(ps.front());
  return true;
}

std::string str(std::int64_t v) { return std::to_string(v); }

// Exponent table: log_g(a) for units a mod m, -1 otherwise.
std::vector<std::int64_t> log_table(const CharacterComponent& c) {
  std::vector<std::int64_t> logs(static_cast<std::size_t>(c.modulus), -1);
  std::int64_t x = 1;
  for (std::int64_t e = 0; logs[static_cast<std::size_t>(x)] < 0; ++e) {
    logs[static_cast<std::size_t>(x)] = e;
    x = x * c.generator % c.modulus;
  }
  return logs;
}

std::vector<std::int64_t> build_table(const CharacterSpec& spec) {
  const std::int64_t q = spec.conductor;
  const std::int64_t r = spec.target_prime;
  std::vector<std::int64_t> table(static_cast<std::size_t>(q), 1);
  for (const auto& c : spec.components) {
    const auto logs = log_table(c);
    for (std::int64_t a = 0; a < q; ++a) {
      auto& v = table[static_cast<std::size_t>(a)];
      const std::int64_t e = logs[static_cast<std::size_t>(a % c.modulus)];
      v = e < 0 ? 0 : arith::mul_mod(v, pow_mod(c.image, static_cast<std::uint64_t>(e), r), r);
    }
  }
  return table;
}

}  // namespace

bool ValidationReport::ok() const { return first_failure() == nullptr; }

const CheckResult* ValidationReport::first_failure() const {
  auto it = std::find_if(checks.begin(), checks.end(), [](const CheckResult& c) { return !c.passed; });
  return it == checks.end() ? nullptr : &*it;
}

ValidationReport inspect(const CharacterSpec& spec) {
  ValidationReport report;
  auto check = [&](const std::string& name, bool passed, const std::string& detail) {
    report.checks.push_back({name, passed, detail});
    return passed;
  };
  const std::int64_t q = spec.conductor;
  const std::int64_t r = spec.target_prime;

  if (!check("target_prime", r > 2 && arith::is_prime(static_cast<std::uint64_t>(r)), "r = " + str(r))) return report;
  if (!check("odd_conductor", q >= 3 && q % 2 == 1, "q = " + str(q))) return report;
  if (!check("components_present", !spec.components.empty(), "no components")) return report;

  std::int64_t product = 1;
  for (const auto& c : spec.components) {
    const std::string where = "component (" + str(c.modulus) + ", " + str(c.generator) + ", " + str(c.image) + ")";
    std::int64_t p = 0;
    if (!check("component_modulus", is_odd_prime_power(c.modulus, &p), where + ": modulus must be an odd prime power"))
      return report;
    if (!check("coprime_moduli", std::gcd(product, c.modulus) == 1, where + ": modulus shares a factor")) return report;
    product *= c.modulus;
    if (!check("generator_unit", std::gcd(mod(c.generator, c.modulus), c.modulus) == 1,
               where + ": " + str(c.generator) + " is not a unit mod " + str(c.modulus)))
      return report;
    const auto group_order = static_cast<std::int64_t>(arith::euler_phi(static_cast<std::uint64_t>(c.modulus)));
    if (!check("primitive_root",
               static_cast<std::int64_t>(arith::multiplicative_order(c.generator, c.modulus)) == group_order,
               where + ": generator is not a primitive root"))
      return report;
    if (!check("image_range", c.image > 0 && c.image < r, where + ": image must lie in [1, r)")) return report;
    if (!check("image_order", pow_mod(c.image, static_cast<std::uint64_t>(group_order), r) == 1,
               where + ": image order does not divide " + str(group_order)))
      return report;
    if (!check("nontrivial_component", c.image != 1, where + ": trivial component")) return report;
    const bool induced = c.modulus != p && pow_mod(c.image, static_cast<std::uint64_t>(group_order / p), r) == 1;
    if (!check("primitive_component", !induced, where + ": induced from modulus " + str(c.modulus / p))) return report;
  }
  if (!check("conductor_product", product == q, "product of moduli " + str(product) + " != q = " + str(q)))
    return report;

  if (spec.root) {
    const auto [res, order] = *spec.root;
    bool ok = res > 0 && res < r && order > 0 &&
              static_cast<std::int64_t>(arith::multiplicative_order(res, r)) == order;
    std::string detail = "root " + str(res) + " does not have order " + str(order) + " mod " + str(r);
    for (const auto& c : spec.components) {
      if (!ok) break;
      try {
        (void)arith::discrete_log(res, c.image, r);
      } catch (const NoSolutionError&) {
        ok = false;
        detail = "image " + str(c.image) + " is not a power of root " + str(res);
      }
    }
    if (!check("root_of_unity", ok, detail)) return report;
  }

  const auto table = build_table(spec);
  const std::int64_t chi_minus_one = table[static_cast<std::size_t>(q - 1)];
  if (!check("odd_character", chi_minus_one == r - 1, "chi(-1) = " + str(chi_minus_one) + " mod " + str(r)))
    return report;

  if (q <= 2000) {
    std::string detail = "exhaustive over [0," + str(q) + ")^2";
    bool ok = true;
    for (std::int64_t a = 0; a < q && ok; ++a) {
      for (std::int64_t b = 0; b < q; ++b) {
        const auto lhs = table[static_cast<std::size_t>(a * b % q)];
        const auto rhs = arith::mul_mod(table[static_cast<std::size_t>(a)], table[static_cast<std::size_t>(b)], r);
        if (lhs != rhs) {
          ok = false;
          detail = "chi(" + str(a) + "*" + str(b) + ") != chi(" + str(a) + ") chi(" + str(b) + ")";
          break;
        }
      }
    }
    check("multiplicativity", ok, detail);
  } else {
    check("multiplicativity", true, "skipped for q > 2000");
  }
  return report;
}

ValidationReport validate(const CharacterSpec& spec) {
  auto report = inspect(spec);
  if (const auto* failure = report.first_failure()) throw ValidationError(failure->name, failure->detail);
  return report;
}

CharacterModI::CharacterModI(CharacterSpec spec)
    : spec_(std::move(spec)), report_(validate(spec_)), table_(build_table(spec_)) {}

arith::Residue evaluate(const CharacterModI& chi, std::int64_t a) {
  const std::int64_t r = chi.target_prime();
  std::int64_t value = 1;
  for (const auto& c : chi.components()) {
    const std::int64_t x = mod(a, c.modulus);
    if (std::gcd(x, c.modulus) != 1) return arith::Residue::make(0, r);
    const auto b = arith::discrete_log(c.generator, x, c.modulus);
    value = arith::mul_mod(value, pow_mod(c.image, b, r), r);
  }
  return arith::Residue::make(value, r);
}

arith::Residue m_char(const CharacterModI& chi) {
  const std::int64_t q = chi.conductor();
  const std::int64_t r = chi.target_prime();
  std::int64_t sum = 0;
  for (std::int64_t a = 1; a <= q; ++a) sum = (sum + arith::mul_mod(a, chi(a), r)) % r;
  return arith::Residue::make(sum, r);
}

std::int64_t q_form(std::int64_t a, std::int64_t c, std::int64_t d) { return d * d - c * c - a * c * d; }

namespace {

// Shared driver: sum over the grid of chi(Q_a(C,D)) * weight(C, D) mod r.
template <typename Weight>
arith::Residue grid_sum(const CharacterModI& chi, std::int64_t a, Weight weight) {
  const std::int64_t q = chi.conductor();
  const std::int64_t r = chi.target_prime();
  const std::int64_t am = mod(a, q);
  std::int64_t sum = 0;
  for (std::int64_t c = 0; c < q; ++c) {
    for (std::int64_t d = 0; d < q; ++d) {
      const std::int64_t value = chi((d * d - c * c - am * c * d) % q);
      if (value == 0) continue;
      sum = (sum + arith::mul_mod(value, weight(c, d), r)) % r;
    }
  }
  return arith::Residue::make(sum, r);
}

}  // namespace

arith::Residue a_sum(const CharacterModI& chi, std::int64_t a) {
  const std::int64_t q = chi.conductor();
  return grid_sum(chi, a, [&](std::int64_t c, std::int64_t d) {
    return arith::ceil_div(a * c - d, q) * (c - q);
  });
}

arith::Residue b_sum(const CharacterModI& chi, std::int64_t a) {
  const std::int64_t q = chi.conductor();
  return grid_sum(chi, a, [&](std::int64_t c, std::int64_t) { return c * (c - q); });
}

std::pair<std::int64_t, std::int64_t> t_transform(std::int64_t mult, std::int64_t q, std::int64_t c, std::int64_t d) {
  const std::int64_t x = d - mult * c;
  return {x - q * arith::floor_div(x, q), c};
}

}  // namespace quadsieve::charmod
