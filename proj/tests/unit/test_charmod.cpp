#include <doctest.h>

#include <random>
#include <set>

#include "fixtures.hpp"
#include "quadsieve/arith.hpp"
#include "quadsieve/charmod.hpp"
#include "quadsieve/errors.hpp"

using namespace quadsieve;
using namespace quadsieve::charmod;

namespace {

CharacterSpec chi1_spec() { return fixtures::bundled_specs().at(0); }

std::string failed_check(CharacterSpec spec) {
  const auto report = inspect(spec);
  const auto* f = report.first_failure();
  return f ? f->name : "";
}

}  // namespace

TEST_SUITE("charmod") {

TEST_CASE("evaluate on chi1") {
  const CharacterModI chi(chi1_spec());
  // 2 generates mod 25; 2 = 3^2 mod 7, so chi(2) = 8 * 47^2
  CHECK(evaluate(chi, 2).value == 8 * arith::pow_mod(47, 2, 61) % 61);
  // a = 2 mod 25 and 1 mod 7 isolates the mod-25 component
  CHECK(evaluate(chi, 127).value == 8);
  CHECK(evaluate(chi, 52).value == 10);
  for (std::int64_t a : {0, 5, 10, 7, 14, 35, 175, -5}) CHECK(evaluate(chi, a).value == 0);
  CHECK(evaluate(chi, -1).value == 60);
  for (std::int64_t a = -400; a < 400; ++a) CHECK(chi(a) == evaluate(chi, a).value);
}

TEST_CASE("validation accepts the four stages and names failures") {
  for (const auto& spec : fixtures::bundled_specs()) {
    const auto report = validate(spec);
    CHECK(report.ok());
  }
  auto bad = chi1_spec();
  bad.components[0].generator = 5;
  CHECK(failed_check(bad) == "generator_unit");
  CHECK_THROWS_AS(CharacterModI{bad}, ValidationError);
  try {
    CharacterModI c(bad);
  } catch (const ValidationError& e) {
    CHECK(e.check() == "generator_unit");
  }

  bad = chi1_spec();
  bad.components[0].image = 1;
  CHECK(failed_check(bad) == "nontrivial_component");

  bad = chi1_spec();
  bad.components[0].generator = 6;  // 6 has order 5 mod 25
  CHECK(failed_check(bad) == "primitive_root");

  bad = chi1_spec();
  bad.components[1].image = 2;  // 2 has order 60 mod 61, not dividing 6
  CHECK(failed_check(bad) == "image_order");

  bad = chi1_spec();
  bad.conductor = 176;
  CHECK(failed_check(bad) == "odd_conductor");

  bad = chi1_spec();
  bad.conductor = 525;
  CHECK(failed_check(bad) == "conductor_product");

  bad = chi1_spec();
  bad.target_prime = 63;
  CHECK(failed_check(bad) == "target_prime");

  // 8^5 has order 4 mod 61 and is induced from mod 5
  bad = chi1_spec();
  bad.components[0].image = arith::pow_mod(8, 5, 61);
  CHECK(failed_check(bad) == "primitive_component");

  // even character: square of chi1
  bad = chi1_spec();
  for (auto& c : bad.components) c.image = c.image * c.image % 61;
  bad.root.reset();
  const auto name = failed_check(bad);
  CHECK((name == "odd_character" || name == "primitive_component"));
}

TEST_CASE("m_char") {
  const auto specs = fixtures::bundled_specs();
  for (const auto& spec : specs) CHECK(m_char(CharacterModI(spec)).value == 0);
  CharacterSpec quad{"quad3", 3, 5, {{3, 2, 4}}, std::nullopt, ""};
  CHECK(m_char(CharacterModI(quad)).value == 4);
}

TEST_CASE("q_form") {
  CHECK(q_form(0, 0, 1) == 1);
  CHECK(q_form(2, 1, 1) == -2);
  CHECK(q_form(8, 3, 5) == -104);
}

TEST_CASE("a_sum and b_sum against published rows") {
  const auto specs = fixtures::bundled_specs();
  const CharacterModI chi1(specs[0]), chi2(specs[1]), chi3(specs[2]), chi4(specs[3]);
  CHECK(a_sum(chi1, 8).value == 0);
  CHECK(a_sum(chi1, 18).value == 34);
  CHECK(a_sum(chi3, 48).value == 1347);
  CHECK(b_sum(chi1, 8).value == 33);
  CHECK(b_sum(chi2, 162).value == 1498);
  CHECK(b_sum(chi4, 48).value == 13);
}

TEST_CASE("t_transform") {
  CHECK(t_transform(2, 5, 0, 3) == std::pair<std::int64_t, std::int64_t>{3, 0});
  CHECK(t_transform(8, 175, 4, 0) == std::pair<std::int64_t, std::int64_t>{143, 4});
  for (std::int64_t c = 0; c < 5; ++c) {
    for (std::int64_t d = 0; d < 5; ++d) {
      const auto once = t_transform(2, 5, c, d);
      const auto twice = t_transform(2, 5, once.first, once.second);
      CHECK(twice.second == once.first);
    }
  }
}

TEST_CASE("multiplicativity and vanishing exhaustive per stage") {
  for (const auto& spec : fixtures::bundled_specs()) {
    const CharacterModI chi(spec);
    const std::int64_t q = chi.conductor(), r = chi.target_prime();
    for (std::int64_t a = 0; a < q; ++a) {
      CHECK(((chi(a) == 0) == (arith::gcd(a, q) != 1)));
      for (std::int64_t b = 0; b < q; ++b) {
        if (chi(a * b) != arith::mul_mod(chi(a), chi(b), r)) {
          FAIL("multiplicativity fails for " << spec.label << " at " << a << "," << b);
        }
      }
    }
    CHECK(chi(-1) == r - 1);
  }
}

TEST_CASE("T flips the character sign and permutes the grid") {
  std::mt19937_64 gen(11);
  for (const auto& spec : fixtures::bundled_specs()) {
    const CharacterModI chi(spec);
    const std::int64_t q = chi.conductor(), r = chi.target_prime();
    for (int trial = 0; trial < 3; ++trial) {
      const std::int64_t mult = 2 * static_cast<std::int64_t>(gen() % 500);
      std::set<std::pair<std::int64_t, std::int64_t>> image;
      for (std::int64_t c = 0; c < q; ++c) {
        for (std::int64_t d = 0; d < q; ++d) {
          const auto [c2, d2] = t_transform(mult, q, c, d);
          image.insert({c2, d2});
          const std::int64_t before = chi(q_form(mult, c, d));
          const std::int64_t after = chi(q_form(mult, c2, d2));
          if (before == 0) continue;
          if (after != r - before) FAIL("sign flip fails for " << spec.label << " at " << c << "," << d);
        }
      }
      CHECK(image.size() == static_cast<std::size_t>(q * q));
    }
  }
}

TEST_CASE("shift identity A(2n) = A(2n0) + 2P B(2n0)") {
  std::mt19937_64 gen(2024);
  for (const auto& spec : fixtures::bundled_specs()) {
    const CharacterModI chi(spec);
    const std::int64_t q = chi.conductor(), r = chi.target_prime();
    const int samples = q > 100 ? 6 : 12;
    for (int i = 0; i < samples; ++i) {
      const std::int64_t n = static_cast<std::int64_t>(gen() % 100000);
      const std::int64_t n0 = n % q, P = n / q;
      const std::int64_t lhs = a_sum(chi, 2 * n).value;
      const std::int64_t rhs = arith::mod(a_sum(chi, 2 * n0).value + arith::mul_mod(2 * P % r, b_sum(chi, 2 * n0).value, r), r);
      CHECK(lhs == rhs);
      // B depends on its argument only mod q
      CHECK(b_sum(chi, 2 * n).value == b_sum(chi, 2 * n0).value);
    }
  }
}

}  // TEST_SUITE
