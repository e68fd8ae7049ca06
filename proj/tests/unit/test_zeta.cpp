#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "quadsieve/arith.hpp"
#include "quadsieve/errors.hpp"
#include "quadsieve/zeta.hpp"

using namespace quadsieve;
using namespace quadsieve::zeta;

namespace {

CharacterExact mod3() { return CharacterExact("mod3", 3, {{3, 2, 1, 2}}); }
CharacterExact mod4() { return CharacterExact("mod4", 4, {{4, 3, 1, 2}}); }
CharacterExact mod5_quartic() { return CharacterExact("mod5", 5, {{5, 2, 1, 4}}); }
CharacterExact mod7_sextic() { return CharacterExact("mod7", 7, {{7, 3, 1, 6}}); }

std::vector<CharacterExact> stage_characters() {
  std::vector<CharacterExact> out;
  for (const auto& spec : fixtures::bundled_specs()) out.push_back(CharacterExact::from_mod_i(charmod::CharacterModI(spec)));
  return out;
}

double d(const Real& x) { return static_cast<double>(x); }

}  // namespace

TEST_SUITE("zeta") {

TEST_CASE("cyclotomic arithmetic") {
  CHECK(cyclotomic_polynomial(1) == std::vector<mpz_class>{-1, 1});
  CHECK(cyclotomic_polynomial(4) == std::vector<mpz_class>{1, 0, 1});
  CHECK(cyclotomic_polynomial(6) == std::vector<mpz_class>{1, -1, 1});
  CHECK(cyclotomic_polynomial(12) == std::vector<mpz_class>{1, 0, -1, 0, 1});
  Cyclotomic z(6);
  // 1 - z + z^2 = 0 for a primitive sixth root
  z.add(0, 1);
  z.add(1, -1);
  z.add(2, 1);
  CHECK(z.is_zero());
  const auto v = z.evaluate(128);
  CHECK(std::abs(d(v.re)) < 1e-30);
  Cyclotomic one(6);
  one.add(0, 1);
  CHECK_FALSE(one.is_zero());
  Cyclotomic two(6);
  two.add(3, -2);  // z^3 = -1, so this is 2
  auto q = divide(two, one);
  CHECK(q.ok);
  CHECK(q.integral());
  q = divide(one, two);
  CHECK(q.ok);
  CHECK_FALSE(q.integral());
  CHECK_FALSE(divide(one, Cyclotomic(6)).ok);
}

TEST_CASE("character construction") {
  const auto c = mod3();
  CHECK(c.is_odd());
  CHECK(c.is_primitive());
  CHECK(c.order() == 2);
  CHECK(c.index(0) == -1);
  CHECK(c.index(2) == 1);
  CHECK(mod5_quartic().order() == 4);
  CHECK_THROWS_AS(CharacterExact("bad", 9, {{9, 2, 1, 4}}), ValidationError);  // order 4 does not divide 6
  CHECK_THROWS_AS(CharacterExact("bad", 15, {{5, 2, 1, 4}}), ValidationError);
  CHECK_THROWS_AS(CharacterExact("bad", 5, {{5, 4, 1, 2}}), ValidationError);  // 4 is not a primitive root
  for (const auto& chi : stage_characters()) {
    CHECK(chi.is_odd());
    CHECK(chi.is_primitive());
  }
}

TEST_CASE("exact values reduce to the mod-r character") {
  for (const auto& spec : fixtures::bundled_specs()) {
    const charmod::CharacterModI chi(spec);
    const auto e = CharacterExact::from_mod_i(chi);
    for (std::int64_t a = 0; a < chi.conductor(); ++a) {
      if (arith::gcd(a, chi.conductor()) != 1) continue;
      CHECK(reduce_mod_r(e, a, spec.root->residue, spec.target_prime) == chi(a));
    }
  }
  auto spec = fixtures::bundled_specs()[0];
  spec.root.reset();
  CHECK_THROWS_AS(CharacterExact::from_mod_i(charmod::CharacterModI(spec)), PreconditionError);
}

TEST_CASE("Gauss sums") {
  const auto g = gauss_sum(mod3());
  CHECK(std::abs(d(g.re)) < 1e-60);
  CHECK(std::abs(d(g.im) - std::sqrt(3.0)) < 1e-14);
  for (const auto& chi : stage_characters()) {
    const auto t = gauss_sum(chi);
    const Real diff = abs(t.re * t.re + t.im * t.im - Real(chi.conductor()));
    CHECK(d(diff) < 1e-20);
  }
  const auto t7 = gauss_sum(mod7_sextic());
  CHECK(std::abs(d(t7.abs()) - std::sqrt(7.0)) < 1e-14);
}

TEST_CASE("L(0, chi)") {
  auto v = l_zero(mod3());
  CHECK(std::abs(d(v.re) - 1.0 / 3) < 1e-60);
  CHECK(std::abs(d(v.im)) < 1e-60);
  v = l_zero(mod4());
  CHECK(std::abs(d(v.re) - 0.5) < 1e-60);
}

TEST_CASE("L(2) truncation bound halves when terms double") {
  const auto chi = mod3();
  const auto ref = l_value_2(chi, 20000);
  CHECK(d(ref.error_bound) < 1e-30);
  const auto a = l_value_2(chi, 1000, TailMode::Truncate);
  const auto b = l_value_2(chi, 2000, TailMode::Truncate);
  CHECK(d(b.error_bound) == doctest::Approx(d(a.error_bound) / 2).epsilon(1e-12));
  for (const auto* x : {&a, &b}) {
    const Real diff = sqrt((x->re - ref.re) * (x->re - ref.re) + (x->im - ref.im) * (x->im - ref.im));
    CHECK(diff <= x->error_bound);
  }
  CHECK_THROWS_AS(l_value_2(chi, 2), PreconditionError);
}

TEST_CASE("zeta_K(0) closed form against the product") {
  for (const auto& chi : {mod3(), mod5_quartic(), mod7_sextic()}) {
    for (std::int64_t disc : {8, 12, 13, 17, 24, 29, 40}) {
      if (arith::gcd(chi.conductor(), disc) != 1) continue;
      const auto a = zeta_k_zero(chi, disc);
      const auto b = zeta_k_zero_product(chi, disc);
      CHECK(d(abs(a.re - b.re)) < 1e-10);
      CHECK(d(abs(a.im - b.im)) < 1e-10);
    }
  }
  CHECK_THROWS_AS(zeta_k_zero(mod3(), 12), DomainError);
}

TEST_CASE("A_chi(2n) identity and integrality") {
  for (const auto& chi : stage_characters()) {
    const auto r = lemma31_residual(1, chi);
    CHECK(r.within());
    CHECK(d(r.value) < 1e-60);
    CHECK(lemma31_integrality(1, chi).integral());
    CHECK(zeta_integrality(chi, 8).integral());
  }
  for (const auto& chi : {mod3(), mod5_quartic(), mod7_sextic()}) {
    CHECK(lemma31_residual(1, chi).within());
    CHECK(zeta_integrality(chi, 8).integral());
  }
}

TEST_CASE("A_chi(2s) decomposition") {
  for (const auto& chi : stage_characters()) {
    for (std::int64_t s = 1; s <= 3; ++s) {
      const auto r = lemma43_residual(s, chi);
      CHECK(r.within());
    }
  }
}

TEST_CASE("L(2) finite sum identity") {
  const auto chi = stage_characters()[2];
  CHECK(lemma42_residual(1, 8, chi, 100000).within());
  CHECK(lemma42_residual(2, 20, chi, 100000).within());
}

TEST_CASE("family zeta identity") {
  const auto chars = stage_characters();
  CHECK(lemma44_residual(175, 4, 1, chars[0], 100000).within());
  CHECK(lemma44_residual(61, 4, 1, chars[2], 100000).within());
}

TEST_CASE("preconditions") {
  CHECK_THROWS_AS(lemma43_residual(1, mod3()), PreconditionError);
  CHECK_THROWS_AS(lemma31_residual(1, mod4()), PreconditionError);
  CHECK_THROWS_AS(lemma31_residual(2, mod3()), PreconditionError);
  const auto chi1 = stage_characters()[0];
  CHECK_THROWS_AS(lemma44_residual(2, 1, 1, chi1, 1000), PreconditionError);
  CHECK_THROWS_AS(lemma44_residual(175, 2, 1, chi1, 1000), PreconditionError);
  CHECK_THROWS_AS(lemma44_residual(175, 3, 1, chi1, 1000), PreconditionError);
}

TEST_CASE("precision scope restores the default") {
  const auto before = Real::default_precision();
  {
    PrecisionScope scope(512);
    CHECK(Real::default_precision() == PrecisionScope::digits10_for(512));
  }
  CHECK(Real::default_precision() == before);
}

}  // TEST_SUITE
