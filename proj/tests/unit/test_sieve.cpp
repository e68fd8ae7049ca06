#include <doctest.h>

#include <set>

#include "fixtures.hpp"
#include "quadsieve/arith.hpp"
#include "quadsieve/errors.hpp"
#include "quadsieve/sieve.hpp"

using namespace quadsieve;
using namespace quadsieve::sieve;

TEST_SUITE("sieve") {

TEST_CASE("U membership") {
  CHECK(u_membership(1, 5));  // 2 is a non-residue mod 5
  CHECK_FALSE(u_membership(2, 5));  // 5 = 0 mod 5
  CHECK_FALSE(u_membership(3, 5));  // 10 = 0 mod 5
  CHECK(u_membership(4, 5));
  CHECK(u_membership(4, 175));
  CHECK_FALSE(u_membership(1, 175));
  const auto u175 = u_representatives(175);
  CHECK(u175.size() == 40);
  CHECK(u175.front() == 4);
  const auto u61 = u_representatives(61);
  CHECK(u61.size() == 30);
  for (std::int64_t a = 0; a < 175; ++a) {
    bool brute = true;
    for (std::int64_t p : {5, 7}) brute = brute && arith::kronecker(a * a + 1, p) == -1;
    CHECK(u_membership(a, 175) == brute);
  }
}

TEST_CASE("condition star") {
  for (const auto& stage : fixtures::bundled_stages()) CHECK(condition_star(stage));
  // chi1^7 stays odd and primitive but m_chi is nonzero
  auto spec = fixtures::bundled_specs().at(0);
  for (auto& c : spec.components) c.image = arith::pow_mod(c.image, 7, 61);
  spec.root.reset();
  const SieveStage bent{charmod::CharacterModI(spec)};
  CHECK(charmod::m_char(bent.chi).value != 0);
  CHECK_FALSE(condition_star(bent));
}

TEST_CASE("stage tables match the golden tables") {
  const auto stages = fixtures::bundled_stages();
  const auto result = run_pipeline(stages, 175);
  REQUIRE(result.stages.size() == 4);
  const char* names[] = {"stage1.tsv", "stage2.tsv", "stage3.tsv", "stage4.tsv"};
  const std::size_t sizes[] = {40, 20, 10, 2};
  for (std::size_t i = 0; i < 4; ++i) {
    CAPTURE(i);
    CHECK(result.stages[i].rows.size() == sizes[i]);
    CHECK(format_table(result.stages[i].rows) == fixtures::golden(names[i]));
  }
  CHECK(result.stages[2].eliminated_by_symbol == 4);
  CHECK(result.stages[2].eliminated_by_compatibility == 4);
  CHECK(result.survivors.empty());

  const auto two = run_pipeline(std::span(stages).first(2), 175);
  CHECK(format_survivors(two.survivors, two.moduli) == fixtures::golden("after_stage2.tsv"));
  const auto three = run_pipeline(std::span(stages).first(3), 175);
  CHECK(format_survivors(three.survivors, three.moduli) == fixtures::golden("after_stage3.tsv"));
}

TEST_CASE("verdict") {
  const auto stages = fixtures::bundled_stages();
  const auto full = theorem2_verdict(stages);
  CHECK(full.holds);
  const auto first = theorem2_verdict(std::span(stages).first(1));
  CHECK_FALSE(first.holds);
  CHECK(first.result.survivors.size() == 20);
  const auto none = theorem2_verdict(std::span<const SieveStage>{});
  CHECK_FALSE(none.holds);
  CHECK(none.result.survivors.size() == 40);
}

TEST_CASE("row invariants") {
  const auto stages = fixtures::bundled_stages();
  for (const auto& stage : stages) {
    const std::int64_t q = stage.q(), r = stage.r();
    for (std::int64_t n0 : u_representatives(q)) {
      const auto row = compute_row(stage, n0);
      CHECK(row.b_val != 0);
      CHECK(row.a_val >= 0);
      CHECK(row.a_val < r);
      // n_mod_r solves 2B(n - n0) + qA = 0 mod r
      const std::int64_t lhs = arith::mod(
          arith::mul_mod(2 * row.b_val % r, arith::mod(row.n_mod_r - n0, r), r) + arith::mul_mod(q % r, row.a_val, r), r);
      CHECK(lhs == 0);
      CHECK(row.symbol == arith::kronecker(row.n_mod_r * row.n_mod_r + 1, r));
      CHECK(row == compute_row(stage, n0));
    }
  }
}

TEST_CASE("run_stage rejects inputs outside U_q") {
  const auto stages = fixtures::bundled_stages();
  const std::vector<std::int64_t> bad{1};
  CHECK_THROWS_AS(run_stage(stages[0], bad), PreconditionError);
}

TEST_CASE("parallel runs match serial") {
  const auto stages = fixtures::bundled_stages();
  const auto a = run_pipeline(stages, 175, 1);
  const auto b = run_pipeline(stages, 175, 4);
  for (std::size_t i = 0; i < a.stages.size(); ++i) CHECK(a.stages[i].rows == b.stages[i].rows);
}

}  // TEST_SUITE
