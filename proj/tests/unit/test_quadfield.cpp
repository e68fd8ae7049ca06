#include <doctest.h>

#include <set>

#include "quadsieve/arith.hpp"
#include "quadsieve/errors.hpp"
#include "quadsieve/quadfield.hpp"

using namespace quadsieve;
using namespace quadsieve::quadfield;

TEST_SUITE("quadfield") {

TEST_CASE("family discriminants") {
  CHECK(d_mcz(1, 2, 1) == 130);
  CHECK(d_mcz(0, 1, 1) == 2);  // 1 + 1
  CHECK(d_mcz(0, 3, 2) == 10);
  CHECK(discriminant_of(5) == 5);
  CHECK(discriminant_of(2) == 8);
  CHECK(discriminant_of(3) == 12);
  CHECK_THROWS_AS(discriminant_of(12), DomainError);
  CHECK_THROWS_AS(discriminant_of(1), DomainError);
  CHECK(is_fundamental(5));
  CHECK(is_fundamental(8));
  CHECK(is_fundamental(12));
  CHECK_FALSE(is_fundamental(20));
  CHECK_FALSE(is_fundamental(9));
}

TEST_CASE("known class numbers") {
  CHECK(class_number_forms(8).h == 1);
  CHECK(class_number_forms(5).h == 1);
  CHECK(class_number_forms(12).h == 1);
  CHECK(class_number_forms(12).h_narrow == 2);
  CHECK(class_number_forms(40).h == 2);
  CHECK(class_number_forms(520).h == 4);
  CHECK(class_number_analytic(520) == 4);
  CHECK(class_number_analytic(40) == 2);
  CHECK(field_data(79).h == 3);
  CHECK(field_data(223).h == 3);
  CHECK(field_data(1999LL * 1999 + 1).h == 140);
  CHECK_THROWS_AS(class_number_forms(20), DomainError);
}

TEST_CASE("oracles agree on every fundamental discriminant below 10^4") {
  int count = 0;
  for (std::int64_t d = 5; d < 10000; ++d) {
    if (!is_fundamental(d)) continue;
    const auto forms = class_number_forms(d);
    const auto est = class_number_estimate(d);
    if (std::abs(est.value - static_cast<double>(forms.h)) > est.error_bound) FAIL("d=" << d);
    CHECK(est.error_bound < 0.5);
    // h+ / h is 1 or 2 and is 2 exactly when the unit has norm +1
    CHECK((forms.h_narrow == forms.h || forms.h_narrow == 2 * forms.h));
    ++count;
  }
  CHECK(count > 2500);
}

TEST_CASE("narrow ratio follows the unit norm") {
  for (std::int64_t D = 2; D < 400; ++D) {
    if (!arith::is_squarefree(static_cast<std::uint64_t>(D))) continue;
    const auto f = field_data(D);
    CHECK(f.h_narrow == (f.unit_norm == -1 ? f.h : 2 * f.h));
  }
}

TEST_CASE("reduction lands in the reduced set and rho permutes it") {
  for (std::int64_t d : {5, 8, 12, 40, 60, 229, 520, 1480}) {
    const auto forms = reduced_forms(d);
    const std::set<std::tuple<std::int64_t, std::int64_t, std::int64_t>> set = [&] {
      std::set<std::tuple<std::int64_t, std::int64_t, std::int64_t>> s;
      for (const auto& f : forms) s.insert({f.a, f.b, f.c});
      return s;
    }();
    for (const auto& f : forms) {
      CHECK(is_reduced(f, d));
      CHECK(f.discriminant() == d);
      const auto g = rho(f);
      CHECK(set.count({g.a, g.b, g.c}) == 1);
    }
    // reduce() of arbitrary forms
    for (std::int64_t a = 1; a < 12; ++a) {
      for (std::int64_t b = -15; b <= 15; ++b) {
        const std::int64_t num = b * b - d;
        if (num % (4 * a) != 0) continue;
        const auto r = reduce({a, b, num / (4 * a)});
        CHECK(is_reduced(r, d));
        CHECK(set.count({r.a, r.b, r.c}) == 1);
      }
    }
  }
  CHECK_THROWS_AS(reduce({1, 0, -4}), DomainError);
}

TEST_CASE("small scan") {
  const auto rows = family_scan_n2plus1(30);
  REQUIRE(rows.size() == 30);
  std::set<std::int64_t> ones;
  for (const auto& r : rows) {
    CHECK(r.D == r.n * r.n + 1);
    if (r.squarefree && r.h == 1) ones.insert(r.n);
    if (!r.squarefree) CHECK(r.h == 0);
  }
  CHECK(ones == std::set<std::int64_t>{1, 2, 4, 6, 10, 14, 26});
  CHECK(rows[6].squarefree == false);  // n = 7, D = 50
  const auto text = format_scan(rows);
  CHECK(text.rfind("n\tD\tsquarefree\th\n", 0) == 0);
  CHECK(text.find("7\t50\tfalse\t-\n") != std::string::npos);
  const auto odd = family_scan_n2plus1(30, true, 2);
  CHECK(odd.size() == 15);
}

TEST_CASE("norm square property") {
  for (std::int64_t n : {3, 5, 7, 9, 11}) CHECK(small_norm_square_property(n, 2 * n));
  CHECK_THROWS_AS(small_norm_square_property(4, 8), DomainError);
}

TEST_CASE("family field") {
  const auto f = family_field(1, 2, 1);
  CHECK(f.D == 130);
  CHECK(f.h == 4);
  CHECK(f.h > 1);
}

}  // TEST_SUITE
