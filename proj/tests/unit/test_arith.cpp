#include <doctest.h>

#include <random>

#include "quadsieve/arith.hpp"
#include "quadsieve/errors.hpp"

using namespace quadsieve;
using namespace quadsieve::arith;

TEST_SUITE("arith") {

TEST_CASE("isqrt examples and bracketing") {
  CHECK(isqrt(mpz_class(0)) == 0);
  CHECK(isqrt(mpz_class(361)) == 19);
  CHECK(isqrt(mpz_class(130)) == 11);
  CHECK(isqrt(std::uint64_t{130}) == 11);
  CHECK(isqrt(std::uint64_t{0xFFFFFFFFFFFFFFFFULL}) == 0xFFFFFFFFULL);

  gmp_randclass rng(gmp_randinit_mt);
  rng.seed(12345);
  for (int i = 0; i < 500; ++i) {
    const mpz_class n = rng.get_z_bits(1 + i % 300);
    const mpz_class r = isqrt(n);
    CHECK(r * r <= n);
    CHECK((r + 1) * (r + 1) > n);
  }
  std::mt19937_64 gen(7);
  for (int i = 0; i < 2000; ++i) {
    const std::uint64_t n = gen() >> (gen() % 64);
    const std::uint64_t r = isqrt(n);
    CHECK(static_cast<unsigned __int128>(r) * r <= n);
    CHECK(static_cast<unsigned __int128>(r + 1) * (r + 1) > n);
  }
}

TEST_CASE("kronecker examples") {
  CHECK(kronecker(17, 61) == -1);
  CHECK(kronecker(2501, 61) == 0);
  for (std::int64_t a = -20; a <= 20; ++a) CHECK(kronecker(a, 1) == 1);
  CHECK(kronecker(1, 0) == 1);
  CHECK(kronecker(-1, 0) == 1);
  CHECK(kronecker(2, 0) == 0);
  CHECK(kronecker(8, 3) == -1);
  CHECK(kronecker(5, 8) == -1);
  CHECK(kronecker(-1, -1) == -1);
}

TEST_CASE("kronecker agrees with GMP on random inputs") {
  std::mt19937_64 gen(99);
  std::uniform_int_distribution<std::int64_t> dist(-1000000, 1000000);
  for (int i = 0; i < 20000; ++i) {
    const std::int64_t a = dist(gen);
    const std::int64_t n = dist(gen);
    CHECK(kronecker(a, n) == mpz_kronecker(mpz_class(static_cast<long>(a)).get_mpz_t(),
                                           mpz_class(static_cast<long>(n)).get_mpz_t()));
    CHECK(kronecker(mpz_class(static_cast<long>(a)), mpz_class(static_cast<long>(n))) == kronecker(a, n));
  }
}

TEST_CASE("kronecker is multiplicative in the numerator for odd n") {
  std::mt19937_64 gen(5);
  std::uniform_int_distribution<std::int64_t> dist(-5000, 5000);
  for (int i = 0; i < 5000; ++i) {
    const std::int64_t a = dist(gen), b = dist(gen);
    const std::int64_t n = 2 * (std::abs(dist(gen)) % 2000) + 1;
    CHECK(kronecker(a, n) * kronecker(b, n) == kronecker(a * b, n));
  }
}

TEST_CASE("kronecker against square enumeration for odd primes below 200") {
  for (std::int64_t p = 3; p < 200; p += 2) {
    if (!is_prime(static_cast<std::uint64_t>(p))) continue;
    std::vector<bool> square(static_cast<std::size_t>(p), false);
    for (std::int64_t x = 1; x < p; ++x) square[static_cast<std::size_t>(x * x % p)] = true;
    for (std::int64_t a = -p; a < 2 * p; ++a) {
      const std::int64_t r = mod(a, p);
      const int expected = r == 0 ? 0 : square[static_cast<std::size_t>(r)] ? 1 : -1;
      CHECK(kronecker(a, p) == expected);
    }
  }
}

TEST_CASE("is_squarefree") {
  CHECK(is_squarefree(std::uint64_t{130}));
  CHECK_FALSE(is_squarefree(std::uint64_t{18}));
  CHECK(is_squarefree(std::uint64_t{1}));
  for (std::uint64_t n = 1; n < 5000; ++n) {
    bool expected = true;
    for (std::uint64_t d = 2; d * d <= n; ++d) expected = expected && n % (d * d) != 0;
    CHECK(is_squarefree(n) == expected);
  }
  CHECK(is_squarefree(mpz_class("999999999989")));
  CHECK_FALSE(is_squarefree(mpz_class("999999999988")));
  CHECK_THROWS_AS(is_squarefree(kSquarefreeLimit + 1), UnsupportedSizeError);
  CHECK_THROWS_AS(is_squarefree(mpz_class("1000000000000000")), UnsupportedSizeError);
}

TEST_CASE("discrete_log examples, errors and round trip") {
  CHECK(discrete_log(2, 8, 25) == 3);
  CHECK(discrete_log(3, 5, 7) == 5);
  CHECK(discrete_log(2, 1, 25) == 0);
  CHECK_THROWS_AS(discrete_log(2, 5, 25), DomainError);
  CHECK_THROWS_AS(discrete_log(2, 3, 7), NoSolutionError);  // <2> = {1, 2, 4}
  for (std::int64_t m : {7, 25, 61, 1861}) {
    const std::int64_t g = m == 7 ? 3 : 2;
    for (std::int64_t a = 1; a < m; ++a) {
      if (gcd(a, m) != 1) continue;
      CHECK(pow_mod(g, discrete_log(g, a, m), m) == a);
    }
  }
}

TEST_CASE("crt_combine") {
  const Residue a[] = {Residue::make(2, 25), Residue::make(3, 7)};
  CHECK(crt_combine(a) == Residue::make(52, 175));
  const Residue one[] = {Residue::make(5, 11)};
  CHECK(crt_combine(one) == Residue::make(5, 11));
  const Residue ones[] = {Residue::make(1, 3), Residue::make(1, 5)};
  CHECK(crt_combine(ones) == Residue::make(1, 15));
  const Residue overlap[] = {Residue::make(4, 6), Residue::make(1, 9)};
  CHECK(crt_combine(overlap) == Residue::make(10, 18));
  const Residue bad[] = {Residue::make(1, 6), Residue::make(2, 9)};
  CHECK_THROWS_AS(crt_combine(bad), InconsistencyError);

  std::mt19937_64 gen(3);
  for (int i = 0; i < 1000; ++i) {
    const std::int64_t m1 = 2 + static_cast<std::int64_t>(gen() % 200);
    const std::int64_t m2 = 2 + static_cast<std::int64_t>(gen() % 200);
    const std::int64_t x = static_cast<std::int64_t>(gen() % 1000000);
    const Residue cs[] = {Residue::make(x, m1), Residue::make(x, m2)};
    const Residue r = crt_combine(cs);
    CHECK(r.modulus == m1 / gcd(m1, m2) * m2);
    CHECK(r.value == x % r.modulus);
  }
}

TEST_CASE("modular helpers") {
  CHECK(floor_div(-7, 2) == -4);
  CHECK(ceil_div(-7, 2) == -3);
  CHECK(ceil_div(7, 2) == 4);
  CHECK(mod(-1, 61) == 60);
  for (std::int64_t a = 1; a < 61; ++a) CHECK(mul_mod(a, inv_mod(a, 61), 61) == 1);
  CHECK_THROWS_AS(inv_mod(5, 25), DomainError);
  CHECK(euler_phi(175) == 120);
  CHECK(multiplicative_order(2, 61) == 60);
  CHECK(prime_divisors(175) == std::vector<std::uint64_t>{5, 7});
  CHECK_THROWS_AS(Residue::make(1, 1), DomainError);
}

}  // TEST_SUITE
