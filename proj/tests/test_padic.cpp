#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <gmpxx.h>

#include "bktower/errors.hpp"
#include "bktower/padic.hpp"

using namespace bkt;

namespace {

// Direct factorial valuation: sum of floor(n / p^i).
long naive_factorial_valuation(long n, long p) {
  long s = 0;
  for (long q = n / p; q > 0; q /= p) s += q;
  return s;
}

long ceil_div(long a, long b) { return (a + b - 1) / b; }

bool code_is(const Error& e, Err c) { return e.code() == c; }

}  // namespace

TEST_CASE("legendre valuation matches the direct factorial count") {
  for (long p : {3L, 5L, 7L, 11L})
    for (long n = 0; n <= 2000; ++n)
      CHECK(legendre_valuation(n, p) == naive_factorial_valuation(n, p));
  CHECK(digit_sum(0, 3) == 0);
  CHECK(digit_sum(26, 3) == 6);   // 222_3
  CHECK(digit_sum(124, 5) == 12); // 444_5
}

TEST_CASE("factorial valuation identity v_p((pn)!) = n + v_p(n!)") {
  for (long p : {3L, 5L, 7L})
    for (long n = 0; n <= 3000; ++n)
      CHECK(legendre_valuation(p * n, p) == n + legendre_valuation(n, p));
}

TEST_CASE("integer valuations") {
  CHECK(int_valuation(mpz_class(45), 3) == 2);
  CHECK(int_valuation(mpz_class(-45), 3) == 2);
  CHECK(int_valuation(mpz_class(7), 5) == 0);
  mpz_class big = 7;
  for (int i = 0; i < 30; ++i) big *= 5;
  CHECK(int_valuation(big, 5) == 30);
  CHECK_THROWS_AS(int_valuation(mpz_class(0), 5), Error);
}

TEST_CASE("contraction bound is the exact ceiling") {
  for (long p : {3L, 5L, 7L})
    for (long i = 0; i <= 500; ++i)
      CHECK(contraction_bound(i, p) == ceil_div(i * (p - 2), p - 1));
  // The inequality that drives the contraction: one twist step strictly
  // increases the filtration once i reaches p, for every admissible height.
  for (long p : {3L, 5L, 7L})
    for (long r = 0; r < p - 1; ++r)
      for (long i = p; i <= 500; ++i)
        CHECK(p * contraction_bound(i, p) - r > i);
}

TEST_CASE("term valuation of the Frobenius expansion") {
  for (long p : {3L, 5L}) {
    for (long j = 0; j <= 25; ++j)
      for (long k = 0; k <= j; ++k) {
        CHECK(pd_term_valuation(j, k, p) ==
              k - legendre_valuation(j - k, p) - legendre_valuation(k, p));
        // Terms from k >= ceil(j/(p-1)) upward are the ones the integral part
        // of the split keeps; they must all be p-integral.
        if (k * (p - 1) >= j) CHECK(pd_term_valuation(j, k, p) >= 0);
      }
  }
}

TEST_CASE("contraction sequences: exact prefixes") {
  using K = ContractionKind;
  CHECK(contraction_sequence(K::Plain, 3, 0, 4) == std::vector<long>{3, 6, 9, 15});
  CHECK(contraction_sequence(K::Plain, 5, 0, 4) == std::vector<long>{5, 20, 75, 285});
  CHECK(contraction_sequence(K::Plain, 7, 0, 4) == std::vector<long>{7, 42, 245, 1435});
  CHECK(contraction_sequence(K::HeightAdjusted, 3, 1, 4) == std::vector<long>{3, 5, 8, 11});
  CHECK(contraction_sequence(K::HeightAdjusted, 5, 3, 4) == std::vector<long>{5, 17, 62, 232});
  CHECK(contraction_sequence(K::HeightAdjusted, 7, 5, 4) == std::vector<long>{7, 37, 212, 1234});
}

TEST_CASE("contraction sequences: monotonicity and height-zero degeneration") {
  using K = ContractionKind;
  for (long p : {3L, 5L, 7L}) {
    CHECK(contraction_sequence(K::HeightAdjusted, p, 0, 12) ==
          contraction_sequence(K::Plain, p, 0, 12));
    for (long r = 0; r < p - 1; ++r) {
      auto seq = contraction_sequence(K::HeightAdjusted, p, r, 20);
      REQUIRE(seq.size() == 20);
      CHECK(seq[0] == p);
      for (size_t t = 1; t < seq.size(); ++t) CHECK(seq[t] > seq[t - 1]);
    }
    auto plain = contraction_sequence(K::Plain, p, 0, 20);
    for (size_t t = 1; t < plain.size(); ++t) CHECK(plain[t] > plain[t - 1]);
  }
}

TEST_CASE("contraction sequences: rejected configurations") {
  try {
    contraction_sequence(ContractionKind::HeightAdjusted, 3, 2, 5);
    FAIL("height r = p-1 must be rejected");
  } catch (const Error& e) {
    CHECK(code_is(e, Err::HeightTooLarge));
  }
  try {
    contraction_sequence(ContractionKind::Plain, 7, 0, 64);
    FAIL("growth past long range must be detected");
  } catch (const Error& e) {
    CHECK(code_is(e, Err::DepthExceeded));
  }
}

TEST_CASE("padic coefficients: windows through arithmetic") {
  PadicCoeff a = PadicCoeff::make(5, 0, 2, 4);
  PadicCoeff b = PadicCoeff::make(5, 1, 1, 4);
  PadicCoeff s = a.add(b);
  CHECK(s.valuation() == 0);
  CHECK(s.unit() == 7);
  CHECK(s.known_digits() == 4);

  PadicCoeff m = a.mul(b);
  CHECK(m.valuation() == 1);
  CHECK(m.unit() == 2);

  // Cancellation returns a certified fuzzy zero at the shared precision.
  PadicCoeff z = a.sub(a);
  CHECK(z.is_zero());
  CHECK(z.abs_precision() == 4);

  // Exact integers cancel to the exact zero.
  PadicCoeff e1 = PadicCoeff::from_integer(5, 10, kExactDigits);
  CHECK(e1.sub(e1).abs_precision() == kExactDigits);
}

TEST_CASE("padic coefficients: rationals and consistency") {
  PadicCoeff h = PadicCoeff::from_rational(5, mpq_class(1, 2), 4);
  CHECK(h.valuation() == 0);
  CHECK(h.unit() == 313);  // 2 * 313 = 626 = 5^4 + 1
  CHECK(h.consistent_with(mpq_class(1, 2)));
  CHECK_FALSE(h.consistent_with(mpq_class(1, 3)));

  PadicCoeff q = PadicCoeff::from_rational(5, mpq_class(75, 4), 3);
  CHECK(q.valuation() == 2);
  CHECK(q.unit() == 32);  // 3 * inv(4) = 3 * 94 mod 125
  CHECK(q.consistent_with(mpq_class(75, 4)));

  PadicCoeff two = PadicCoeff::from_integer(5, 2, 6);
  PadicCoeff prod = two.mul(two.inv());
  CHECK(prod.consistent_with(mpq_class(1)));
}

TEST_CASE("padic coefficients: fuzzy zeros absorb and floor") {
  PadicCoeff fz = PadicCoeff::fuzzy_zero(5, 2);
  PadicCoeff x = PadicCoeff::make(5, 0, 1, 10);
  PadicCoeff s = fz.add(x);
  CHECK_FALSE(s.is_zero());
  CHECK(s.valuation() == 0);
  CHECK(s.known_digits() == 2);  // capped by the fuzzy floor

  PadicCoeff deep = PadicCoeff::make(5, 3, 1, 10);
  CHECK(fz.add(deep).is_zero());  // valuation 3 hides below floor 2

  PadicCoeff prod = fz.mul(PadicCoeff::make(5, 1, 1, 5));
  CHECK(prod.is_zero());
  CHECK(prod.abs_precision() == 3);  // floors add through products

  CHECK_THROWS_AS(fz.inv(), Error);
  CHECK_THROWS_AS(fz.valuation(), Error);
}
