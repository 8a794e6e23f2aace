#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <gmpxx.h>

#include "bktower/errors.hpp"
#include "bktower/rng.hpp"
#include "bktower/tower_ops.hpp"

using namespace bkt;

namespace {

TowerElement random_poly(const PrecisionContext& ctx, long level, long max_deg, long bound,
                         Rng& rng) {
  std::vector<mpz_class> coeffs(static_cast<size_t>(max_deg) + 1);
  for (auto& z : coeffs) z = rng.range(-bound, bound);
  return TowerElement::from_coeffs(ctx, level, std::move(coeffs));
}

bool identical(const TowerElement& a, const TowerElement& b) {
  EqualityReport er = equality_report(a, b);
  return !er.mismatch() && er.digits >= kExactDigits;
}

mpz_class factorial(long n) {
  mpz_class f;
  mpz_fac_ui(f.get_mpz_t(), static_cast<unsigned long>(n));
  return f;
}

// unit * gamma_j(E_level) with a digit window wide enough for the factorial.
TowerElement gamma_term(const PrecisionContext& ctx, long level, long j,
                        const TowerElement& g) {
  TowerElement ej = power(eisenstein_level(ctx, level), j);
  ej.reduce_kappa(ctx.N + legendre_valuation(j, ctx.p) + 2);
  TowerElement r = mul(mul_rational(ej, mpq_class(1, factorial(j))), g);
  r.tag = RingTag::S;
  return r;
}

}  // namespace

TEST_CASE("weierstrass division: defining identity and remainder degree") {
  PrecisionContext ctx(5, 2, 8, 300, 2);
  Rng rng(31);
  for (long level = 0; level <= 1; ++level) {
    TowerElement E = eisenstein_level(ctx, level);
    long De = E.deg_stored();
    for (int t = 0; t < 30; ++t) {
      TowerElement x = random_poly(ctx, level, 40, 125, rng);
      long m = rng.range(0, 3);
      DivisionResult dv = weierstrass_divide(x, m);
      // `certified` claims divisibility, which a random x does not have; the
      // defining identity and the remainder degree must hold regardless.
      CHECK(identical(add(mul(dv.quotient, power(E, m)), dv.remainder), x));
      if (m > 0) CHECK(dv.remainder.deg_stored() < m * De);
    }
    // m = 0 is the identity division.
    TowerElement x = random_poly(ctx, level, 10, 125, rng);
    DivisionResult dv = weierstrass_divide(x, 0);
    CHECK(identical(dv.quotient, x));
    CHECK(dv.remainder.stored_zero());
  }
}

TEST_CASE("weierstrass division: exact multiples divide back") {
  PrecisionContext ctx(3, 1, 8, 200, 1);
  Rng rng(32);
  for (int t = 0; t < 50; ++t) {
    long m = rng.range(1, 5);
    TowerElement g = random_poly(ctx, 0, 25, 81, rng);
    TowerElement x = mul(power(eisenstein_level(ctx, 0), m), g);
    DivisionResult dv = weierstrass_divide(x, m);
    CHECK(dv.certified);
    CHECK(dv.remainder.stored_zero());
    CHECK(identical(dv.quotient, g));
  }
}

TEST_CASE("canonical digit form: expansion is unique and reconstructs") {
  PrecisionContext ctx(5, 1, 10, 250, 2);
  Rng rng(33);
  for (int t = 0; t < 200; ++t) {
    long level = rng.range(0, 1);
    TowerElement E = eisenstein_level(ctx, level);
    long De = E.deg_stored();
    long J = rng.range(1, 6);
    // Assemble from known digits (degree < deg E, possibly with p-power
    // denominators) and check the round trip returns exactly those digits.
    std::vector<TowerElement> digits(static_cast<size_t>(J));
    TowerElement x = TowerElement::zero(ctx, level, RingTag::S);
    for (long j = J - 1; j >= 0; --j) {
      std::vector<mpz_class> coeffs(static_cast<size_t>(De));
      for (auto& z : coeffs) z = rng.range(-100, 100);
      digits[static_cast<size_t>(j)] =
          TowerElement::from_coeffs(ctx, level, std::move(coeffs), RingTag::S,
                                    rng.range(0, 2));
      x = add(mul(x, E), digits[static_cast<size_t>(j)]);
    }
    PDForm form = pd_canonical_form(x);
    CHECK(form.complete);
    REQUIRE(static_cast<long>(form.digit.size()) <= J);
    for (long j = 0; j < J; ++j) {
      const TowerElement want = digits[static_cast<size_t>(j)];
      if (j < static_cast<long>(form.digit.size()))
        CHECK(identical(form.digit[static_cast<size_t>(j)], want));
      else
        CHECK(want.stored_zero());
    }
    CHECK(identical(pd_reconstruct(form), x));
  }
}

TEST_CASE("gamma coefficients carry the factorial") {
  PrecisionContext ctx(3, 2, 8, 150, 1);
  TowerElement g = TowerElement::constant(ctx, 0, 2);
  TowerElement x = gamma_term(ctx, 0, 4, g);
  PDForm form = pd_canonical_form(x);
  REQUIRE(static_cast<long>(form.digit.size()) == 5);
  // The slot-4 digit of gamma_4(E) is 1/4!; its gamma coefficient is 1.
  TowerElement gc = pd_gamma_coefficient(form, 4);
  EqualityReport er = equality_report(gc, g);
  CHECK_FALSE(er.mismatch());
  CHECK(er.digits >= ctx.N);
}

TEST_CASE("window bound: divided powers past jmax vanish in the window") {
  PrecisionContext ctx(3, 1, 4, 12, 1);
  long j = ctx.jmax();
  TowerElement ej = power(eisenstein_level(ctx, 0), j);
  ej.reduce_kappa(ctx.N + legendre_valuation(j, ctx.p) + 2);
  TowerElement g = mul_rational(ej, mpq_class(1, factorial(j)));
  // Every coefficient visible below the u-window M has valuation >= N.
  bool ok = true;
  for (long a = 0; a < ctx.M; ++a) {
    PadicCoeff c = g.coeff_padic(a);
    if (!c.is_zero() && c.valuation() < ctx.N) ok = false;
  }
  CHECK(ok);
}

TEST_CASE("filtration degree detection") {
  PrecisionContext ctx(5, 1, 10, 250, 1);
  Rng rng(34);
  SUBCASE("pure gamma multiples have exact bound") {
    for (long j : {1L, 3L, 6L, 9L}) {
      TowerElement g = random_poly(ctx, 0, 3, 20, rng);
      if (g.stored_zero()) g = TowerElement::constant(ctx, 0, 1);
      TowerElement x = gamma_term(ctx, 0, j, g);
      FilBound fb = fil_degree(x, j + 3);
      CHECK(fb.bound == j);
      CHECK(fb.exact);
    }
  }
  SUBCASE("zero certifies any queried bound") {
    TowerElement z = TowerElement::zero(ctx, 0, RingTag::S);
    FilBound fb = fil_degree(z, 7);
    CHECK(fb.bound >= 7);
    CHECK_FALSE(fb.exact);
  }
  SUBCASE("integral multiples of E^m reach at least m") {
    for (int t = 0; t < 20; ++t) {
      long m = rng.range(1, 6);
      TowerElement g = random_poly(ctx, 0, 10, 100, rng);
      TowerElement x = mul(power(eisenstein_level(ctx, 0), m), g);
      CHECK(fil_degree(x, m + 1).bound >= m);
    }
  }
}

TEST_CASE("integral plus filtration split") {
  PrecisionContext ctx(5, 1, 10, 250, 1);
  Rng rng(35);
  TowerElement E = eisenstein_level(ctx, 0);
  for (int t = 0; t < 30; ++t) {
    // deg E = e = 1 here, so a polynomial of degree < p occupies exactly the
    // digit slots below p; h enters at slot p+1.
    TowerElement g = random_poly(ctx, 0, ctx.p - 1, 100, rng);
    TowerElement h = mul(power(E, ctx.p + 1), random_poly(ctx, 0, 4, 100, rng));
    TowerElement x = add(g, h);
    x.tag = RingTag::S;
    IntegralFilSplit sp = integral_fil_split(x);
    CHECK(sp.integral_certified);
    CHECK(identical(sp.integral, g));
    CHECK(identical(sp.fil_part, h));
  }
  // A genuine denominator below slot p is flagged.
  TowerElement bad = mul_pk(E, -1);
  bad.tag = RingTag::S;
  IntegralFilSplit sp = integral_fil_split(bad);
  CHECK_FALSE(sp.integral_certified);
}

TEST_CASE("frobenius filtration split: contraction bound is reached") {
  PrecisionContext ctx(5, 1, 8, 150, 2);
  Rng rng(36);
  for (long i : {1L, 2L, 5L, 7L, 10L}) {
    TowerElement x = TowerElement::zero(ctx, 1, RingTag::S);
    for (long t = i; t <= i + 1; ++t) {
      TowerElement g = random_poly(ctx, 1, 2, 5, rng);
      x = add(x, gamma_term(ctx, 1, t, g));
    }
    FrobeniusFilSplit fs = frobenius_fil_split(x, i);
    CHECK(fs.ok);
    CHECK(fs.fil_target == ctx.p * contraction_bound(i, ctx.p));
    CHECK(fs.fil_realized == fs.fil_target);
    TowerElement w = fs.integral;
    w.certify_integral();  // throws on failure
    EqualityReport er = equality_report(add(fs.integral, fs.fil_part), frobenius_down(x));
    CHECK_FALSE(er.mismatch());
    CHECK(er.digits >= ctx.N - 2);
  }
}

TEST_CASE("frobenius filtration split: certified violations are thrown") {
  PrecisionContext ctx(5, 1, 8, 150, 2);
  TowerElement g = TowerElement::constant(ctx, 1, 3);
  TowerElement x = gamma_term(ctx, 1, 1, g);  // sits at slot 1 only
  try {
    frobenius_fil_split(x, 2);
    FAIL("digit below the claimed filtration must be rejected");
  } catch (const Error& e) {
    CHECK(e.code() == Err::NotInFiltration);
  }
}

TEST_CASE("tower units and ladder identities") {
  for (long p : {3L, 5L}) {
    PrecisionContext ctx(p, 2, 8, 2 * 2 * p * p, 3);
    TowerElement E = eisenstein_level(ctx, 0);

    // E(u^p) = E(u)^p + p*v with v an integral unit of constant term 1-p^{p-1}.
    TowerElement v = v_unit(ctx);
    CHECK(identical(mul_pk(v, 1), sub(eisenstein_frobenius(ctx), power(E, p))));
    CHECK(v.coeff_rational(0) == 1 - mpz_class(ctx.p_pow(p - 1)));

    // c0 = E(u^p)/p deviates from 1 exactly at degree e*p.
    TowerElement c0 = c0_unit(ctx);
    CHECK(identical(mul_pk(c0, 1), eisenstein_frobenius(ctx)));
    TowerElement dev = sub(c0, TowerElement::constant(ctx, 0, 1, RingTag::S));
    CHECK(dev.ord() == ctx.e * p);

    // Ladder: the descent of z_{n+1} factors as E(u^{p^{n+1}}) * z_n.
    for (long n = 0; n < ctx.depth; ++n) {
      TowerElement twist = eisenstein_frobenius(ctx);
      for (long k = 0; k < n; ++k) twist = include_up(twist);
      CHECK(identical(frobenius_down(z_element(ctx, n + 1)),
                      mul(twist, z_element(ctx, n))));
    }

    // z_n / E_n stays integral: the tail of the product is a level-n unit.
    for (long n = 1; n <= ctx.depth; ++n) {
      DivisionResult dv = weierstrass_divide(z_element(ctx, n), 1);
      CHECK(dv.certified);
      CHECK(dv.remainder.stored_zero());
      TowerElement q = dv.quotient;
      q.certify_integral();
      CHECK(q.coeff_rational(0) == mpq_class(ctx.p_pow(n - 1)));
    }

    // lambda is the fixed point: c0 * phi(lambda) = lambda on the window.
    TowerElement lambda = lambda_unit(ctx);
    EqualityReport er = equality_report(mul(c0, frobenius_self(lambda)), lambda);
    CHECK_FALSE(er.mismatch());
    CHECK(er.digits >= ctx.N - 2);
    CHECK(er.udeg >= ctx.M / 2);
    PadicCoeff lc = lambda.coeff_padic(0);
    CHECK_FALSE(lc.is_zero());
    CHECK(lc.valuation() == 0);
  }
}
