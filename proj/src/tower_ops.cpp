#include "bktower/tower_ops.hpp"

#include "bktower/errors.hpp"

namespace bkt {

namespace {

// E(u_level^{p^stride_exp}) as a sparse polynomial.
TowerElement eisenstein_spread(const PrecisionContext& ctx, long level, long stride_exp) {
  long stride = 1;
  for (long i = 0; i < stride_exp; ++i) stride *= ctx.p;
  std::vector<mpz_class> c(static_cast<size_t>(ctx.e * stride) + 1, 0);
  for (long i = 0; i <= ctx.e; ++i) c[static_cast<size_t>(i * stride)] = ctx.E[static_cast<size_t>(i)];
  return TowerElement::from_coeffs(ctx, level, std::move(c), RingTag::FrakS);
}

}  // namespace

TowerElement eisenstein_level(const PrecisionContext& ctx, long level) {
  return eisenstein_spread(ctx, level, level);
}

TowerElement eisenstein_frobenius(const PrecisionContext& ctx) {
  return eisenstein_spread(ctx, 0, 1);
}

TowerElement z_element(const PrecisionContext& ctx, long level) {
  TowerElement z = TowerElement::constant(ctx, level, 1);
  // z_n = prod_{k=0}^{n-1} E(u_k), and u_k = u_n^{p^{n-k}} inside level n.
  for (long k = 0; k < level; ++k) z = mul(z, eisenstein_spread(ctx, level, level - k));
  return z;
}

TowerElement c0_unit(const PrecisionContext& ctx) {
  TowerElement c = mul_pk(eisenstein_frobenius(ctx), -1);
  c.tag = RingTag::S;
  return c;
}

TowerElement v_unit(const PrecisionContext& ctx) {
  TowerElement E = eisenstein_level(ctx, 0);
  TowerElement d = sub(eisenstein_frobenius(ctx), power(E, ctx.p));
  d = mul_pk(d, -1);
  d.certify_integral();  // proves E(u^p) == E(u)^p mod p
  return d;
}

TowerElement lambda_unit(const PrecisionContext& ctx) {
  TowerElement acc = c0_unit(ctx);
  TowerElement f = acc;
  // Factor phi^n(c0) = E(u^{p^{n+1}})/p differs from 1 only in degrees
  // >= p^{n+1}; stop once that leaves the window.
  for (;;) {
    f = frobenius_self(f);
    TowerElement dev = sub(f, TowerElement::constant(ctx, 0, 1, RingTag::S));
    if (dev.stored_zero() || dev.ord() >= ctx.M) break;
    acc = mul(acc, f);
  }
  acc.udeg = std::min(acc.udeg, ctx.M);
  acc.normalize();
  return acc;
}

DivisionResult weierstrass_divide(const TowerElement& x, long m) {
  if (m < 0) fail(Err::ConfigInvalid, "weierstrass_divide needs m >= 0");
  const PrecisionContext& ctx = *x.ctx;
  long stride = 1;
  for (long i = 0; i < x.level; ++i) stride *= ctx.p;
  const long De = ctx.e * stride;  // degree of E_level

  DivisionResult res;
  res.remainder = TowerElement::zero(ctx, x.level, x.tag);
  res.remainder.kappa = x.kappa;
  res.remainder.scale = x.scale;
  res.remainder.udeg = x.udeg >= kFullDegree ? kFullDegree : std::min(x.udeg, m * De);

  TowerElement cur = x;
  std::vector<TowerElement> rhos;
  for (long round = 0; round < m; ++round) {
    // Divide cur by E_level once: sparse long division from the top.
    std::vector<mpz_class> w = cur.c;
    long len = static_cast<long>(w.size());
    long qlen = std::max<long>(0, len - De);
    std::vector<mpz_class> q(static_cast<size_t>(qlen), mpz_class(0));
    for (long d = len - 1; d >= De; --d) {
      if (w[static_cast<size_t>(d)] == 0) continue;
      mpz_class t;
      mpz_swap(t.get_mpz_t(), w[static_cast<size_t>(d)].get_mpz_t());
      for (long i = 0; i < ctx.e; ++i) {
        if (ctx.E[static_cast<size_t>(i)] == 0) continue;
        mpz_submul(w[static_cast<size_t>(d - De + i * stride)].get_mpz_t(), t.get_mpz_t(),
                   ctx.E[static_cast<size_t>(i)].get_mpz_t());
      }
      mpz_swap(q[static_cast<size_t>(d - De)].get_mpz_t(), t.get_mpz_t());
    }
    w.resize(static_cast<size_t>(std::min<long>(len, De)));

    TowerElement rho = TowerElement::zero(ctx, x.level, x.tag);
    rho.scale = cur.scale;
    rho.kappa = cur.kappa;
    rho.udeg = cur.udeg >= kFullDegree ? kFullDegree : std::min(cur.udeg, De);
    rho.c = std::move(w);
    rho.normalize();
    rhos.push_back(rho);

    TowerElement next = TowerElement::zero(ctx, x.level, x.tag);
    next.scale = cur.scale;
    next.kappa = cur.kappa;
    next.udeg = cur.udeg >= kFullDegree ? kFullDegree : std::max<long>(0, cur.udeg - De);
    next.c = std::move(q);
    next.normalize();
    cur = next;
  }

  res.quotient = cur;
  // remainder = sum rho_t E^t, reconstructed by Horner.
  TowerElement E = eisenstein_level(ctx, x.level);
  TowerElement rem = TowerElement::zero(ctx, x.level, x.tag);
  for (long t = static_cast<long>(rhos.size()) - 1; t >= 0; --t)
    rem = add(mul(rem, E), rhos[static_cast<size_t>(t)]);
  if (m > 0) {
    rem.udeg = std::min(rem.udeg, res.remainder.udeg);
    rem.normalize();
    res.remainder = rem;
  }
  ZeroWindow zw = res.remainder.zero_window();
  res.certified = m == 0 || zw.covers(std::min(x.kappa, kExactDigits), std::min(res.remainder.udeg, m * De));
  if (!res.certified) res.quotient.tag = RingTag::FracS;
  return res;
}

PDForm pd_canonical_form(const TowerElement& x, long max_digits) {
  const PrecisionContext& ctx = *x.ctx;
  long stride = 1;
  for (long i = 0; i < x.level; ++i) stride *= ctx.p;
  PDForm form;
  form.level = x.level;
  form.base_degree = ctx.e * stride;
  long J = max_digits >= 0 ? max_digits : ctx.jmax();
  TowerElement cur = x;
  for (long j = 0; j < J; ++j) {
    if (cur.stored_zero()) break;
    DivisionResult dr = weierstrass_divide(cur, 1);
    form.digit.push_back(dr.remainder);
    cur = dr.quotient;
    cur.tag = x.tag;  // quotient tagging here is bookkeeping, not a claim
  }
  form.tail = cur;
  form.complete = cur.stored_zero();
  return form;
}

TowerElement pd_gamma_coefficient(const PDForm& form, long j) {
  if (j < 0 || j >= static_cast<long>(form.digit.size()))
    fail(Err::ConfigInvalid, "pd_gamma_coefficient index out of range");
  mpz_class fact;
  mpz_fac_ui(fact.get_mpz_t(), static_cast<unsigned long>(j));
  return mul_int(form.digit[static_cast<size_t>(j)], fact);
}

TowerElement pd_reconstruct(const PDForm& form, long limit) {
  if (form.digit.empty())
    return form.tail;
  const TowerElement& first = form.digit.front();
  const PrecisionContext& ctx = *first.ctx;
  long J = limit >= 0 ? std::min<long>(limit, static_cast<long>(form.digit.size()))
                      : static_cast<long>(form.digit.size());
  TowerElement E = eisenstein_level(ctx, form.level);
  TowerElement acc = TowerElement::zero(ctx, form.level, first.tag);
  for (long j = J - 1; j >= 0; --j) acc = add(mul(acc, E), form.digit[static_cast<size_t>(j)]);
  return acc;
}

FilBound fil_degree(const TowerElement& x, long query_limit) {
  PDForm form = pd_canonical_form(x, query_limit);
  FilBound fb;
  fb.digits = x.kappa;
  for (size_t j = 0; j < form.digit.size(); ++j) {
    const TowerElement& d = form.digit[j];
    ZeroWindow zw = d.zero_window();
    if (zw.digits < d.kappa) {
      // certifiably nonzero digit
      fb.bound = static_cast<long>(j);
      fb.exact = true;
      fb.digits = std::min(fb.digits, d.kappa);
      fb.max_checked = static_cast<long>(j) + 1;
      return fb;
    }
    if (d.udeg < form.base_degree) {
      // The u-window is exhausted at this digit: nothing beyond is certifiable.
      fb.bound = static_cast<long>(j);
      fb.max_checked = static_cast<long>(j);
      fb.exact = false;
      return fb;
    }
    fb.digits = std::min(fb.digits, zw.digits);
  }
  // Every digit the window sees vanishes.  A fully-known zero tail certifies
  // all the requested indices (the element is zero past the examined digits).
  if (form.complete && form.tail.udeg >= kFullDegree && query_limit >= 0)
    fb.bound = std::max<long>(query_limit, static_cast<long>(form.digit.size()));
  else
    fb.bound = static_cast<long>(form.digit.size());
  fb.max_checked = fb.bound;
  fb.exact = false;
  return fb;
}

IntegralFilSplit integral_fil_split(const TowerElement& x) {
  const PrecisionContext& ctx = *x.ctx;
  PDForm form = pd_canonical_form(x, ctx.p);
  IntegralFilSplit out;
  out.integral = pd_reconstruct(form, ctx.p);
  out.integral.tag = RingTag::FrakS;
  out.fil_part = sub(x, out.integral);
  out.fil_part.tag = RingTag::S;
  out.integral_certified = true;
  for (const auto& d : form.digit)
    if (d.min_valuation() < 0) out.integral_certified = false;
  if (!out.integral_certified) out.integral.tag = RingTag::FracS;
  return out;
}

FrobeniusFilSplit frobenius_fil_split(const TowerElement& x, long i, long working_digits) {
  const PrecisionContext& ctx = *x.ctx;
  if (x.level < 1) fail(Err::DepthExceeded, "frobenius_fil_split needs level >= 1");
  const long p = ctx.p;
  FrobeniusFilSplit out;
  out.fil_target = p * contraction_bound(i, p);

  PDForm form = pd_canonical_form(x);
  if (!form.complete)
    fail(Err::PrecisionExhausted, "divided-power form extends beyond the window");
  // Check the promised filtration bound on the input.
  for (long j = 0; j < std::min<long>(i, static_cast<long>(form.digit.size())); ++j) {
    ZeroWindow zw = form.digit[static_cast<size_t>(j)].zero_window();
    if (zw.digits < std::min(form.digit[static_cast<size_t>(j)].kappa, kExactDigits))
      fail(Err::NotInFiltration,
           "input has a certified nonzero digit below the claimed filtration level " +
               std::to_string(i));
  }

  long wk = working_digits > 0 ? working_digits : std::min(x.kappa, ctx.N + 4L);
  const long lower = x.level - 1;
  TowerElement En1 = eisenstein_level(ctx, lower);
  TowerElement v0 = v_unit(ctx);
  TowerElement v = v0;
  for (long t = 0; t < lower; ++t) v = include_up(v);

  // Precompute the powers that appear: E^{p(j-k)} and v^k.
  long J = static_cast<long>(form.digit.size());
  std::vector<TowerElement> vpow(static_cast<size_t>(J) + 1);
  vpow[0] = TowerElement::constant(ctx, lower, 1);
  for (long k = 1; k <= J; ++k) vpow[static_cast<size_t>(k)] = mul(vpow[static_cast<size_t>(k - 1)], v);
  std::vector<TowerElement> Epow(static_cast<size_t>(J) + 1);
  Epow[0] = TowerElement::constant(ctx, lower, 1);
  TowerElement Ep = power(En1, p);
  for (long t = 1; t <= J; ++t) Epow[static_cast<size_t>(t)] = mul(Epow[static_cast<size_t>(t - 1)], Ep);

  TowerElement w = TowerElement::zero(ctx, lower, RingTag::FrakS);
  w.reduce_kappa(wk);
  mpz_class fact_j = 1, fact_jk, fact_k;
  for (long j = std::max<long>(i, 0); j < J; ++j) {
    const TowerElement& dj = form.digit[static_cast<size_t>(j)];
    if (dj.stored_zero()) continue;
    TowerElement aj_phi = frobenius_down(pd_gamma_coefficient(form, j));
    // k >= j/(p-1) rounded up keeps the coefficient p-integral.
    long kmin = (j + p - 2) / (p - 1);
    for (long k = kmin; k <= j; ++k) {
      mpz_fac_ui(fact_jk.get_mpz_t(), static_cast<unsigned long>(j - k));
      mpz_fac_ui(fact_k.get_mpz_t(), static_cast<unsigned long>(k));
      mpq_class coeff(ctx.p_pow(k), fact_jk * fact_k);
      coeff.canonicalize();
      TowerElement term = mul(aj_phi, mul(Epow[static_cast<size_t>(j - k)], vpow[static_cast<size_t>(k)]));
      term.reduce_kappa(wk);
      term = mul_rational(term, coeff);
      w = add(w, term);
    }
  }
  w.tag = RingTag::FrakS;

  TowerElement phix = frobenius_down(x);
  phix.reduce_kappa(wk);
  TowerElement y = sub(phix, w);
  y.tag = RingTag::S;

  FilBound fb = fil_degree(y, out.fil_target);
  out.integral = w;
  out.fil_part = y;
  out.fil_realized = std::min(fb.bound, out.fil_target);
  out.ok = !fb.exact || fb.bound >= out.fil_target;
  return out;
}

}  // namespace bkt
