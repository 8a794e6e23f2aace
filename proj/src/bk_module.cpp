#include "bktower/bk_module.hpp"

#include <sstream>

#include "bktower/errors.hpp"

namespace bkt {

const PrecisionContext& FilteredBkModule::ctx() const {
  if (!ctx_) fail(Err::InvalidModule, "module has no context");
  return *ctx_;
}

const PrecisionContext& ClassicalBkModule::ctx() const {
  if (!ctx_) fail(Err::InvalidModule, "module has no context");
  return *ctx_;
}

static SMat included(SMat m, long n) {
  for (long k = 0; k < n; ++k) m = mat_include_up(m);
  return m;
}

static SMat eisenstein_scalar_identity(const PrecisionContext& ctx, long level, long d, long r) {
  TowerElement er = power(eisenstein_level(ctx, level), r);
  SMat m = SMat::zeros(ctx, level, d, d);
  for (long i = 0; i < d; ++i) m.at(i, i) = er;
  return m;
}

ModuleValidation validate(const FilteredBkModule& m) {
  ModuleValidation res;
  const PrecisionContext& ctx = m.ctx();
  if (m.d < 1 || m.A.rows != m.d || m.A.cols != m.d || m.B.rows != m.d || m.B.cols != m.d) {
    res.detail = "matrix shape does not match rank";
    return res;
  }
  if (m.r < 0 || m.r >= ctx.p - 1) {
    res.detail = "height must satisfy 0 <= r < p-1";
    return res;
  }
  if (ctx.M < ctx.e * (m.r + 1) * ctx.p) {
    res.detail = "degree window M too small for this height (need M >= e*(r+1)*p)";
    return res;
  }
  for (const auto& mat : {&m.A, &m.B})
    for (const auto& v : mat->a) {
      if (v.level != 0) {
        res.detail = "module entries must live at tower level 0";
        return res;
      }
      if (v.scale != 0 || v.tag != RingTag::FrakS) {
        res.detail = "module entries must be integral power series";
        return res;
      }
    }
  SMat eri = eisenstein_scalar_identity(ctx, 0, m.d, m.r);
  res.ab = mat_equality(mat_mul(m.A, m.B), eri);
  res.ba = mat_equality(mat_mul(m.B, m.A), eri);
  long digits_needed = std::min<long>(ctx.N - 2, kExactDigits);
  long udeg_needed = ctx.cutoff(0) / 2;
  if (res.ab.mismatch() || !res.ab.equal_within(digits_needed, udeg_needed)) {
    res.detail = "A*B does not equal E^r * I within the window";
    return res;
  }
  if (res.ba.mismatch() || !res.ba.equal_within(digits_needed, udeg_needed)) {
    res.detail = "B*A does not equal E^r * I within the window";
    return res;
  }
  res.det_unit = (mat_det(m.A).min_valuation() == 0);
  if (!res.det_unit) {
    res.detail = "det(A) vanishes mod p (quotient by the filtration not p-torsion free)";
    return res;
  }
  res.ok = true;
  return res;
}

void validate_or_throw(const FilteredBkModule& m) {
  ModuleValidation v = validate(m);
  if (!v.ok) fail(Err::InvalidModule, v.detail);
}

ClassicalBkModule filtered_to_classical(const FilteredBkModule& m) {
  validate_or_throw(m);
  ClassicalBkModule c;
  c.ctx_ = m.ctx_;
  c.d = m.d;
  c.r = m.r;
  c.C = m.B;
  return c;
}

FilteredBkModule classical_to_filtered(const ClassicalBkModule& cm) {
  const PrecisionContext& ctx = cm.ctx();
  TowerElement det = mat_det(cm.C);
  // Split det = E^t * w with w not divisible by E.
  long t = 0;
  while (t <= cm.r * cm.d) {
    DivisionResult dv = weierstrass_divide(det, 1);
    if (!dv.certified || !dv.remainder.stored_zero()) break;
    det = dv.quotient;
    ++t;
  }
  if (det.coeff_padic(0).is_zero() || det.coeff_padic(0).valuation() != 0)
    fail(Err::HeightTooLarge, "det(C) is not E^t * unit with t <= r*d");
  TowerElement det_inv = invert_unit(det, ctx.N);
  TowerElement er = power(eisenstein_level(ctx, 0), cm.r);
  SMat adj = mat_adjugate(cm.C);

  FilteredBkModule out;
  out.ctx_ = cm.ctx_;
  out.d = cm.d;
  out.r = cm.r;
  out.B = cm.C;
  out.A = SMat::zeros(ctx, 0, cm.d, cm.d);
  for (long i = 0; i < cm.d; ++i)
    for (long j = 0; j < cm.d; ++j) {
      DivisionResult dv = weierstrass_divide(mul(er, adj.at(i, j)), t);
      if (!dv.certified || !dv.remainder.stored_zero())
        fail(Err::HeightTooLarge, "E^r * C^{-1} has a non-integral entry");
      TowerElement q = mul(dv.quotient, det_inv);
      q.certify_integral();
      out.A.at(i, j) = q;
    }
  return out;
}

FilWitness fil_membership(const FilteredBkModule& m, const SMat& v, long i) {
  if (v.cols != 1 || v.rows != m.d) fail(Err::ConfigInvalid, "fil_membership expects a d x 1 vector");
  if (i < 0 || i > m.r) fail(Err::ConfigInvalid, "filtration index out of range 0..r");
  long level = v.level();
  SMat bv = mat_mul(included(m.B, level), v);
  FilWitness w;
  w.ok = true;
  w.certified = true;
  w.x = SMat::zeros(m.ctx(), level, m.d, 1);
  for (long k = 0; k < m.d; ++k) {
    DivisionResult dv = weierstrass_divide(bv.at(k, 0), i);
    if (!dv.remainder.stored_zero()) {
      w.ok = false;
      // Distinguish a certified obstruction from window exhaustion.
      if (dv.remainder.min_valuation() < dv.remainder.kappa) return w;
      w.certified = false;
      return w;
    }
    if (!dv.certified) w.certified = false;
    w.x.at(k, 0) = dv.quotient;
  }
  return w;
}

SMat apply_phi_M(const FilteredBkModule& m, const SMat& v) {
  long level = v.level();
  SMat bv = mat_mul(included(m.B, level), v);
  return (level >= 1) ? mat_frobenius_down(bv) : mat_frobenius_self(bv);
}

SMat phi_M_r(const FilteredBkModule& m, const SMat& v) {
  FilWitness w = fil_membership(m, v, m.r);
  if (!w.ok) fail(Err::NotInFiltration, "vector is not in Fil^r within the window");
  if (!w.certified)
    fail(Err::PrecisionExhausted, "Fil^r membership undecidable within the window");
  return (v.level() >= 1) ? mat_frobenius_down(w.x) : mat_frobenius_self(w.x);
}

FilteredBkModule random_filtered(const PrecisionContext& ctx, long d, long r, Rng& rng) {
  if (r < 0 || r >= ctx.p - 1) fail(Err::ConfigInvalid, "height must satisfy 0 <= r < p-1");
  std::vector<long> a(static_cast<size_t>(d));
  for (auto& ai : a) ai = rng.range(0, r);
  SMat u_inv, v_inv;
  SMat u = random_unimodular(ctx, d, 2, rng, &u_inv);
  SMat v = random_unimodular(ctx, d, 2, rng, &v_inv);
  TowerElement e1 = eisenstein_level(ctx, 0);
  SMat da = SMat::zeros(ctx, 0, d, d);
  SMat db = SMat::zeros(ctx, 0, d, d);
  for (long i = 0; i < d; ++i) {
    da.at(i, i) = power(e1, a[static_cast<size_t>(i)]);
    db.at(i, i) = power(e1, r - a[static_cast<size_t>(i)]);
  }
  FilteredBkModule out;
  out.ctx_ = &ctx;
  out.d = d;
  out.r = r;
  out.A = mat_mul(mat_mul(u, da), v);
  out.B = mat_mul(mat_mul(v_inv, db), u_inv);
  // The construction makes both products E^r * I exactly; treat any deviation
  // as an internal error rather than a test-time surprise.
  SMat eri = eisenstein_scalar_identity(ctx, 0, d, r);
  if (mat_equality(mat_mul(out.A, out.B), eri).mismatch() ||
      mat_equality(mat_mul(out.B, out.A), eri).mismatch())
    fail(Err::InvalidModule, "random module construction violated A*B = E^r * I");
  return out;
}

FilteredBkModule multiplicative_group_module(const PrecisionContext& ctx) {
  FilteredBkModule out;
  out.ctx_ = &ctx;
  out.d = 1;
  out.r = 1;
  out.A = SMat::identity(ctx, 0, 1);
  out.B = SMat::zeros(ctx, 0, 1, 1);
  out.B.at(0, 0) = eisenstein_level(ctx, 0);
  return out;
}

FilteredBkModule etale_line_module(const PrecisionContext& ctx) {
  FilteredBkModule out;
  out.ctx_ = &ctx;
  out.d = 1;
  out.r = 1;
  out.A = SMat::zeros(ctx, 0, 1, 1);
  out.A.at(0, 0) = eisenstein_level(ctx, 0);
  out.B = SMat::identity(ctx, 0, 1);
  return out;
}

}  // namespace bkt
