#include "bktower/breuil.hpp"

#include "bktower/errors.hpp"

namespace bkt {

BreuilModule base_change(const FilteredBkModule& m) {
  validate_or_throw(m);
  return BreuilModule{m};
}

SMembership certify_in_S(const TowerElement& x) {
  SMembership res;
  PDForm form = pd_canonical_form(x);
  res.complete = form.complete;
  res.digits_checked = static_cast<long>(form.digit.size());
  res.ok = true;
  for (long j = 0; j < res.digits_checked; ++j) {
    const TowerElement& dj = form.digit[static_cast<size_t>(j)];
    if (dj.stored_zero()) continue;
    if (dj.min_valuation() + legendre_valuation(j, x.ctx->p) < 0) {
      res.ok = false;
      res.first_bad_digit = j;
      return res;
    }
  }
  return res;
}

static SMat included_b(const BreuilModule& m, long level) {
  SMat b = m.base.B;
  for (long k = 0; k < level; ++k) b = mat_include_up(b);
  return b;
}

static SMat included_a(const BreuilModule& m, long level) {
  SMat a = m.base.A;
  for (long k = 0; k < level; ++k) a = mat_include_up(a);
  return a;
}

BreuilFilWitness fil_r_membership(const BreuilModule& m, const SMat& v) {
  const PrecisionContext& ctx = m.ctx();
  if (v.cols != 1 || v.rows != m.d()) fail(Err::ConfigInvalid, "expected a d x 1 vector");
  long level = v.level();
  long r = m.r();
  SMat bv = mat_mul(included_b(m, level), v);
  TowerElement e_level = eisenstein_level(ctx, level);

  BreuilFilWitness w;
  w.ok = true;
  w.certified = true;
  w.low_window.digits = kExactDigits;
  w.low_window.udeg = kFullDegree;
  w.x = SMat::zeros(ctx, level, m.d(), 1, RingTag::S);
  for (long k = 0; k < m.d(); ++k) {
    PDForm form = pd_canonical_form(bv.at(k, 0), ctx.p);
    // Digits in slots 0..r-1 must vanish: the graded pieces Fil^j/Fil^{j+1}
    // are free, so the canonical form decides membership slot by slot.
    TowerElement low = pd_reconstruct(form, r);
    if (!low.stored_zero()) {
      w.ok = false;
      return w;
    }
    ZeroWindow zw = low.zero_window();
    w.low_window.digits = std::min(w.low_window.digits, zw.digits);
    w.low_window.udeg = std::min(w.low_window.udeg, zw.udeg);
    long slot_span = std::min<long>(ctx.cutoff(level), r * form.base_degree);
    if (zw.udeg < slot_span || zw.digits < ctx.N - 2) w.certified = false;
    // Slots r..p-1 assemble the witness x: their digits are p-integral
    // elements of S, and d_j E^j = E^r * (d_j E^{j-r}).
    TowerElement xk = TowerElement::zero(ctx, level, RingTag::S);
    for (long j = r; j < ctx.p && j < static_cast<long>(form.digit.size()); ++j)
      xk = add(xk, mul(form.digit[static_cast<size_t>(j)], power(e_level, j - r)));
    w.x.at(k, 0) = xk;
  }
  w.y = mat_sub(v, mat_mul(included_a(m, level), w.x));
  // Transporter certificate: B*y = B*v - E^r*x has its slots < p cancelled by
  // construction; record the realized filtration degree per coordinate.
  SMat by = mat_mul(included_b(m, level), w.y);
  w.y_coordinate_certified = true;
  for (long k = 0; k < m.d(); ++k) {
    w.transporter_fil.push_back(fil_degree(by.at(k, 0), ctx.p + 1));
    FilBound direct = fil_degree(w.y.at(k, 0), ctx.p + 1);
    if (direct.bound < ctx.p) w.y_coordinate_certified = false;
  }
  return w;
}

BreuilFilWitness fil_i_membership(const BreuilModule& m, const SMat& v, long i) {
  if (i < 0 || i > m.r()) fail(Err::ConfigInvalid, "filtration index out of range 0..r");
  TowerElement shift = power(eisenstein_level(m.ctx(), v.level()), m.r() - i);
  return fil_r_membership(m, mat_scale(v, shift));
}

SMat apply_phi_breuil(const BreuilModule& m, const SMat& v, PhiMode mode) {
  const PrecisionContext& ctx = m.ctx();
  long level = v.level();
  auto phi_vec = [&](const SMat& t) {
    return (level >= 1) ? mat_frobenius_down(t) : mat_frobenius_self(t);
  };
  if (mode == PhiMode::Full) return phi_vec(mat_mul(included_b(m, level), v));

  BreuilFilWitness w = fil_r_membership(m, v);
  if (!w.ok) fail(Err::NotInFiltration, "vector is not in Fil^r within the window");
  // c0^r * phi(x) + p^{-r} * phi(B*y): both summands are honest elements of
  // the divided-power ring (p^{j-r}/j! is p-integral for digits j >= p).
  long target = (level >= 1) ? level - 1 : 0;
  TowerElement c0 = c0_unit(ctx);
  for (long k = 0; k < target; ++k) c0 = include_up(c0);
  SMat first = mat_scale(phi_vec(w.x), power(c0, m.r()));
  SMat second = phi_vec(mat_mul(included_b(m, level), w.y));
  for (auto& t : second.a) {
    t = mul_pk(t, -m.r());
    t.tag = tag_join(t.tag, RingTag::S);
  }
  return mat_add(first, second);
}

}  // namespace bkt
