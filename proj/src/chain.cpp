#include "bktower/chain.hpp"

#include <algorithm>
#include <sstream>

#include "bktower/errors.hpp"

namespace bkt {

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "PASS";
    case Verdict::Inconclusive: return "INCONCLUSIVE";
    case Verdict::Fail: return "FAIL";
  }
  return "?";
}

static SMat included(SMat m, long n) {
  for (long k = 0; k < n; ++k) m = mat_include_up(m);
  return m;
}

static ModuleChain chain_by_recurrence(const FilteredBkModule& m, SMat w0, long depth) {
  const PrecisionContext& ctx = m.ctx();
  if (depth > ctx.depth) fail(Err::DepthExceeded, "chain depth exceeds the context depth");
  ModuleChain c;
  c.mod = m;
  c.depth = depth;
  c.w.push_back(std::move(w0));
  for (long n = 1; n <= depth; ++n)
    c.w.push_back(mat_mul(included(m.A, n), mat_frobenius_inverse(c.w.back())));
  return c;
}

ModuleChain generator_chain(const FilteredBkModule& m, long i, long depth) {
  if (i < 0 || i >= m.d) fail(Err::ConfigInvalid, "generator index out of range");
  return chain_by_recurrence(m, SMat::basis_column(m.ctx(), 0, m.d, i), depth);
}

ModuleChain filr_generator_chain(const FilteredBkModule& m, const SMat& x0, long depth) {
  return chain_by_recurrence(m, mat_mul(m.A, x0), depth);
}

ModuleChain chain_from_top(const FilteredBkModule& m, const SMat& w_top, long depth) {
  const PrecisionContext& ctx = m.ctx();
  if (depth > ctx.depth) fail(Err::DepthExceeded, "chain depth exceeds the context depth");
  if (w_top.cols != 1 || w_top.rows != m.d || w_top.level() != depth)
    fail(Err::ConfigInvalid, "top vector has the wrong shape or level");
  ModuleChain c;
  c.mod = m;
  c.depth = depth;
  c.w.assign(static_cast<size_t>(depth) + 1, SMat{});
  c.w[static_cast<size_t>(depth)] = w_top;
  for (long n = depth - 1; n >= 0; --n) {
    SMat bw = mat_mul(included(m.B, n + 1), c.w[static_cast<size_t>(n + 1)]);
    SMat down = SMat::zeros(ctx, n, m.d, 1, RingTag::S);
    for (long k = 0; k < m.d; ++k) {
      DivisionResult dv = weierstrass_divide(bw.at(k, 0), m.r);
      if (!dv.remainder.stored_zero())
        fail(Err::NotInFiltration,
             "image of the top vector is not divisible by E^r at level " + std::to_string(n + 1));
      down.at(k, 0) = frobenius_down(dv.quotient);
    }
    c.w[static_cast<size_t>(n)] = down;
  }
  return c;
}

SMat lift_element(const SMat& s) { return mat_frobenius_inverse(s); }

ModuleChain chain_add(const ModuleChain& a, const ModuleChain& b) {
  if (a.depth != b.depth) fail(Err::ConfigInvalid, "chain_add: depth mismatch");
  ModuleChain out = a;
  for (size_t n = 0; n < out.w.size(); ++n) out.w[n] = mat_add(a.w[n], b.w[n]);
  return out;
}

ModuleChain chain_scale(const ModuleChain& c, const TowerElement& g) {
  ModuleChain out = c;
  TowerElement gn = g;
  for (long n = 0; n <= c.depth; ++n) {
    out.w[static_cast<size_t>(n)] = mat_scale(c.w[static_cast<size_t>(n)], gn);
    if (n < c.depth) gn = frobenius_inverse(gn);
  }
  return out;
}

CompatReport check_compat(const ModuleChain& c) {
  const PrecisionContext& ctx = c.mod.ctx();
  CompatReport rep;
  rep.ok = true;
  rep.certified = true;
  const long digits_needed = ctx.N - 2;
  for (long n = 0; n < c.depth; ++n) {
    TowerElement phi_e_r = power(frobenius_self(eisenstein_level(ctx, n)), c.mod.r);
    SMat lhs = mat_scale(c.w[static_cast<size_t>(n)], phi_e_r);
    SMat rhs = mat_frobenius_down(
        mat_mul(included(c.mod.B, n + 1), c.w[static_cast<size_t>(n + 1)]));
    EqualityReport er = mat_equality(lhs, rhs);
    rep.level.push_back(er);
    if (er.mismatch()) {
      rep.ok = false;
      rep.certified = false;
      if (rep.first_bad_level < 0) rep.first_bad_level = n;
    } else if (!er.equal_within(digits_needed, ctx.cutoff(n) / 2)) {
      rep.certified = false;
      if (rep.first_bad_level < 0) rep.first_bad_level = n;
    }
  }
  return rep;
}

DescentResult descend(const ModuleChain& c) {
  const PrecisionContext& ctx = c.mod.ctx();
  const long d = c.mod.d;
  const long r = c.mod.r;
  const long p = ctx.p;
  const long depth = c.depth;
  DescentResult res;
  if (depth < 2) {
    res.verdict = Verdict::Inconclusive;
    res.detail = "depth < 2: no contraction step available";
    return res;
  }

  CompatReport compat = check_compat(c);
  if (!compat.ok) {
    res.verdict = Verdict::Fail;
    res.detail = "chain is not Frobenius-compatible (level " +
                 std::to_string(compat.first_bad_level) + ")";
    return res;
  }
  bool window_trouble = !compat.certified;

  // Stage 1: s_n = (p * B * w[n]) / E^r for n = 1..depth.  Compatibility
  // pushed through B gives phi(s_{n+1}) = A * s_n and phi(s_1) = p * w[0].
  std::vector<SMat> s(static_cast<size_t>(depth) + 1);
  for (long n = 1; n <= depth; ++n) {
    SMat bw = mat_mul(included(c.mod.B, n), c.w[static_cast<size_t>(n)]);
    SMat sn = SMat::zeros(ctx, n, d, 1, RingTag::S);
    for (long k = 0; k < d; ++k) {
      DivisionResult dv = weierstrass_divide(mul_int(bw.at(k, 0), p), r);
      if (!dv.remainder.stored_zero()) {
        res.verdict = Verdict::Fail;
        res.detail = "level " + std::to_string(n) + " vector is not in Fil^r";
        return res;
      }
      if (!dv.certified) window_trouble = true;
      sn.at(k, 0) = dv.quotient;
    }
    s[static_cast<size_t>(n)] = sn;
  }

  // Stage 2: split the top level into integral + filtration parts.
  SMat a_cur = SMat::zeros(ctx, depth, d, 1);
  SMat b_cur = SMat::zeros(ctx, depth, d, 1, RingTag::S);
  for (long k = 0; k < d; ++k) {
    IntegralFilSplit sp = integral_fil_split(s[static_cast<size_t>(depth)].at(k, 0));
    if (!sp.integral_certified) {
      res.verdict = Verdict::Fail;
      res.detail = "top-level coefficient " + std::to_string(k) +
                   " has a denominator the divided-power ring does not absorb";
      return res;
    }
    a_cur.at(k, 0) = sp.integral;
    b_cur.at(k, 0) = sp.fil_part;
  }
  long j = p;
  res.steps.push_back({depth, p, p});

  // Stage 3: contraction.  phi(s_m) = A * s_{m-1} lets us peel the integral
  // part one level down; the filtration degree of the leftover follows
  // j -> p*b(j) - r along the height-adjusted sequence, capped by what the
  // window certifies.
  for (long m = depth; m >= 2; --m) {
    const long target = p * contraction_bound(j, p) - r;
    long realized = kFullDegree;
    SMat w_int = SMat::zeros(ctx, m - 1, d, 1);
    for (long k = 0; k < d; ++k) {
      FrobeniusFilSplit fs;
      try {
        fs = frobenius_fil_split(b_cur.at(k, 0), j);
      } catch (const Error& e) {
        res.verdict = (e.code() == Err::NotInFiltration) ? Verdict::Fail : Verdict::Inconclusive;
        res.detail = std::string("contraction split failed at level ") + std::to_string(m) +
                     ": " + e.what();
        return res;
      }
      if (!fs.ok) {
        res.verdict = Verdict::Fail;
        res.detail = "filtration contraction violated at level " + std::to_string(m - 1) +
                     " (certified digit below the target degree)";
        return res;
      }
      w_int.at(k, 0) = fs.integral;
      realized = std::min(realized, fs.fil_realized);
    }
    SMat numerator = mat_mul(included(c.mod.B, m - 1),
                             mat_add(mat_frobenius_down(a_cur), w_int));
    SMat a_next = SMat::zeros(ctx, m - 1, d, 1);
    for (long k = 0; k < d; ++k) {
      DivisionResult dv = weierstrass_divide(numerator.at(k, 0), r);
      if (!dv.remainder.stored_zero()) {
        res.verdict = Verdict::Fail;
        res.detail = "contraction identity violated at level " + std::to_string(m - 1) +
                     " (integral part not divisible by E^r)";
        return res;
      }
      if (!dv.certified) window_trouble = true;
      TowerElement q = dv.quotient;
      try {
        q.certify_integral();
      } catch (const Error&) {
        res.verdict = Verdict::Fail;
        res.detail = "contraction produced a non-integral quotient at level " +
                     std::to_string(m - 1);
        return res;
      }
      a_next.at(k, 0) = q;
    }
    j = std::min(target, realized - r);
    if (j < 1) {
      res.verdict = Verdict::Inconclusive;
      res.detail = "window closed: no certified filtration degree left at level " +
                   std::to_string(m - 1);
      return res;
    }
    res.steps.push_back({m - 1, target, j});
    a_cur = a_next;
    b_cur = mat_sub(s[static_cast<size_t>(m - 1)], a_next);
  }
  res.residual_fil = j;

  // Stage 4: divide the level-1 integral part by p; the quotient is the
  // recovered vector.  A non-divisible coefficient below the guaranteed
  // u-degree floor is a genuine obstruction; beyond it, only a truncation.
  long i_floor;
  {
    long pn = 1;
    for (long t = 0; t < depth; ++t) pn *= p;
    i_floor = p * (pn - r * ((pn - 1) / (p - 1)));
  }
  res.u_window = ctx.cutoff(1);
  res.w = SMat::zeros(ctx, 1, d, 1);
  long digits = kExactDigits;
  for (long k = 0; k < d; ++k) {
    long exact_below = kFullDegree;
    TowerElement q = divide_p_certified(a_cur.at(k, 0), exact_below);
    if (exact_below < kFullDegree) {
      const long guaranteed = std::min(ctx.e * i_floor, ctx.cutoff(1));
      if (exact_below < guaranteed) {
        res.verdict = Verdict::Fail;
        res.detail = "coefficient " + std::to_string(k) +
                     " is not divisible by p at degree " + std::to_string(exact_below) +
                     " (below the guaranteed floor " + std::to_string(guaranteed) + ")";
        return res;
      }
      window_trouble = true;
      res.u_window = std::min(res.u_window, exact_below);
    }
    digits = std::min(digits, q.kappa);
    res.w.at(k, 0) = q;
  }
  res.digits = digits;

  // Stage 5: the recovered vector reproduces the chain head.  What the finite
  // depth leaves undetermined is s_1 - a_cur: the last contraction drop pushed
  // through B and E^r, a combination of gamma_t(E at level 1) with
  // t >= residual + r.  Those terms anchor at the top degree of E^{t-r}, and
  // their coefficients k E-steps below the top carry p^k on top of the drop's
  // own p-power, so below u-degree e*p*residual the drop sits beyond working
  // precision.  Inside that window agreement is owed; beyond it the head is
  // simply not determined by a depth-limited chain.
  SMat head = mat_frobenius_down(res.w);
  EqualityReport full = mat_equality(head, c.w[0]);

  const long digits_needed = ctx.N - 2;
  const long udeg_needed = ctx.cutoff(0) / 2;
  const long u_cert = std::min(udeg_needed, ctx.e * p * res.residual_fil);
  auto window = [&](const SMat& t) {
    return mat_map(t, [&](const TowerElement& x) { return truncate_window(x, u_cert); });
  };
  res.recovery = mat_equality(window(head), window(c.w[0]));

  const long theory = contraction_sequence(ContractionKind::HeightAdjusted, p, r, depth).back();
  if (full.mismatch()) {
    // Even outside the certified window the residual cannot sink arbitrarily
    // deep p-adically: its valuation is at least
    // residual - cutoff/(e*p) - v_p(residual!).  Deeper disagreement cannot
    // come from the residual and is a genuine failure.
    const long reach = res.residual_fil - ctx.cutoff(0) / (ctx.e * p) -
                       legendre_valuation(res.residual_fil, p) - 2;
    if (full.digits < reach) {
      res.verdict = Verdict::Fail;
      res.detail = "recovered vector disagrees with the chain head beyond the residual window";
      return res;
    }
  }
  // Residual fuzz inside the window is fine as long as it stays at least
  // digits_needed deep; the equal_within gate below enforces exactly that.
  if (!window_trouble && res.recovery.equal_within(digits_needed, udeg_needed) &&
      res.residual_fil >= theory && res.digits >= digits_needed) {
    res.verdict = Verdict::Pass;
    std::ostringstream os;
    os << "residual_fil=" << res.residual_fil << ", recovery agreement ("
       << std::min<long>(res.recovery.digits, 999) << "," << res.recovery.udeg << ")";
    res.detail = os.str();
  } else {
    res.verdict = Verdict::Inconclusive;
    std::ostringstream os;
    os << "residual_fil=" << res.residual_fil << " (theory " << theory
       << "), digits=" << std::min<long>(res.digits, 999) << ", recovery agreement ("
       << std::min<long>(res.recovery.digits, 999) << "," << res.recovery.udeg << ")";
    res.detail = os.str();
  }
  return res;
}

RecoveryResult recover_filtered(const BreuilModule& m, long depth, Rng& rng) {
  const PrecisionContext& ctx = m.ctx();
  const long d = m.d();
  RecoveryResult out;
  out.module = m.base;
  bool window_trouble = false;

  ModuleValidation val = validate(m.base);
  if (!val.ok) {
    out.verdict = Verdict::Fail;
    out.detail = "module presentation failed re-validation: " + val.detail;
    return out;
  }

  // Generator chains must be Frobenius-compatible.
  std::vector<ModuleChain> gens;
  for (long i = 0; i < d; ++i) {
    gens.push_back(generator_chain(m.base, i, depth));
    CompatReport cr = check_compat(gens.back());
    if (!cr.ok) {
      out.verdict = Verdict::Fail;
      out.detail = "generator chain " + std::to_string(i) + " failed compatibility";
      return out;
    }
    if (!cr.certified) window_trouble = true;
  }

  // A chain seeded from the filtration starts inside Fil^r.
  SMat x0 = SMat::zeros(ctx, 0, d, 1);
  for (long k = 0; k < d; ++k)
    x0.at(k, 0) = TowerElement::constant(ctx, 0, rng.range(-ctx.p, ctx.p));
  ModuleChain nu = filr_generator_chain(m.base, x0, depth);
  BreuilFilWitness fw = fil_r_membership(m, nu.w[0]);
  if (!fw.ok) {
    out.verdict = Verdict::Fail;
    out.detail = "head of the filtration-seeded chain rejected by Fil^r membership";
    return out;
  }
  if (!fw.certified) window_trouble = true;
  CompatReport nr = check_compat(nu);
  if (!nr.ok) {
    out.verdict = Verdict::Fail;
    out.detail = "filtration-seeded chain failed compatibility";
    return out;
  }
  if (!nr.certified) window_trouble = true;

  // Descend a random integral combination and compare coefficients.
  ModuleChain combo;
  std::vector<TowerElement> g(static_cast<size_t>(d));
  for (long i = 0; i < d; ++i) {
    std::vector<mpz_class> coeffs(3);
    for (auto& z : coeffs) z = rng.range(-ctx.p, ctx.p);
    g[static_cast<size_t>(i)] = TowerElement::from_coeffs(ctx, 0, coeffs);
    ModuleChain scaled = chain_scale(gens[static_cast<size_t>(i)], g[static_cast<size_t>(i)]);
    combo = (i == 0) ? scaled : chain_add(combo, scaled);
  }
  out.combo_coeffs = g;
  out.combo = descend(combo);
  if (out.combo.verdict == Verdict::Fail) {
    out.verdict = Verdict::Fail;
    out.detail = "descent failed: " + out.combo.detail;
    return out;
  }
  if (out.combo.verdict == Verdict::Inconclusive) window_trouble = true;

  // The descended vector must match the planted coefficients, inside the
  // window the residual filtration leaves determined (see descend, stage 5).
  SMat planted = SMat::zeros(ctx, 0, d, 1);
  for (long i = 0; i < d; ++i) planted.at(i, 0) = g[static_cast<size_t>(i)];
  const long u_cert =
      std::min(ctx.cutoff(0) / 2, ctx.e * ctx.p * out.combo.residual_fil);
  auto window = [&](const SMat& t) {
    return mat_map(t, [&](const TowerElement& x) { return truncate_window(x, u_cert); });
  };
  EqualityReport er =
      mat_equality(window(mat_frobenius_down(out.combo.w)), window(planted));
  // A certified descent still carries residual fuzz at depth >= N-2 digits;
  // shallower disagreement with the planted coefficients is a real error.
  if (er.mismatch() && er.digits < ctx.N - 2 && out.combo.verdict == Verdict::Pass) {
    out.verdict = Verdict::Fail;
    out.detail = "descent recovered the wrong coefficients";
    return out;
  }
  if (!er.equal_within(ctx.N - 2, ctx.cutoff(0) / 2)) window_trouble = true;

  if (window_trouble) {
    out.verdict = Verdict::Inconclusive;
    out.detail = "window closed before full certification: " + out.combo.detail;
  } else {
    out.verdict = Verdict::Pass;
    out.detail = out.combo.detail;
  }
  return out;
}

}  // namespace bkt
