#include "bktower/series.hpp"

#include <atomic>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "bktower/errors.hpp"

namespace bkt {

const char* tag_name(RingTag t) {
  switch (t) {
    case RingTag::FrakS: return "frakS";
    case RingTag::S: return "S";
    case RingTag::FracS: return "fracS";
  }
  return "?";
}

RingTag tag_join(RingTag a, RingTag b) {
  int m = std::max(static_cast<int>(a), static_cast<int>(b));
  return static_cast<RingTag>(m);
}

namespace {

void check_siblings(const TowerElement& a, const TowerElement& b) {
  if (a.ctx == nullptr || b.ctx == nullptr) fail(Err::ConfigInvalid, "element without context");
  if (a.ctx != b.ctx && !(*a.ctx == *b.ctx)) fail(Err::ConfigInvalid, "context mismatch");
  if (a.level != b.level)
    fail(Err::DepthExceeded, "level mismatch: " + std::to_string(a.level) + " vs " +
                                 std::to_string(b.level));
}

long add_prec(long a, long b) {
  if (a >= kExactDigits || b >= kExactDigits) return kExactDigits;
  long s = a + b;
  return s > kExactDigits ? kExactDigits : s;
}

}  // namespace

TowerElement TowerElement::zero(const PrecisionContext& ctx, long level, RingTag tag) {
  TowerElement t;
  t.ctx = &ctx;
  t.level = level;
  t.tag = tag;
  (void)ctx.cutoff(level);  // validates level
  return t;
}

TowerElement TowerElement::constant(const PrecisionContext& ctx, long level, mpz_class v,
                                    RingTag tag) {
  TowerElement t = zero(ctx, level, tag);
  if (v != 0) t.c.push_back(std::move(v));
  return t;
}

TowerElement TowerElement::monomial(const PrecisionContext& ctx, long level, long deg,
                                    mpz_class v, RingTag tag) {
  TowerElement t = zero(ctx, level, tag);
  if (deg < 0) fail(Err::ConfigInvalid, "negative monomial degree");
  if (v != 0 && deg < ctx.cutoff(level)) {
    t.c.assign(static_cast<size_t>(deg) + 1, mpz_class(0));
    t.c.back() = std::move(v);
  } else if (v != 0) {
    t.udeg = ctx.cutoff(level);  // the monomial itself fell off the window
  }
  return t;
}

TowerElement TowerElement::from_coeffs(const PrecisionContext& ctx, long level,
                                       std::vector<mpz_class> coeffs, RingTag tag,
                                       long scale) {
  TowerElement t = zero(ctx, level, tag);
  t.c = std::move(coeffs);
  t.scale = scale;
  t.normalize();
  return t;
}

bool TowerElement::stored_zero() const {
  for (const auto& x : c)
    if (x != 0) return false;
  return true;
}

long TowerElement::ord() const {
  for (size_t i = 0; i < c.size(); ++i)
    if (c[i] != 0) return static_cast<long>(i);
  return udeg;
}

long TowerElement::deg_stored() const {
  for (size_t i = c.size(); i > 0; --i)
    if (c[i - 1] != 0) return static_cast<long>(i - 1);
  return -1;
}

mpq_class TowerElement::coeff_rational(long a) const {
  mpq_class v(a >= 0 && a < static_cast<long>(c.size()) ? c[static_cast<size_t>(a)]
                                                        : mpz_class(0));
  if (scale > 0) v /= ctx->p_pow(scale);
  return v;
}

PadicCoeff TowerElement::coeff_padic(long a) const {
  long p = ctx->p;
  if (a >= udeg) return PadicCoeff::fuzzy_zero(p, -scale);  // no information
  if (a < 0 || a >= static_cast<long>(c.size()) || c[static_cast<size_t>(a)] == 0) {
    return kappa >= kExactDigits ? PadicCoeff::zero(p) : PadicCoeff::fuzzy_zero(p, kappa);
  }
  const mpz_class& z = c[static_cast<size_t>(a)];
  long v = int_valuation(z, p) - scale;
  mpz_class unit = z / ctx->p_pow(v + scale);
  long digits = kappa >= kExactDigits ? kExactDigits : kappa - v;
  return PadicCoeff::make(p, v, unit, digits);
}

long TowerElement::min_valuation() const {
  long best = kExactDigits;
  for (const auto& z : c)
    if (z != 0) best = std::min(best, int_valuation(z, ctx->p) - scale);
  return best;
}

ZeroWindow TowerElement::zero_window() const {
  return ZeroWindow{std::min(kappa, min_valuation()), udeg};
}

void TowerElement::normalize() {
  if (ctx == nullptr) fail(Err::ConfigInvalid, "element without context");
  if (scale < 0) fail(Err::ConfigInvalid, "negative scale");
  long cut = ctx->cutoff(level);
  if (static_cast<long>(c.size()) > cut) {
    c.resize(static_cast<size_t>(cut));
    udeg = std::min(udeg, cut);
  }
  if (udeg > kFullDegree) udeg = kFullDegree;
  if (udeg < kFullDegree && udeg > cut) udeg = cut;
  if (udeg < 0) udeg = 0;
  // Coefficients beyond the trusted window are noise; never store them.
  if (udeg < kFullDegree && static_cast<long>(c.size()) > udeg)
    c.resize(static_cast<size_t>(udeg));
  if (kappa < 0) kappa = 0;
  if (kappa < kExactDigits) {
    mpz_class m = ctx->p_pow(kappa + scale);
    for (auto& z : c) {
      mpz_fdiv_r(z.get_mpz_t(), z.get_mpz_t(), m.get_mpz_t());
    }
  }
  // Strip common p factors out of the scale.
  while (scale > 0) {
    bool all = true;
    for (const auto& z : c)
      if (!mpz_divisible_ui_p(z.get_mpz_t(), static_cast<unsigned long>(ctx->p))) {
        all = false;
        break;
      }
    if (!all) break;
    for (auto& z : c) mpz_divexact_ui(z.get_mpz_t(), z.get_mpz_t(), static_cast<unsigned long>(ctx->p));
    --scale;
  }
  while (!c.empty() && c.back() == 0) c.pop_back();
  if (scale > ctx->denominator_budget())
    fail(Err::DenominatorOverflow,
         "scale " + std::to_string(scale) + " exceeds budget " +
             std::to_string(ctx->denominator_budget()));
}

void TowerElement::reduce_kappa(long k) {
  if (k < kappa) {
    kappa = k;
    normalize();
  }
}

void TowerElement::certify_integral() {
  normalize();
  if (scale != 0) {
    // After stripping, a positive scale means some coefficient has certified
    // negative valuation.
    long bad = -1;
    for (size_t i = 0; i < c.size(); ++i)
      if (c[i] != 0 && int_valuation(c[i], ctx->p) < scale) {
        bad = static_cast<long>(i);
        break;
      }
    fail(Err::NotIntegral, "coefficient of degree " + std::to_string(bad) +
                               " has valuation " + std::to_string(bad >= 0 ? int_valuation(c[static_cast<size_t>(bad)], ctx->p) - scale : -scale));
  }
  tag = RingTag::FrakS;
}

std::string TowerElement::str(long max_terms) const {
  std::ostringstream os;
  os << "[n=" << level << " " << tag_name(tag) << " k=";
  if (kappa >= kExactDigits)
    os << "exact";
  else
    os << kappa;
  os << " D=";
  if (udeg >= kFullDegree)
    os << "full";
  else
    os << udeg;
  if (scale > 0) os << " /p^" << scale;
  os << "]";
  long shown = 0;
  for (size_t i = 0; i < c.size() && shown < max_terms; ++i) {
    if (c[i] == 0) continue;
    os << (shown ? " + " : " ") << c[i].get_str() << "*u^" << i;
    ++shown;
  }
  if (shown == 0) os << " 0";
  return os.str();
}

// ---- arithmetic -----------------------------------------------------------

TowerElement add(const TowerElement& a, const TowerElement& b) {
  check_siblings(a, b);
  TowerElement r = TowerElement::zero(*a.ctx, a.level, tag_join(a.tag, b.tag));
  r.scale = std::max(a.scale, b.scale);
  r.kappa = std::min(a.kappa, b.kappa);
  r.udeg = std::min(a.udeg, b.udeg);
  mpz_class fa = a.ctx->p_pow(r.scale - a.scale);
  mpz_class fb = b.ctx->p_pow(r.scale - b.scale);
  r.c.assign(std::max(a.c.size(), b.c.size()), mpz_class(0));
  for (size_t i = 0; i < a.c.size(); ++i) r.c[i] = a.c[i] * fa;
  for (size_t i = 0; i < b.c.size(); ++i) r.c[i] += b.c[i] * fb;
  r.normalize();
  return r;
}

TowerElement neg(const TowerElement& a) {
  TowerElement r = a;
  for (auto& z : r.c) z = -z;
  r.normalize();
  return r;
}

TowerElement sub(const TowerElement& a, const TowerElement& b) { return add(a, neg(b)); }

TowerElement mul(const TowerElement& a, const TowerElement& b) {
  check_siblings(a, b);
  TowerElement r = TowerElement::zero(*a.ctx, a.level, tag_join(a.tag, b.tag));
  r.scale = a.scale + b.scale;
  if (a.kappa >= kExactDigits && b.kappa >= kExactDigits)
    r.kappa = kExactDigits;
  else
    r.kappa = std::min(a.kappa >= kExactDigits ? kExactDigits : a.kappa - b.scale,
                       b.kappa >= kExactDigits ? kExactDigits : b.kappa - a.scale);
  long cut = a.ctx->cutoff(a.level);
  long orda = a.ord(), ordb = b.ord();
  if (a.udeg >= kFullDegree && b.udeg >= kFullDegree)
    r.udeg = kFullDegree;
  else
    r.udeg = std::min(add_prec(a.udeg, ordb), add_prec(b.udeg, orda));
  if (a.stored_zero() || b.stored_zero()) {
    r.normalize();
    return r;
  }
  long need = static_cast<long>(a.c.size() + b.c.size()) - 1;
  long outlen = std::min(need, cut);
  if (r.udeg < kFullDegree) outlen = std::min(outlen, r.udeg);
  if (need > cut && r.udeg >= kFullDegree) r.udeg = cut;
  if (outlen <= 0) {
    r.c.clear();
    r.normalize();
    return r;
  }
  if (parallel_kernels_enabled())
    conv_truncated_parallel(a.c, b.c, r.c, outlen);
  else
    conv_truncated_serial(a.c, b.c, r.c, outlen);
  r.normalize();
  return r;
}

TowerElement shift(const TowerElement& a, long k) {
  if (k < 0) fail(Err::ConfigInvalid, "negative shift");
  if (k == 0) return a;
  TowerElement r = a;
  r.c.insert(r.c.begin(), static_cast<size_t>(k), mpz_class(0));
  r.udeg = add_prec(a.udeg, k);
  r.normalize();
  return r;
}

TowerElement mul_int(const TowerElement& a, const mpz_class& z) {
  TowerElement r = a;
  if (z == 0) {
    r.c.clear();
    r.kappa = kExactDigits;
    r.scale = 0;
    r.normalize();
    return r;
  }
  long v = int_valuation(z, a.ctx->p);
  r.kappa = add_prec(a.kappa, v);
  for (auto& x : r.c) x *= z;
  r.normalize();
  return r;
}

TowerElement mul_pk(const TowerElement& a, long k) {
  TowerElement r = a;
  if (k >= 0) {
    long off = std::min(k, r.scale);
    r.scale -= off;
    k -= off;
    if (k > 0) {
      mpz_class f = a.ctx->p_pow(k);
      for (auto& x : r.c) x *= f;
    }
    r.kappa = add_prec(r.kappa, k + off);
  } else {
    r.scale += -k;
    if (r.kappa < kExactDigits) r.kappa = r.kappa + k;  // dividing by p loses digits
  }
  r.normalize();
  return r;
}

TowerElement mul_rational(const TowerElement& a, const mpq_class& q) {
  if (q == 0) return mul_int(a, 0);
  const mpz_class& den = q.get_den();
  long vd = int_valuation(den, a.ctx->p);
  mpz_class unit_den = den / a.ctx->p_pow(vd);
  TowerElement r = mul_int(a, q.get_num());
  r = mul_pk(r, -vd);
  if (unit_den == 1) return r;
  if (unit_den == -1) return neg(r);
  if (r.kappa >= kExactDigits)
    fail(Err::PrecisionExhausted,
         "rational scalar with non-p denominator needs a finite digit window; reduce_kappa first");
  mpz_class m = a.ctx->p_pow(r.kappa + r.scale);
  mpz_class inv;
  if (!mpz_invert(inv.get_mpz_t(), unit_den.get_mpz_t(), m.get_mpz_t()))
    fail(Err::ConfigInvalid, "denominator not invertible");
  for (auto& x : r.c) x *= inv;
  r.normalize();
  return r;
}

TowerElement power(const TowerElement& a, long k) {
  if (k < 0) fail(Err::ConfigInvalid, "negative power");
  TowerElement acc = TowerElement::constant(*a.ctx, a.level, 1, a.tag);
  // Keep the base's window even for k = 0 consumers that combine results.
  TowerElement base = a;
  while (k > 0) {
    if (k & 1) acc = mul(acc, base);
    k >>= 1;
    if (k > 0) base = mul(base, base);
  }
  return acc;
}

TowerElement invert_unit(const TowerElement& a, long digits) {
  PadicCoeff c0 = a.coeff_padic(0);
  if (c0.is_zero() || c0.valuation() != 0)
    fail(Err::PrecisionExhausted, "invert_unit needs a constant coefficient of valuation 0");
  TowerElement w = a;
  w.reduce_kappa(std::min(a.kappa, digits));
  mpq_class c = w.coeff_rational(0);
  TowerElement y = mul_rational(w, mpq_class(-1) / c);  // -a/c = -(1 + tail)
  // tail = -(y + 1) has positive order; invert 1 - tail ... build geometric sum.
  TowerElement one = TowerElement::constant(*a.ctx, a.level, 1, w.tag);
  TowerElement t = add(y, one);  // t = 1 - a/c, ord(t) >= 1
  TowerElement acc = one;
  TowerElement term = one;
  long window = std::min(w.udeg >= kFullDegree ? a.ctx->cutoff(a.level) : w.udeg,
                         a.ctx->cutoff(a.level));
  long lo = t.ord();
  if (lo <= 0) lo = 1;
  for (long k = 1; k * lo < window; ++k) {
    term = mul(term, t);
    if (term.stored_zero()) break;
    acc = add(acc, term);
  }
  // A constant unit leaves acc at exact precision; the division by c below
  // needs the finite working window either way.
  acc.reduce_kappa(w.kappa);
  TowerElement r = mul_rational(acc, mpq_class(1) / c);
  r.udeg = std::min(r.udeg, window);
  r.normalize();
  return r;
}

TowerElement divide_p_certified(const TowerElement& a, long& exact_below) {
  exact_below = kFullDegree;
  const mpz_class need = a.ctx->p_pow(a.scale + 1);
  for (long k = 0; k <= a.deg_stored(); ++k) {
    const mpz_class& ck = a.c[static_cast<size_t>(k)];
    if (ck != 0 && mpz_divisible_p(ck.get_mpz_t(), need.get_mpz_t()) == 0) {
      exact_below = k;
      break;
    }
  }
  TowerElement r = a;
  if (exact_below < kFullDegree) {
    r.udeg = std::min(r.udeg, exact_below);
    r.normalize();
  }
  return mul_pk(r, -1);
}

TowerElement truncate_window(const TowerElement& a, long window) {
  TowerElement r = a;
  if (window < r.udeg) {
    r.udeg = std::max<long>(window, 0);
    r.normalize();
  }
  return r;
}

// ---- tower maps -----------------------------------------------------------

namespace {

// Substitute u -> u^p: degree a becomes p*a.  Degrees that land at or beyond
// the target cutoff are dropped, shrinking the window to the cutoff.
TowerElement spread_indices(const TowerElement& a, long new_level) {
  const long p = a.ctx->p;
  const long cut = a.ctx->cutoff(new_level);
  TowerElement r = TowerElement::zero(*a.ctx, new_level, a.tag);
  r.scale = a.scale;
  r.kappa = a.kappa;
  if (a.udeg >= kFullDegree)
    r.udeg = kFullDegree;
  else
    r.udeg = (a.udeg > cut / p) ? cut : std::min(p * a.udeg, cut);
  long top = a.deg_stored();
  if (top >= 0 && top > (cut - 1) / p) {
    r.udeg = std::min(r.udeg, cut);  // nonzero coefficients fell off the window
    top = (cut - 1) / p;
  }
  long keep = top < 0 ? 0 : p * top + 1;
  r.c.assign(static_cast<size_t>(keep), mpz_class(0));
  for (long i = 0; i <= top; ++i) {
    if (i < static_cast<long>(a.c.size()) && a.c[static_cast<size_t>(i)] != 0)
      r.c[static_cast<size_t>(p * i)] = a.c[static_cast<size_t>(i)];
  }
  r.normalize();
  return r;
}

}  // namespace

TowerElement include_up(const TowerElement& a) {
  if (a.level + 1 > a.ctx->depth)
    fail(Err::DepthExceeded, "include_up beyond configured depth");
  return spread_indices(a, a.level + 1);
}

TowerElement frobenius_self(const TowerElement& a) { return spread_indices(a, a.level); }

TowerElement frobenius_down(const TowerElement& a) {
  if (a.level < 1) fail(Err::DepthExceeded, "frobenius_down at level 0");
  TowerElement r = a;
  r.level = a.level - 1;
  long cut = a.ctx->cutoff(r.level);
  if (r.deg_stored() >= cut) {
    r.c.resize(static_cast<size_t>(cut));
    r.udeg = std::min(r.udeg, cut);
  }
  r.normalize();
  return r;
}

TowerElement frobenius_inverse(const TowerElement& a) {
  if (a.level + 1 > a.ctx->depth)
    fail(Err::DepthExceeded, "frobenius_inverse beyond configured depth");
  TowerElement r = a;
  r.certify_integral();
  r.level = a.level + 1;
  r.normalize();
  return r;
}

// ---- comparison -----------------------------------------------------------

EqualityReport equality_report(const TowerElement& a, const TowerElement& b) {
  TowerElement d = sub(a, b);
  EqualityReport rep;
  rep.udeg = d.udeg;
  long minval = kExactDigits;
  long bad = -1;
  for (size_t i = 0; i < d.c.size(); ++i) {
    if (d.c[i] == 0) continue;
    long v = int_valuation(d.c[i], d.ctx->p) - d.scale;
    if (v < minval) {
      minval = v;
      bad = static_cast<long>(i);
    }
  }
  rep.digits = std::min(d.kappa, minval);
  rep.first_bad_degree = (minval < d.kappa) ? bad : -1;
  return rep;
}

// ---- kernels --------------------------------------------------------------

void conv_truncated_serial(const std::vector<mpz_class>& a, const std::vector<mpz_class>& b,
                           std::vector<mpz_class>& out, long outlen) {
  out.assign(static_cast<size_t>(std::max<long>(outlen, 0)), mpz_class(0));
  if (outlen <= 0) return;
  const long na = static_cast<long>(a.size()), nb = static_cast<long>(b.size());
  for (long i = 0; i < na && i < outlen; ++i) {
    if (a[static_cast<size_t>(i)] == 0) continue;
    const long jmax = std::min(nb, outlen - i);
    for (long j = 0; j < jmax; ++j) {
      if (b[static_cast<size_t>(j)] == 0) continue;
      mpz_addmul(out[static_cast<size_t>(i + j)].get_mpz_t(),
                 a[static_cast<size_t>(i)].get_mpz_t(), b[static_cast<size_t>(j)].get_mpz_t());
    }
  }
}

void conv_truncated_parallel(const std::vector<mpz_class>& a, const std::vector<mpz_class>& b,
                             std::vector<mpz_class>& out, long outlen) {
  out.assign(static_cast<size_t>(std::max<long>(outlen, 0)), mpz_class(0));
  if (outlen <= 0) return;
  const long na = static_cast<long>(a.size()), nb = static_cast<long>(b.size());
#pragma omp parallel for schedule(static)
  for (long k = 0; k < outlen; ++k) {
    mpz_ptr acc = out[static_cast<size_t>(k)].get_mpz_t();
    const long ilo = std::max<long>(0, k - nb + 1);
    const long ihi = std::min(na - 1, k);
    for (long i = ilo; i <= ihi; ++i) {
      if (a[static_cast<size_t>(i)] == 0) continue;
      mpz_addmul(acc, a[static_cast<size_t>(i)].get_mpz_t(),
                 b[static_cast<size_t>(k - i)].get_mpz_t());
    }
  }
}

namespace {
std::atomic<bool> g_parallel{
#ifdef _OPENMP
    true
#else
    false
#endif
};
}  // namespace

bool parallel_kernels_enabled() { return g_parallel.load(std::memory_order_relaxed); }
void set_parallel_kernels(bool on) { g_parallel.store(on, std::memory_order_relaxed); }

}  // namespace bkt
