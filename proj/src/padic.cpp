#include "bktower/padic.hpp"

#include <sstream>

#include "bktower/errors.hpp"

namespace bkt {

namespace {

mpz_class pow_p(long p, long k) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(k));
  return r;
}

mpz_class mod_pk(const mpz_class& a, long p, long k) {
  mpz_class m = pow_p(p, k), r;
  mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
  return r;
}

long cap_prec(long a) { return a > kExactDigits ? kExactDigits : a; }

}  // namespace

long digit_sum(long n, long p) {
  if (n < 0) fail(Err::ConfigInvalid, "digit_sum of negative n");
  long s = 0;
  while (n > 0) {
    s += n % p;
    n /= p;
  }
  return s;
}

long legendre_valuation(long n, long p) {
  if (n < 0) fail(Err::ConfigInvalid, "legendre_valuation of negative n");
  return (n - digit_sum(n, p)) / (p - 1);
}

long int_valuation(const mpz_class& n, long p) {
  if (n == 0) fail(Err::ConfigInvalid, "valuation of zero integer");
  mpz_class rest, pz = p;
  return static_cast<long>(
      mpz_remove(rest.get_mpz_t(), n.get_mpz_t(), pz.get_mpz_t()));
}

long contraction_bound(long i, long p) {
  if (i < 0) fail(Err::ConfigInvalid, "contraction_bound of negative i");
  // ceil(i (p-2) / (p-1)) without overflow for the ranges we admit.
  if (i > (std::numeric_limits<long>::max() - p) / p)
    fail(Err::DepthExceeded, "contraction_bound overflow");
  return (i * (p - 2) + (p - 2)) / (p - 1);
}

long pd_term_valuation(long j, long k, long p) {
  if (k < 0 || k > j) fail(Err::ConfigInvalid, "pd_term_valuation needs 0 <= k <= j");
  return k - legendre_valuation(j - k, p) - legendre_valuation(k, p);
}

std::vector<long> contraction_sequence(ContractionKind kind, long p, long r, long count) {
  if (r < 0 || r >= p - 1)
    fail(Err::HeightTooLarge, "contraction sequences need 0 <= r < p-1, got r=" +
                                  std::to_string(r) + " p=" + std::to_string(p));
  if (count < 0 || count > 64) fail(Err::ConfigInvalid, "contraction sequence count out of range");
  std::vector<long> out;
  out.reserve(static_cast<size_t>(count));
  long cur = p;
  for (long t = 0; t < count; ++t) {
    out.push_back(cur);
    long b = contraction_bound(cur, p);
    if (b > std::numeric_limits<long>::max() / p - 1)
      fail(Err::DepthExceeded, "contraction sequence overflow");
    cur = p * b - (kind == ContractionKind::HeightAdjusted ? r : 0);
  }
  return out;
}

PadicCoeff PadicCoeff::zero(long p) {
  PadicCoeff c;
  c.p_ = p;
  c.zero_ = true;
  c.digits_ = kExactDigits;
  return c;
}

PadicCoeff PadicCoeff::fuzzy_zero(long p, long abs) {
  PadicCoeff c;
  c.p_ = p;
  c.zero_ = true;
  c.digits_ = cap_prec(abs);
  return c;
}

PadicCoeff PadicCoeff::make(long p, long val, mpz_class unit, long digits) {
  if (digits <= 0) return fuzzy_zero(p, val);
  PadicCoeff c;
  c.p_ = p;
  c.zero_ = false;
  c.val_ = val;
  c.digits_ = digits;
  c.unit_ = digits >= kExactDigits ? unit : mod_pk(unit, p, digits);
  if (c.unit_ % p == 0)
    fail(Err::ConfigInvalid, "PadicCoeff unit part divisible by p");
  return c;
}

PadicCoeff PadicCoeff::from_integer(long p, const mpz_class& n, long digits) {
  if (n == 0) return zero(p);
  long v = int_valuation(n, p);
  mpz_class u = n / pow_p(p, v);
  return make(p, v, u, digits);
}

PadicCoeff PadicCoeff::from_rational(long p, const mpq_class& q, long digits) {
  if (q == 0) return zero(p);
  const mpz_class& num = q.get_num();
  const mpz_class& den = q.get_den();
  long vn = int_valuation(num, p);
  long vd = int_valuation(den, p);
  mpz_class un = num / pow_p(p, vn);
  mpz_class ud = den / pow_p(p, vd);
  if (digits >= kExactDigits) {
    if (ud != 1 && ud != -1)
      fail(Err::PrecisionExhausted,
           "exact p-adic image of rational with non-p denominator needs a digit budget");
    return make(p, vn - vd, ud == -1 ? mpz_class(-un) : un, kExactDigits);
  }
  mpz_class inv;
  mpz_class m = pow_p(p, digits);
  if (!mpz_invert(inv.get_mpz_t(), ud.get_mpz_t(), m.get_mpz_t()))
    fail(Err::ConfigInvalid, "denominator not invertible");
  return make(p, vn - vd, un * inv, digits);
}

long PadicCoeff::valuation() const {
  if (zero_) fail(Err::PrecisionExhausted, "valuation of zero window");
  return val_;
}

const mpz_class& PadicCoeff::unit() const {
  if (zero_) fail(Err::PrecisionExhausted, "unit of zero window");
  return unit_;
}

long PadicCoeff::abs_precision() const {
  if (zero_) return digits_;
  return cap_prec(val_ + digits_);
}

PadicCoeff PadicCoeff::mul(const PadicCoeff& o) const {
  if (zero_ || o.zero_) {
    // An exact zero absorbs everything; fuzzy zeros add valuation floors.
    if ((zero_ && digits_ >= kExactDigits) || (o.zero_ && o.digits_ >= kExactDigits))
      return zero(p_);
    long floor1 = zero_ ? digits_ : val_;
    long floor2 = o.zero_ ? o.digits_ : o.val_;
    return fuzzy_zero(p_, cap_prec(floor1 + floor2));
  }
  long digits = std::min(digits_, o.digits_);
  return make(p_, val_ + o.val_, unit_ * o.unit_, digits);
}

PadicCoeff PadicCoeff::neg() const {
  if (zero_) return *this;
  PadicCoeff c = *this;
  if (digits_ >= kExactDigits)
    c.unit_ = -unit_;
  else
    c.unit_ = mod_pk(-unit_, p_, digits_);
  return c;
}

PadicCoeff PadicCoeff::add(const PadicCoeff& o) const {
  if (zero_ && digits_ >= kExactDigits) return o;
  if (o.zero_ && o.digits_ >= kExactDigits) return *this;
  long abs = std::min(abs_precision(), o.abs_precision());
  if (zero_ || o.zero_) {
    const PadicCoeff& nz = zero_ ? o : *this;
    if (nz.val_ >= abs) return fuzzy_zero(p_, abs);
    // The nonzero summand dominates the fuzzy floor of the other.
    return make(p_, nz.val_, nz.unit_, abs - nz.val_);
  }
  long v = std::min(val_, o.val_);
  if (abs <= v) return fuzzy_zero(p_, abs);
  bool exact = digits_ >= kExactDigits && o.digits_ >= kExactDigits;
  mpz_class t;
  if (exact) {
    t = unit_ * pow_p(p_, val_ - v) + o.unit_ * pow_p(p_, o.val_ - v);
    if (t == 0) return zero(p_);
    long c = int_valuation(t, p_);
    return make(p_, v + c, t / pow_p(p_, c), kExactDigits);
  }
  long d = abs - v;  // digits available at valuation v
  t = mod_pk(unit_ * pow_p(p_, val_ - v) + o.unit_ * pow_p(p_, o.val_ - v), p_, d);
  if (t == 0) return fuzzy_zero(p_, abs);
  long c = int_valuation(t, p_);
  return make(p_, v + c, t / pow_p(p_, c), d - c);
}

PadicCoeff PadicCoeff::inv() const {
  if (zero_) fail(Err::PrecisionExhausted, "inverse of a zero window");
  if (digits_ >= kExactDigits) {
    if (unit_ == 1 || unit_ == -1) return make(p_, -val_, unit_, kExactDigits);
    fail(Err::PrecisionExhausted, "exact inverse only defined for units +-1; reduce first");
  }
  mpz_class inv;
  mpz_class m = pow_p(p_, digits_);
  if (!mpz_invert(inv.get_mpz_t(), unit_.get_mpz_t(), m.get_mpz_t()))
    fail(Err::ConfigInvalid, "unit not invertible");
  return make(p_, -val_, inv, digits_);
}

bool PadicCoeff::consistent_with(const mpq_class& q) const {
  long abs = abs_precision();
  if (q == 0) return zero_ || val_ >= abs;  // nonzero with val < abs contradicts 0
  long vq = int_valuation(q.get_num(), p_) - int_valuation(q.get_den(), p_);
  if (zero_) return abs < kExactDigits && vq >= abs;
  if (val_ != vq) return false;
  if (digits_ >= kExactDigits) {
    // Exact window: demand literal equality p^val * unit == q.
    mpq_class mine(unit_);
    if (val_ >= 0)
      mine *= pow_p(p_, val_);
    else
      mine /= pow_p(p_, -val_);
    return mine == q;
  }
  mpz_class un = q.get_num() / pow_p(p_, int_valuation(q.get_num(), p_));
  mpz_class ud = q.get_den() / pow_p(p_, int_valuation(q.get_den(), p_));
  mpz_class inv, m = pow_p(p_, digits_);
  if (!mpz_invert(inv.get_mpz_t(), ud.get_mpz_t(), m.get_mpz_t())) return false;
  return mod_pk(unit_ - un * inv, p_, digits_) == 0;
}

std::string PadicCoeff::str() const {
  std::ostringstream os;
  if (zero_) {
    if (digits_ >= kExactDigits)
      os << "0";
    else
      os << "O(" << p_ << "^" << digits_ << ")";
    return os.str();
  }
  os << p_ << "^" << val_ << "*" << unit_.get_str();
  if (digits_ < kExactDigits) os << "~" << digits_;
  return os.str();
}

}  // namespace bkt
