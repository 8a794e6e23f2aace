#pragma once

#include <gmpxx.h>

#include <limits>
#include <string>
#include <vector>

namespace bkt {

/// Sentinel for "known exactly" in p-adic digit counts.  Kept well below
/// LONG_MAX so sums of two precision values never overflow.
inline constexpr long kExactDigits = std::numeric_limits<long>::max() / 4;

/// Digit sum s_p(n) of n >= 0 in base p.
long digit_sum(long n, long p);

/// v_p(n!) = (n - s_p(n)) / (p - 1)  (Legendre).
long legendre_valuation(long n, long p);

/// v_p of an arbitrary nonzero integer.
long int_valuation(const mpz_class& n, long p);

/// b(i) = ceil(i * (p-2) / (p-1)): the filtration level that survives one
/// Frobenius-twist decomposition of a divided-power tail of level i.
long contraction_bound(long i, long p);

/// v_p( p^k / ((j-k)! k!) ) for 0 <= k <= j: the coefficient valuation of the
/// k-th term in the Frobenius expansion of gamma_j(E).  Nonnegative exactly
/// when k >= j/(p-1).
long pd_term_valuation(long j, long k, long p);

enum class ContractionKind {
  Plain,           // i_0 = p,  i_n = p * b(i_{n-1})
  HeightAdjusted,  // j_1 = p,  j_n = p * b(j_{n-1}) - r   (requires 0 <= r < p-1)
};

/// First `count` terms of the chosen contraction sequence.  Both sequences are
/// strictly increasing for 0 <= r < p-1; overflow raises Err::DepthExceeded.
std::vector<long> contraction_sequence(ContractionKind kind, long p, long r, long count);

/// One p-adic number at finite precision: value = p^val * unit with the unit
/// known modulo p^digits.  The valuation is exact, never a lower bound; an
/// element that is "zero as far as the window can see" is stored as a zero
/// with an absolute precision floor instead.
class PadicCoeff {
 public:
  /// Exact zero.
  static PadicCoeff zero(long p);
  /// Zero to absolute precision abs: the value has valuation >= abs.
  static PadicCoeff fuzzy_zero(long p, long abs);
  /// Nonzero with exact valuation and unit known mod p^digits.
  static PadicCoeff make(long p, long val, mpz_class unit, long digits);
  /// Exact rational a/b (b not divisible by... any b != 0; p-part extracted),
  /// truncated to `digits` unit digits.
  static PadicCoeff from_rational(long p, const mpq_class& q, long digits);
  static PadicCoeff from_integer(long p, const mpz_class& n, long digits);

  bool is_zero() const { return zero_; }
  long prime() const { return p_; }
  /// Exact valuation; only valid when !is_zero().
  long valuation() const;
  /// Trusted unit digits; for zeros this is kExactDigits (exact) or 0.
  long known_digits() const { return digits_; }
  /// Unit representative in [0, p^digits); only valid when !is_zero().
  const mpz_class& unit() const;
  /// val + digits for nonzero, the precision floor for fuzzy zeros,
  /// kExactDigits for the exact zero.
  long abs_precision() const;

  PadicCoeff mul(const PadicCoeff& o) const;
  PadicCoeff add(const PadicCoeff& o) const;
  PadicCoeff neg() const;
  PadicCoeff sub(const PadicCoeff& o) const { return add(o.neg()); }
  /// Multiplicative inverse; Err::PrecisionExhausted on (fuzzy) zeros.
  PadicCoeff inv() const;

  /// True when this window is consistent with the exact rational q: the two
  /// agree modulo p^min(abs_precision, abs_precision(q at same digits)).
  bool consistent_with(const mpq_class& q) const;

  std::string str() const;

 private:
  long p_ = 0;
  bool zero_ = true;
  long val_ = 0;      // exact valuation (nonzero case)
  long digits_ = 0;   // unit digits (nonzero) or abs floor semantics (zero)
  mpz_class unit_;    // in [0, p^digits_)
};

}  // namespace bkt
