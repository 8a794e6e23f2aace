#pragma once

#include <gmpxx.h>

#include <vector>

#include "bktower/context.hpp"
#include "bktower/padic.hpp"

namespace bkt {

/// Subring certification for tower elements:
///   FrakS  W[[u_n]]           (integral power series)
///   S      divided-power completion (p-power denominators bounded by the
///          divided-power budget)
///   FracS  S[1/p]             (no integrality promise)
enum class RingTag { FrakS, S, FracS };

const char* tag_name(RingTag t);
RingTag tag_join(RingTag a, RingTag b);

/// Sentinel u-degree window meaning "all degrees known" (a true polynomial
/// that has never been truncated).
inline constexpr long kFullDegree = std::numeric_limits<long>::max() / 4;

/// Outcome of comparing two elements on the meet of their windows.
struct EqualityReport {
  long digits = 0;            // the two sides agree to this p-adic depth ...
  long udeg = 0;              // ... on all degrees < udeg
  long first_bad_degree = -1; // lowest degree certified to differ at depth `digits`
  bool mismatch() const { return first_bad_degree >= 0; }
  bool equal_within(long digits_needed, long udeg_needed) const {
    return digits >= digits_needed && udeg >= udeg_needed;
  }
};

/// Certified vanishing window of a single element.
struct ZeroWindow {
  long digits = 0;  // coefficients vanish to this p-adic depth ...
  long udeg = 0;    // ... for all degrees < udeg
  bool covers(long digits_needed, long udeg_needed) const {
    return digits >= digits_needed && udeg >= udeg_needed;
  }
};

/// One element of a tower ring at a fixed level n:
///
///   value = p^{-scale} * sum_a  c[a] * u_n^a
///
/// with two precision windows attached:
///   kappa  every coefficient value is trusted to absolute p-adic precision
///          kappa (kExactDigits = exact integers/p-powers),
///   udeg   coefficients are trusted for degrees < udeg (kFullDegree = the
///          element is a complete polynomial).
/// Stored degrees never reach ctx->cutoff(level); arithmetic that would
/// produce higher degrees truncates and shrinks udeg accordingly.
class TowerElement {
 public:
  const PrecisionContext* ctx = nullptr;
  long level = 0;
  RingTag tag = RingTag::FrakS;
  long scale = 0;   // p-power denominator exponent, >= 0
  long kappa = kExactDigits;
  long udeg = kFullDegree;
  std::vector<mpz_class> c;

  TowerElement() = default;

  static TowerElement zero(const PrecisionContext& ctx, long level,
                           RingTag tag = RingTag::FrakS);
  static TowerElement constant(const PrecisionContext& ctx, long level, mpz_class v,
                               RingTag tag = RingTag::FrakS);
  static TowerElement monomial(const PrecisionContext& ctx, long level, long deg,
                               mpz_class v, RingTag tag = RingTag::FrakS);
  static TowerElement from_coeffs(const PrecisionContext& ctx, long level,
                                  std::vector<mpz_class> coeffs,
                                  RingTag tag = RingTag::FrakS, long scale = 0);

  /// True when no stored coefficient is nonzero (the value may still be a
  /// nonzero element hidden beyond the window; consult zero_window()).
  bool stored_zero() const;
  /// Lowest stored degree with nonzero coefficient; udeg when none.
  long ord() const;
  /// Highest stored degree with nonzero coefficient; -1 when none.
  long deg_stored() const;

  /// Exact rational value of coefficient a under the stored representative.
  mpq_class coeff_rational(long a) const;
  /// p-adic window view of coefficient a.
  PadicCoeff coeff_padic(long a) const;

  /// Minimum valuation of stored coefficients (value semantics: v_p(c)-scale);
  /// kExactDigits when all stored coefficients vanish.
  long min_valuation() const;

  /// Certified vanishing window of this element.
  ZeroWindow zero_window() const;

  /// Canonicalise: reduce coefficients mod p^{kappa+scale} (finite kappa),
  /// strip common p-powers out of scale, trim trailing zeros, enforce the
  /// degree cutoff and the denominator budget.
  void normalize();

  /// Weaken the p-adic window to at most k digits.
  void reduce_kappa(long k);

  /// Throws Err::NotIntegral unless every coefficient is integral within the
  /// window; on success retags to FrakS.
  void certify_integral();

  std::string str(long max_terms = 8) const;
};

// ---- arithmetic (all results are normalised) ------------------------------

TowerElement add(const TowerElement& a, const TowerElement& b);
TowerElement sub(const TowerElement& a, const TowerElement& b);
TowerElement neg(const TowerElement& a);
TowerElement mul(const TowerElement& a, const TowerElement& b);
/// a * u^k
TowerElement shift(const TowerElement& a, long k);
/// a * z for integer z
TowerElement mul_int(const TowerElement& a, const mpz_class& z);
/// a * p^k (k may be negative: divides, increasing scale)
TowerElement mul_pk(const TowerElement& a, long k);
/// a * q for rational q; a non-p-part in the denominator requires finite kappa.
TowerElement mul_rational(const TowerElement& a, const mpq_class& q);
/// a^k with truncation, k >= 0.
TowerElement power(const TowerElement& a, long k);

/// Inverse of a unit (constant coefficient of valuation 0).  The result
/// carries kappa = min(a.kappa, digits) since unit inverses are genuinely
/// windowed objects.
TowerElement invert_unit(const TowerElement& a, long digits);

/// Divide by p on the largest degree prefix where that is exact: returns a/p
/// truncated to degrees < exact_below, where exact_below is the lowest stored
/// degree whose coefficient is not divisible by p (kFullDegree when all are).
TowerElement divide_p_certified(const TowerElement& a, long& exact_below);

/// Forget all coefficients at u-degree >= window: the result carries
/// udeg = min(a.udeg, window).  Comparisons on the truncation make claims
/// about the retained degrees only.
TowerElement truncate_window(const TowerElement& a, long window);

// ---- tower maps -----------------------------------------------------------

/// S_n -> S_{n+1}, u_n = u_{n+1}^p: degree a becomes degree p*a.
TowerElement include_up(const TowerElement& a);
/// Frobenius S_n -> S_{n-1} (n >= 1): pure reindexing u_n-degree a to
/// u_{n-1}-degree a.
TowerElement frobenius_down(const TowerElement& a);
/// Frobenius as a self-map of level n: u_n -> u_n^p.
TowerElement frobenius_self(const TowerElement& a);
/// Frobenius inverse W[[u_n]] -> W[[u_{n+1}]]; requires a certified-integral
/// element (the inverse does not preserve the divided-power ring).
TowerElement frobenius_inverse(const TowerElement& a);

// ---- comparison -----------------------------------------------------------

EqualityReport equality_report(const TowerElement& a, const TowerElement& b);

// ---- kernels --------------------------------------------------------------

/// Truncated convolution out[k] = sum_{i+j=k} a[i] b[j] for k < outlen.
/// The parallel variant distributes output coefficients across OpenMP threads
/// and produces bit-identical results to the serial reference.
void conv_truncated_serial(const std::vector<mpz_class>& a, const std::vector<mpz_class>& b,
                           std::vector<mpz_class>& out, long outlen);
void conv_truncated_parallel(const std::vector<mpz_class>& a, const std::vector<mpz_class>& b,
                             std::vector<mpz_class>& out, long outlen);

/// Process-wide switch consulted by mul(); defaults to on when OpenMP is
/// compiled in and more than one thread is available.
bool parallel_kernels_enabled();
void set_parallel_kernels(bool on);

}  // namespace bkt
