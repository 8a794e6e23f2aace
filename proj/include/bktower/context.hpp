#pragma once

#include <gmpxx.h>

#include <string>
#include <vector>

namespace bkt {

/// Shared configuration for one computation: the prime, the Eisenstein
/// polynomial E(u) of degree e cutting out the base field, and the precision
/// window sizes.
///
/// All ring elements carry a pointer to one of these.  Windows:
///   - N    nominal number of p-adic digits carried by reduced computations,
///   - M    u-adic degree window at tower level 0; level n sees M * p^n,
///   - depth  largest tower level n that may be materialised.
class PrecisionContext {
 public:
  long p = 0;
  long e = 0;
  long N = 0;
  long M = 0;
  long depth = 0;

  /// Coefficients of E(u), ascending degree, length e + 1.  Monic with
  /// constant term exactly p and all lower coefficients divisible by p.
  std::vector<mpz_class> E;

  PrecisionContext() = default;
  PrecisionContext(long p_, long e_, long N_, long M_, long depth_,
                   std::vector<mpz_class> E_ = {});

  /// E(u) = u^e + p, the default choice when no polynomial is supplied.
  static std::vector<mpz_class> default_eisenstein(long p, long e);

  /// Throws Err::ConfigInvalid when any invariant fails.
  void validate() const;

  /// u-degree cutoff at tower level n (coefficients of degree >= cutoff are
  /// never stored).
  long cutoff(long level) const;

  /// Divided powers gamma_j(E) with j >= jmax() vanish inside the window:
  /// every term of gamma_j(E) of u-degree < M has valuation >= N.
  long jmax() const;

  /// Upper bound on the p-power denominators that may legitimately appear;
  /// covers products of two maximal divided-power tails plus division slack.
  long denominator_budget() const;

  mpz_class p_pow(long k) const;

  bool operator==(const PrecisionContext& o) const;

  std::string describe() const;
};

}  // namespace bkt
