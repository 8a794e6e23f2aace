#pragma once

#include <functional>
#include <vector>

#include "bktower/rng.hpp"
#include "bktower/series.hpp"

namespace bkt {

/// Dense matrix (or column vector) of tower elements, all at one level.
struct SMat {
  long rows = 0, cols = 0;
  std::vector<TowerElement> a;  // row-major

  TowerElement& at(long r, long c) { return a[static_cast<size_t>(r * cols + c)]; }
  const TowerElement& at(long r, long c) const { return a[static_cast<size_t>(r * cols + c)]; }

  static SMat zeros(const PrecisionContext& ctx, long level, long rows, long cols,
                    RingTag tag = RingTag::FrakS);
  static SMat identity(const PrecisionContext& ctx, long level, long d,
                       RingTag tag = RingTag::FrakS);
  /// Standard basis column vector delta_i.
  static SMat basis_column(const PrecisionContext& ctx, long level, long d, long i,
                           RingTag tag = RingTag::FrakS);

  long level() const;
  const PrecisionContext& ctx() const;
  bool is_square() const { return rows == cols; }
};

SMat mat_add(const SMat& x, const SMat& y);
SMat mat_sub(const SMat& x, const SMat& y);
SMat mat_mul(const SMat& x, const SMat& y);
SMat mat_scale(const SMat& x, const TowerElement& s);
SMat mat_scale_int(const SMat& x, const mpz_class& z);
SMat mat_map(const SMat& x, const std::function<TowerElement(const TowerElement&)>& f);

SMat mat_include_up(const SMat& x);
SMat mat_frobenius_down(const SMat& x);
SMat mat_frobenius_self(const SMat& x);
SMat mat_frobenius_inverse(const SMat& x);

/// Aggregate comparison: worst certified agreement over all entries.
EqualityReport mat_equality(const SMat& x, const SMat& y);
/// Worst certified vanishing window over all entries.
ZeroWindow mat_zero_window(const SMat& x);

/// Determinant by cofactor expansion (d <= 4 is all we need).
TowerElement mat_det(const SMat& x);
/// Adjugate matrix: x * adj(x) = det(x) * I.
SMat mat_adjugate(const SMat& x);

/// Random unimodular matrix over W[[u]]: product of a lower and an upper
/// unitriangular matrix (polynomial entries, degree <= max_deg) and a
/// permutation.  `inv` receives the exact inverse.
SMat random_unimodular(const PrecisionContext& ctx, long d, long max_deg, Rng& rng, SMat* inv);

std::string mat_str(const SMat& x);

}  // namespace bkt
