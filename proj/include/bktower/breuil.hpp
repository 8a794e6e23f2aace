#pragma once

#include "bktower/bk_module.hpp"

namespace bkt {

/// The same (A, B) presentation with divided-power-ring semantics:
///   module = free rank d over S,
///   Fil^r = column span of A over S + (Fil^p S)^d,
///   divided Frobenius phi_r(A*x + y) = c0^r * phi(x) + p^{-r} * phi(B*y).
struct BreuilModule {
  FilteredBkModule base;

  const PrecisionContext& ctx() const { return base.ctx(); }
  long d() const { return base.d; }
  long r() const { return base.r; }
};

BreuilModule base_change(const FilteredBkModule& m);

/// Divided-power integrality certificate: every canonical-form digit d_j
/// satisfies val(d_j) >= -v_p(j!) on the visible window.
struct SMembership {
  bool ok = false;          // no certified violation
  bool complete = false;    // the whole element was consumed by the form
  long first_bad_digit = -1;
  long digits_checked = 0;
};
SMembership certify_in_S(const TowerElement& x);

struct BreuilFilWitness {
  bool ok = false;          // low digits of B*v certified vanishing up to r
  bool certified = true;    // false when a window closed before deciding
  ZeroWindow low_window;    // certified vanishing window of the low slots
  SMat x;                   // integral-slot part: v = A*x + y
  SMat y;
  std::vector<FilBound> transporter_fil;  // fil degree of each coordinate of B*y
  bool y_coordinate_certified = false;    // direct fil_degree(y_k) >= p for all k
};

/// Membership of v in Fil^r = A*S^d + (Fil^p S)^d, decided through the
/// canonical-form digits of B*v.  The returned y is always certified through
/// the transporter B*y (its digits below p cancel by construction); the
/// coordinate-wise certificate can be weaker and is reported separately.
BreuilFilWitness fil_r_membership(const BreuilModule& m, const SMat& v);

/// Fil^i for 0 <= i <= r: membership of E^{r-i} * v in Fil^r.
BreuilFilWitness fil_i_membership(const BreuilModule& m, const SMat& v, long i);

enum class PhiMode { Full, Divided };

/// Full Frobenius v |-> phi(B*v); Divided additionally divides by p^r after
/// checking Fil^r membership (equal to c0^r*phi(x) + p^{-r}*phi(B*y)).
SMat apply_phi_breuil(const BreuilModule& m, const SMat& v, PhiMode mode);

}  // namespace bkt
