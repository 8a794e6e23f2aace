#pragma once

#include <vector>

#include "bktower/series.hpp"

namespace bkt {

// ---- distinguished elements ----------------------------------------------
//
// Level n of the tower carries the Eisenstein generator E_n = E(u_n^{p^n}),
// whose divided powers gamma_j(E_n) = E_n^j / j! span the filtration.

/// E(u_n^{p^n}) at tower level n (degree e * p^n).
TowerElement eisenstein_level(const PrecisionContext& ctx, long level);

/// Frobenius image of E at level 0: E(u^p), of degree e*p.
TowerElement eisenstein_frobenius(const PrecisionContext& ctx);

/// z_n = E(u_0) E(u_1) ... E(u_{n-1}) viewed in level n; z_0 = 1.
/// Satisfies  frobenius(z_{n+1}) = E(u^p) * z_n  and  z_n = u_n^{e p (p^n-1)/(p-1)}
/// modulo p.
TowerElement z_element(const PrecisionContext& ctx, long level);

/// c_0 = E(u^p)/p, a unit of the divided-power ring at level 0.
TowerElement c0_unit(const PrecisionContext& ctx);

/// v = (E(u^p) - E(u)^p)/p, a unit of W[[u]] (constant term 1 - p^{p-1}).
TowerElement v_unit(const PrecisionContext& ctx);

/// lambda = prod_{n >= 0} phi^n(c_0), truncated once factors are congruent to
/// 1 inside the degree window.  Satisfies c_0 * phi(lambda) = lambda.
TowerElement lambda_unit(const PrecisionContext& ctx);

// ---- Weierstrass division -------------------------------------------------

struct DivisionResult {
  TowerElement quotient;   // x = quotient * E_n^m + remainder
  TowerElement remainder;  // sum over rounds of rho_t * E_n^t, deg rho_t < e p^n
  bool certified;          // remainder vanishes within x's whole window
};

/// Division by E_n^m (m >= 0) with window bookkeeping.  `certified` means the
/// element is divisible as far as the window can tell; when the input window
/// is exact/full this is a proof of divisibility in the ring.
DivisionResult weierstrass_divide(const TowerElement& x, long m);

// ---- divided-power canonical form ----------------------------------------

/// x = sum_j digit[j] * E_n^j with deg digit[j] < e p^n.  The divided-power
/// coefficient of gamma_j is a_j = j! * digit[j]; x lies in the level-n
/// divided-power ring iff every a_j is p-integral.
struct PDForm {
  long level = 0;
  long base_degree = 0;            // e * p^level
  std::vector<TowerElement> digit;
  TowerElement tail;               // remaining quotient beyond the last digit
  bool complete = false;           // tail is stored-zero
};

/// Compute digits up to max_digits (default: ctx->jmax()).
PDForm pd_canonical_form(const TowerElement& x, long max_digits = -1);

/// a_j = j! * digit[j].
TowerElement pd_gamma_coefficient(const PDForm& form, long j);

/// Rebuild sum_{j < limit} digit[j] * E_n^j (limit < 0: all digits).
TowerElement pd_reconstruct(const PDForm& form, long limit = -1);

// ---- filtration -----------------------------------------------------------

struct FilBound {
  long bound = 0;        // filtration degree >= bound
  bool exact = false;    // digit at `bound` is certifiably nonzero
  long digits = 0;       // p-adic depth of the certification
  long max_checked = 0;  // digit indices < max_checked were examined
};

/// Least j with a certifiably nonzero divided-power digit; when every digit
/// the window can see vanishes, returns bound = max_checked with exact=false.
FilBound fil_degree(const TowerElement& x, long query_limit = -1);

/// x = integral + fil_part with integral ∈ W[[u_n]] (digits j < p folded into
/// a power series) and fil_part of filtration >= p.
struct IntegralFilSplit {
  TowerElement integral;
  TowerElement fil_part;
  bool integral_certified = false;  // low digits were p-integral
};
IntegralFilSplit integral_fil_split(const TowerElement& x);

/// Frobenius-twist decomposition: for x ∈ S_n of filtration >= i,
///
///   phi(x) = integral + fil_part,   integral ∈ W[[u_{n-1}]],
///   fil_part ∈ Fil^{p b(i)} S_{n-1},
///
/// obtained from gamma_j(phi(E_n)) = sum_k p^k/((j-k)! k!) E^{p(j-k)} v^k by
/// routing the p-integral terms (k >= j/(p-1)) into `integral`.
struct FrobeniusFilSplit {
  TowerElement integral;
  TowerElement fil_part;
  long fil_target = 0;    // p * contraction_bound(i)
  long fil_realized = 0;  // certified filtration bound of fil_part
  bool ok = false;        // no certified violation within the window
};
FrobeniusFilSplit frobenius_fil_split(const TowerElement& x, long i,
                                      long working_digits = -1);

}  // namespace bkt
