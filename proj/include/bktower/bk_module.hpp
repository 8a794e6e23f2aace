#pragma once

#include "bktower/smatrix.hpp"
#include "bktower/tower_ops.hpp"

namespace bkt {

/// Height-r filtered module over the level-0 power-series ring, presented by a
/// pair of d x d matrices with A*B = B*A = E^r * I.  Semantics:
///   M = free rank-d module on e_1..e_d,
///   Fil^r M = column span of A (alpha_i = (e)*A column i),
///   divided Frobenius phi_r(alpha_i) = e_i, full Frobenius matrix phi(B).
struct FilteredBkModule {
  const PrecisionContext* ctx_ = nullptr;
  long d = 0;
  long r = 0;
  SMat A, B;

  const PrecisionContext& ctx() const;
};

/// Classical presentation: single Frobenius matrix C of height <= r
/// (E^r * C^{-1} integral).
struct ClassicalBkModule {
  const PrecisionContext* ctx_ = nullptr;
  long d = 0;
  long r = 0;
  SMat C;

  const PrecisionContext& ctx() const;
};

struct ModuleValidation {
  bool ok = false;
  std::string detail;      // empty when ok
  EqualityReport ab, ba;   // agreement of A*B and B*A with E^r * I
  bool det_unit = false;   // det(A) nonzero mod p
};

ModuleValidation validate(const FilteredBkModule& m);
void validate_or_throw(const FilteredBkModule& m);

ClassicalBkModule filtered_to_classical(const FilteredBkModule& m);
/// A := E^r * C^{-1} via adjugate; throws HeightTooLarge when some entry of
/// E^r * adj(C) / det(C) is certified non-integral.
FilteredBkModule classical_to_filtered(const ClassicalBkModule& m);

struct FilWitness {
  bool ok = false;          // all coordinates certified divisible
  bool certified = true;    // false when a window closed before deciding
  SMat x;                   // witness: B*v = E^i * x, so E^{r-i} * v = A * x
};

/// Membership of (e)*v in Fil^i M: every coordinate of B*v divisible by E^i.
/// v is a d x 1 vector at any tower level (matrices are included up to match).
FilWitness fil_membership(const FilteredBkModule& m, const SMat& v, long i);

/// Full Frobenius phi_M: v |-> phi(B * v).  Level n >= 1 input drops to level
/// n-1; level-0 input uses the self-map u -> u^p.
SMat apply_phi_M(const FilteredBkModule& m, const SMat& v);

/// Divided Frobenius phi_{M,r} on Fil^r M: v = A*x |-> phi(x).
/// Satisfies apply_phi_M(v) = phi(E)^r * phi_M_r(v) on Fil^r M.
SMat phi_M_r(const FilteredBkModule& m, const SMat& v);

/// Seeded random module: A = U * diag(E^{a_i}) * V with unimodular U, V, so
/// both products with B = V^{-1} * diag(E^{r-a_i}) * U^{-1} are exact.
FilteredBkModule random_filtered(const PrecisionContext& ctx, long d, long r, Rng& rng);

/// Rank-1 worked examples (r = 1).
FilteredBkModule multiplicative_group_module(const PrecisionContext& ctx);  // A=(1), B=(E)
FilteredBkModule etale_line_module(const PrecisionContext& ctx);            // A=(E), B=(1)

}  // namespace bkt
