#pragma once

#include "bktower/breuil.hpp"

namespace bkt {

/// A finite-depth member of the Frobenius-compatible tower: one coefficient
/// vector per level, w[n] at level n, subject to
///
///   phi(E)^r * w[n] = phi(B * w[n+1])      (0 <= n < depth).
///
/// The module element encoded at level n is z_n^{-r} * (e_1..e_d) * w[n].
struct ModuleChain {
  FilteredBkModule mod;
  long depth = 0;
  std::vector<SMat> w;  // size depth+1
};

/// w[0] = delta_i, w[n] = A_n * phi^{-1}(w[n-1]).
ModuleChain generator_chain(const FilteredBkModule& m, long i, long depth);

/// Seeded from the filtration: w[0] = A * x0, same recurrence.  The level-0
/// vector lies in Fil^r by construction.
ModuleChain filr_generator_chain(const FilteredBkModule& m, const SMat& x0, long depth);

/// Build a chain downward from an arbitrary top vector whose image under B is
/// divisible by E^r: w[n] = phi(B*w[n+1]) / phi(E)^r.  Lets tests exercise the
/// descent on chains with genuine divided-power content.
ModuleChain chain_from_top(const FilteredBkModule& m, const SMat& w_top, long depth);

/// One-level unique lifting: coordinates of the level-(n+1) representative of
/// a level-n element of the restricted tower (pure Frobenius inverse).
SMat lift_element(const SMat& s);

ModuleChain chain_add(const ModuleChain& a, const ModuleChain& b);
/// The power-series action g * {xi_n}: level n is scaled by the level-n
/// renaming of g (an integral level-0 element).
ModuleChain chain_scale(const ModuleChain& c, const TowerElement& g);

struct CompatReport {
  bool ok = false;         // no certified mismatch at any level
  bool certified = false;  // every level met the tolerance thresholds
  long first_bad_level = -1;
  std::vector<EqualityReport> level;  // index n compares levels n, n+1
};
CompatReport check_compat(const ModuleChain& c);

enum class Verdict { Pass, Inconclusive, Fail };
const char* verdict_name(Verdict v);

struct DescentStep {
  long level = 0;         // level the filtration claim lands on
  long fil_target = 0;    // theoretical contraction value
  long fil_realized = 0;  // value certified within the window
};

struct DescentResult {
  Verdict verdict = Verdict::Inconclusive;
  std::string detail;
  SMat w;                   // recovered integral vector at level 1
  EqualityReport recovery;  // phi(w) against w[0]
  long residual_fil = 0;    // certified filtration degree of the discarded part
  long digits = 0;          // certified p-adic digits of the recovery
  long u_window = 0;        // certified u-degree window of the recovery
  std::vector<DescentStep> steps;
};

/// Coefficient descent: certifies that the chain comes from an integral
/// vector and recovers it.  Follows the contraction scheme: extract
/// s_n = (p * B * w[n]) / E^r, split the top level into integral + filtration
/// parts, then repeatedly push the filtration part through Frobenius, strip
/// E^r, and tighten the filtration degree along the height-adjusted
/// contraction sequence; finally divide the level-1 integral part by p.
DescentResult descend(const ModuleChain& c);

struct RecoveryResult {
  Verdict verdict = Verdict::Inconclusive;
  std::string detail;
  FilteredBkModule module;  // the (A, B) presentation, re-certified
  DescentResult combo;      // descent of a random integral combination
  std::vector<TowerElement> combo_coeffs;  // the planted coefficients
};

/// Round trip: from the divided-power-ring module, rebuild generator chains,
/// verify compatibility and filtration membership, and descend a random
/// integral combination back to its coefficients.
RecoveryResult recover_filtered(const BreuilModule& m, long depth, Rng& rng);

}  // namespace bkt
