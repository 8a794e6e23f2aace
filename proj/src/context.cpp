#include "bktower/context.hpp"

#include <sstream>

#include "bktower/errors.hpp"
#include "bktower/padic.hpp"

namespace bkt {

namespace {

bool is_odd_prime(long p) {
  if (p < 3 || p % 2 == 0) return false;
  for (long d = 3; d * d <= p; d += 2)
    if (p % d == 0) return false;
  return true;
}

}  // namespace

PrecisionContext::PrecisionContext(long p_, long e_, long N_, long M_, long depth_,
                                   std::vector<mpz_class> E_)
    : p(p_), e(e_), N(N_), M(M_), depth(depth_), E(std::move(E_)) {
  if (E.empty()) E = default_eisenstein(p, e);
  validate();
}

std::vector<mpz_class> PrecisionContext::default_eisenstein(long p, long e) {
  std::vector<mpz_class> c(static_cast<size_t>(e) + 1, 0);
  c[0] = p;
  c[static_cast<size_t>(e)] = 1;
  return c;
}

void PrecisionContext::validate() const {
  if (!is_odd_prime(p) || p > 997)
    fail(Err::ConfigInvalid, "p must be an odd prime <= 997, got " + std::to_string(p));
  if (e < 1 || e > 64) fail(Err::ConfigInvalid, "e out of range: " + std::to_string(e));
  if (N < 1 || N > 256) fail(Err::ConfigInvalid, "N out of range: " + std::to_string(N));
  if (M < e * p)
    fail(Err::ConfigInvalid,
         "M must be at least e*p = " + std::to_string(e * p) + ", got " + std::to_string(M));
  if (depth < 0 || depth > 12)
    fail(Err::ConfigInvalid, "depth out of range: " + std::to_string(depth));
  if (E.size() != static_cast<size_t>(e) + 1)
    fail(Err::ConfigInvalid, "E must have e+1 coefficients");
  if (E[static_cast<size_t>(e)] != 1) fail(Err::ConfigInvalid, "E must be monic");
  if (E[0] != p) fail(Err::ConfigInvalid, "E must have constant term exactly p");
  for (long i = 1; i < e; ++i)
    if (E[static_cast<size_t>(i)] % p != 0)
      fail(Err::ConfigInvalid, "E coefficient of degree " + std::to_string(i) +
                                   " must be divisible by p");
  // The largest window must stay addressable.
  long c = M;
  for (long n = 0; n < depth; ++n) {
    if (c > (1L << 40) / p) fail(Err::ConfigInvalid, "window M * p^depth too large");
    c *= p;
  }
}

long PrecisionContext::cutoff(long level) const {
  if (level < 0 || level > depth)
    fail(Err::DepthExceeded, "level " + std::to_string(level) + " outside [0, " +
                                 std::to_string(depth) + "]");
  long c = M;
  for (long n = 0; n < level; ++n) c *= p;
  return c;
}

long PrecisionContext::jmax() const {
  // gamma_j(E) = E^j / j! has every coefficient of u-degree < e*a of valuation
  // >= j - a - v_p(j!) >= j(p-2)/(p-1) - a.  Terms visible in the window need
  // degree < M and valuation < N, which forces j < (M/e + N)(p-1)/(p-2).
  long num = (M / e + N) * (p - 1);
  long den = p - 2;
  return num / den + 1;
}

long PrecisionContext::denominator_budget() const {
  long j = jmax();
  return 2 * (j / (p - 1) + 1) + N + 4;
}

mpz_class PrecisionContext::p_pow(long k) const {
  if (k < 0) fail(Err::DenominatorOverflow, "negative p-power requested");
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(k));
  return r;
}

bool PrecisionContext::operator==(const PrecisionContext& o) const {
  return p == o.p && e == o.e && N == o.N && M == o.M && depth == o.depth && E == o.E;
}

std::string PrecisionContext::describe() const {
  std::ostringstream os;
  os << "p=" << p << " e=" << e << " N=" << N << " M=" << M << " depth=" << depth << " E=[";
  for (size_t i = 0; i < E.size(); ++i) {
    if (i) os << ",";
    os << E[i].get_str();
  }
  os << "]";
  return os.str();
}

}  // namespace bkt
