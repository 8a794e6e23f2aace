// Acceptance gate: one criterion per invocation (argv[1] = 1..6), one
// "criterion k: PASS|FAIL" line on stdout, exit 0/1.  Thresholds are pinned
// here, not read from configuration.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <vector>

#include <gmpxx.h>

#include "bktower/suites.hpp"

using namespace bkt;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void report_cert(const char* label, const Certificate& cert) {
  std::printf("  %-28s pass=%ld fail=%ld inconclusive=%ld\n", label, cert.passed,
              cert.failed, cert.inconclusive);
  if (cert.failed > 0) {
    for (const CaseResult& c : cert.cases)
      if (c.verdict == Verdict::Fail)
        std::printf("    FAIL %s: %s\n", c.id.c_str(), c.detail.c_str());
  }
}

// --- criterion 1: ring invariant battery over four (p, e) pairs ------------

bool criterion1() {
  auto t0 = std::chrono::steady_clock::now();
  const long pe[4][2] = {{3, 1}, {3, 2}, {5, 1}, {5, 2}};
  bool ok = true;
  for (const auto& c : pe) {
    SuiteConfig cfg;
    cfg.p = c[0];
    cfg.e = c[1];
    cfg.N = 8;
    cfg.M = 0;  // suite default 3*e*p^2
    cfg.depth = 3;
    cfg.count = 200;
    cfg.seed = 1;
    Certificate cert = ring_suite(cfg);
    char label[64];
    std::snprintf(label, sizeof label, "ring p=%ld e=%ld", c[0], c[1]);
    report_cert(label, cert);
    if (cert.failed != 0 || cert.inconclusive != 0) ok = false;
  }
  double dt = seconds_since(t0);
  std::printf("  wall time %.1f s (limit 120)\n", dt);
  return ok && dt < 120.0;
}

// --- criterion 2: contraction sequences, exact arithmetic ------------------

bool criterion2() {
  bool ok = true;
  for (long p : {3L, 5L, 7L}) {
    for (long r = 0; r < p - 1; ++r) {
      std::vector<long> plain = contraction_sequence(ContractionKind::Plain, p, r, 20);
      std::vector<long> adj =
          contraction_sequence(ContractionKind::HeightAdjusted, p, r, 20);
      for (size_t i = 1; i < 20; ++i) {
        if (plain[i] <= plain[i - 1]) ok = false;
        if (adj[i] <= adj[i - 1]) ok = false;
      }
      if (plain[0] != p || adj[0] != p) ok = false;
      // The recurrences themselves, re-derived term by term.
      for (size_t i = 1; i < 20; ++i) {
        if (plain[i] != p * contraction_bound(plain[i - 1], p)) ok = false;
        if (adj[i] != p * contraction_bound(adj[i - 1], p) - r) ok = false;
      }
      if (r == 0 && plain != adj) ok = false;
    }
  }
  // Hand-computed prefixes.
  const struct {
    ContractionKind kind;
    long p, r;
    long want[4];
  } table[] = {
      {ContractionKind::Plain, 3, 0, {3, 6, 9, 15}},
      {ContractionKind::Plain, 5, 0, {5, 20, 75, 285}},
      {ContractionKind::Plain, 7, 0, {7, 42, 245, 1435}},
      {ContractionKind::HeightAdjusted, 3, 1, {3, 5, 8, 11}},
      {ContractionKind::HeightAdjusted, 5, 3, {5, 17, 62, 232}},
      {ContractionKind::HeightAdjusted, 7, 5, {7, 37, 212, 1234}},
      {ContractionKind::HeightAdjusted, 5, 1, {5, 19, 74, 279}},
  };
  for (const auto& row : table) {
    std::vector<long> got = contraction_sequence(row.kind, row.p, row.r, 4);
    for (int i = 0; i < 4; ++i)
      if (got[static_cast<size_t>(i)] != row.want[i]) {
        std::printf("  prefix mismatch p=%ld r=%ld term %d: got %ld want %ld\n", row.p,
                    row.r, i, got[static_cast<size_t>(i)], row.want[i]);
        ok = false;
      }
  }
  std::printf("  checked p in {3,5,7}, all heights, 20 terms each\n");
  return ok;
}

// --- criterion 3: worked rank-1 examples at depth 4 ------------------------

bool criterion3() {
  bool ok = true;
  for (long p : {3L, 5L}) {
    for (const char* name : {"multiplicative", "etale"}) {
      SuiteConfig cfg;
      cfg.p = p;
      cfg.e = 1;
      cfg.N = 8;
      cfg.depth = 4;
      cfg.min_digits = 6;
      cfg.seed = 1;
      Certificate cert = example_suite(cfg, name);
      char label[64];
      std::snprintf(label, sizeof label, "example %s p=%ld", name, p);
      report_cert(label, cert);
      if (cert.overall() != Verdict::Pass) ok = false;
    }
  }
  return ok;
}

// --- criterion 4: module recovery round trip at scale ----------------------

bool criterion4() {
  auto t0 = std::chrono::steady_clock::now();
  SuiteConfig a;
  a.p = 5;
  a.d = 3;
  a.r = 3;
  a.r_min = 0;
  a.N = 8;
  a.depth = 3;
  a.count = 100;
  a.seed = 1;
  Certificate ca = roundtrip_suite(a);
  report_cert("roundtrip p=5 d<=3 r<=3", ca);

  SuiteConfig b;
  b.p = 3;
  b.d = 2;
  b.r = 1;
  b.r_min = 1;
  b.N = 8;
  b.depth = 3;
  b.count = 100;
  b.seed = 1;
  Certificate cb = roundtrip_suite(b);
  report_cert("roundtrip p=3 d<=2 r=1", cb);

  double dt = seconds_since(t0);
  std::printf("  wall time %.1f s (limit 600)\n", dt);
  bool ok = ca.failed == 0 && cb.failed == 0;
  if (ca.inconclusive + cb.inconclusive >= 10) ok = false;
  return ok && dt < 600.0;
}

// --- criterion 5: exact-rational mirror oracle -----------------------------
//
// Mirror every series operation against dense polynomials over mpq_class,
// built independently of the series code path.

using QPoly = std::vector<mpq_class>;

QPoly q_trim(QPoly a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
  return a;
}

QPoly q_add(const QPoly& a, const QPoly& b) {
  QPoly r(std::max(a.size(), b.size()), mpq_class(0));
  for (size_t i = 0; i < a.size(); ++i) r[i] += a[i];
  for (size_t i = 0; i < b.size(); ++i) r[i] += b[i];
  return q_trim(r);
}

QPoly q_sub(const QPoly& a, const QPoly& b) {
  QPoly r(std::max(a.size(), b.size()), mpq_class(0));
  for (size_t i = 0; i < a.size(); ++i) r[i] += a[i];
  for (size_t i = 0; i < b.size(); ++i) r[i] -= b[i];
  return q_trim(r);
}

QPoly q_mul(const QPoly& a, const QPoly& b, size_t limit) {
  if (a.empty() || b.empty()) return {};
  QPoly r(std::min(a.size() + b.size() - 1, limit), mpq_class(0));
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j)
      if (i + j < r.size()) r[i + j] += a[i] * b[j];
  return q_trim(r);
}

QPoly q_shift(const QPoly& a, size_t k, size_t limit) {
  QPoly r(std::min(a.size() + k, limit), mpq_class(0));
  for (size_t i = 0; i < a.size(); ++i)
    if (i + k < r.size()) r[i + k] = a[i];
  return q_trim(r);
}

struct Mirrored {
  TowerElement elem;
  QPoly poly;
};

Mirrored random_mirrored(const PrecisionContext& ctx, long max_deg, long bound,
                         long max_scale, Rng& rng) {
  long scale = rng.range(0, max_scale);
  std::vector<mpz_class> coeffs(static_cast<size_t>(max_deg) + 1);
  QPoly poly(coeffs.size());
  mpz_class den = ctx.p_pow(scale);
  for (size_t i = 0; i < coeffs.size(); ++i) {
    coeffs[i] = rng.range(-bound, bound);
    poly[i] = mpq_class(coeffs[i], den);
    poly[i].canonicalize();
  }
  Mirrored m;
  m.elem = TowerElement::from_coeffs(ctx, 0, std::move(coeffs), RingTag::S, scale);
  m.poly = q_trim(std::move(poly));
  return m;
}

bool matches(const TowerElement& x, const QPoly& q, long limit) {
  for (long a = 0; a < limit; ++a) {
    mpq_class want = a < static_cast<long>(q.size()) ? q[static_cast<size_t>(a)]
                                                     : mpq_class(0);
    if (x.coeff_rational(a) != want) return false;
  }
  return true;
}

bool criterion5() {
  PrecisionContext ctx(5, 1, 10, 120, 1);
  const long pairs = 1000;
  const size_t limit = static_cast<size_t>(ctx.M);
  long bad = 0;

  for (int op = 0; op < 5; ++op) {
    Rng rng(9100 + static_cast<std::uint64_t>(op));
    for (long k = 0; k < pairs; ++k) {
      Mirrored a = random_mirrored(ctx, rng.range(0, 35), 625, 2, rng);
      Mirrored b = random_mirrored(ctx, rng.range(0, 35), 625, 2, rng);
      TowerElement got;
      QPoly want;
      switch (op) {
        case 0:
          got = add(a.elem, b.elem);
          want = q_add(a.poly, b.poly);
          break;
        case 1:
          got = sub(a.elem, b.elem);
          want = q_sub(a.poly, b.poly);
          break;
        case 2:
          got = mul(a.elem, b.elem);
          want = q_mul(a.poly, b.poly, limit);
          break;
        case 3: {
          long sh = rng.range(0, 7);
          got = mul(a.elem, TowerElement::monomial(ctx, 0, sh, 1));
          want = q_shift(a.poly, static_cast<size_t>(sh), limit);
          break;
        }
        default: {
          mpz_class s = rng.range(-50, 50);
          got = mul_int(a.elem, s);
          want = q_mul(a.poly, QPoly{mpq_class(s)}, limit);
          break;
        }
      }
      if (!matches(got, want, ctx.M)) ++bad;
    }
  }
  std::printf("  5 operations x %ld mirrored pairs, %ld disagreements\n", pairs, bad);
  return bad == 0;
}

// --- criterion 6: inverse-limit membership battery -------------------------

bool criterion6() {
  SuiteConfig cfg;
  cfg.p = 3;
  cfg.e = 1;
  cfg.N = 8;
  cfg.depth = 3;
  cfg.count = 50;
  cfg.seed = 1;
  Certificate cert = limit_suite(cfg);
  report_cert("limit p=3", cert);
  return cert.overall() == Verdict::Pass;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::fprintf(stderr, "usage: %s <criterion 1..6>\n", argv[0]);
    return 2;
  }
  int k = std::atoi(argv[1]);
  bool ok = false;
  switch (k) {
    case 1: ok = criterion1(); break;
    case 2: ok = criterion2(); break;
    case 3: ok = criterion3(); break;
    case 4: ok = criterion4(); break;
    case 5: ok = criterion5(); break;
    case 6: ok = criterion6(); break;
    default:
      std::fprintf(stderr, "criterion out of range: %d\n", k);
      return 2;
  }
  std::printf("criterion %d: %s\n", k, ok ? "PASS" : "FAIL");
  return ok ? 0 : 1;
}
