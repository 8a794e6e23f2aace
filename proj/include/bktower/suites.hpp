#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bktower/json_io.hpp"

namespace bkt {

inline constexpr const char* kLibraryVersion = "0.1.0";

/// One batch run: context parameters, instance generation, output routing.
/// The seed fully determines every random choice; instance k draws from
/// Rng::for_instance(seed, stream + k), so dropping one instance never
/// shifts the others.
struct SuiteConfig {
  long p = 3;
  long e = 1;
  std::vector<mpz_class> E;  // empty: u^e + p
  long N = 8;
  long M = 0;      // 0: per-suite default
  long depth = 3;
  long d = 2;      // roundtrip: largest module rank drawn
  long r = 1;      // roundtrip: largest height drawn
  long r_min = 0;  // roundtrip: smallest height drawn
  std::uint64_t seed = 1;
  long count = 0;  // instances; 0: per-suite default
  std::string suite;  // sub-battery selector (ring-suite: "identities" | "limit")
  std::string out;    // output path; empty = stdout
  /// Tolerance policy: a case PASSes only when certified to at least
  /// min_digits p-adic digits (-1: N - 2) on at least half the nominal
  /// u-degree window; narrower windows demote to INCONCLUSIVE.
  long min_digits = -1;
  bool record_timing = false;  // keep timings at 0 for byte-stable output
};

struct CaseResult {
  std::string id;
  Verdict verdict = Verdict::Inconclusive;
  std::string detail;
  json data;  // windows, residuals, counters
};

struct Certificate {
  std::string suite;
  json config_echo;
  std::vector<CaseResult> cases;
  long timing_ms = 0;
  std::string version = kLibraryVersion;

  long passed = 0, failed = 0, inconclusive = 0;

  void add(const std::string& id, Verdict v, const std::string& detail,
           json data = json::object());
  /// Fail dominates; otherwise Inconclusive when any case is; else Pass.
  Verdict overall() const;
  json to_json() const;
  /// 0 all pass, 1 any fail, 2 inconclusive only.
  int exit_code() const;
};

json config_to_json(const SuiteConfig& cfg);

/// Ring-tower invariant battery: divided-power/power-series intersection by
/// construct-then-divide, the Frobenius filtration split with its contraction
/// bound, the factorial-valuation identity, ladder and unit identities.
Certificate ring_suite(const SuiteConfig& cfg);

/// Inverse-limit membership battery over the trivial rank-1 height-0 module:
/// integral seeds round-trip through the level maps exactly; seeds with a
/// genuine divided-power denominator are rejected (their unique lifts leave
/// the ring, certified by canonical-form digit valuations).
Certificate limit_suite(const SuiteConfig& cfg);

/// Round trip random filtered module -> divided-power module -> recovered
/// presentation, with coefficient recovery of a random integral combination
/// of generator chains.
Certificate roundtrip_suite(const SuiteConfig& cfg);

/// Worked rank-1 examples: "multiplicative" (A=(1), B=(E)) and "etale"
/// (A=(E), B=(1)), each with its full identity battery and controls.
Certificate example_suite(const SuiteConfig& cfg, const std::string& name);

}  // namespace bkt
