#pragma once

#include <cstdint>

namespace bkt {

/// splitmix64: tiny, deterministic across platforms, good enough for test-case
/// generation.  Suite code derives one stream per (master seed, instance index)
/// so instances can run in any order and still reproduce bit-for-bit.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : s_(seed) {}

  static Rng for_instance(std::uint64_t master, std::uint64_t index) {
    Rng boot(master ^ (0x9e3779b97f4a7c15ULL * (index + 1)));
    boot.next();
    return Rng(boot.next());
  }

  std::uint64_t next() {
    std::uint64_t z = (s_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform-ish value in [0, n); modulo bias is irrelevant at our sizes.
  std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : next() % n; }

  long range(long lo, long hi) {  // inclusive bounds
    return lo + static_cast<long>(below(static_cast<std::uint64_t>(hi - lo + 1)));
  }

 private:
  std::uint64_t s_;
};

}  // namespace bkt
