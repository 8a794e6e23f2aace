// Compare the serial reference convolution against the OpenMP kernel on the
// coefficient sizes the tower actually produces, and verify bit identity.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <vector>

#include <gmpxx.h>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "bktower/rng.hpp"
#include "bktower/series.hpp"

using namespace bkt;

namespace {

std::vector<mpz_class> random_coeffs(long n, long bits, Rng& rng) {
  std::vector<mpz_class> v(static_cast<size_t>(n));
  for (auto& x : v) {
    mpz_class acc = 0;
    for (long b = 0; b < bits; b += 32) {
      acc <<= 32;
      acc += static_cast<unsigned long>(rng.next() & 0xffffffffu);
    }
    if (rng.next() & 1) acc = -acc;
    x = acc;
  }
  return v;
}

double time_conv(void (*kernel)(const std::vector<mpz_class>&, const std::vector<mpz_class>&,
                                std::vector<mpz_class>&, long),
                 const std::vector<mpz_class>& a, const std::vector<mpz_class>& b,
                 long outlen, int reps, std::vector<mpz_class>& out) {
  kernel(a, b, out, outlen);  // warm-up, also the result we keep
  auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < reps; ++i) {
    std::vector<mpz_class> tmp;
    kernel(a, b, tmp, outlen);
  }
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() /
         reps;
}

}  // namespace

int main(int argc, char** argv) {
  int reps = argc > 1 ? std::atoi(argv[1]) : 3;
#ifdef _OPENMP
  std::printf("OpenMP: %d threads\n", omp_get_max_threads());
#else
  std::printf("OpenMP: compiled out (both columns run the serial kernel)\n");
#endif
  std::printf("%8s %8s %6s  %12s %12s %8s  %s\n", "len_a", "len_b", "bits", "serial_ms",
              "parallel_ms", "speedup", "identical");

  const struct {
    long na, nb, bits;
  } shapes[] = {
      {256, 256, 64},   {1024, 1024, 64},  {4096, 512, 64},    {4096, 4096, 64},
      {8192, 8192, 32}, {16384, 2048, 64}, {16384, 16384, 32},
  };

  Rng rng(7);
  bool all_same = true;
  for (const auto& s : shapes) {
    std::vector<mpz_class> a = random_coeffs(s.na, s.bits, rng);
    std::vector<mpz_class> b = random_coeffs(s.nb, s.bits, rng);
    long outlen = s.na + s.nb - 1;
    std::vector<mpz_class> out_s, out_p;
    double ts = time_conv(conv_truncated_serial, a, b, outlen, reps, out_s);
    double tp = time_conv(conv_truncated_parallel, a, b, outlen, reps, out_p);
    bool same = out_s == out_p;
    all_same = all_same && same;
    std::printf("%8ld %8ld %6ld  %12.3f %12.3f %8.2f  %s\n", s.na, s.nb, s.bits,
                ts * 1e3, tp * 1e3, ts / tp, same ? "yes" : "NO");
  }
  if (!all_same) {
    std::printf("kernel outputs diverged\n");
    return 1;
  }
  return 0;
}
