#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace stcop {

// Named-substream seeding: every consumer derives its own stream from the
// root seed plus labels/indices, so results are reproducible regardless of
// evaluation order or threading.
uint64_t substream_seed(uint64_t root, std::string_view label,
                        uint64_t index_a = 0, uint64_t index_b = 0);

/// Deterministic random stream. All variates are produced by inverse-CDF
/// transforms of the raw mt19937_64 output, so sequences are identical across
/// platforms and compilers.
class RngStream {
 public:
  explicit RngStream(uint64_t seed) : eng_(seed) {}

  uint64_t raw() { return eng_(); }

  // strictly inside (0,1)
  double uniform() {
    return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // integer in [0, n)
  uint64_t uniform_int(uint64_t n) { return eng_() % n; }

  double normal();
  double gamma(double shape);
  double chi_square(double df) { return 2.0 * gamma(0.5 * df); }
  double student_t(double nu);

 private:
  std::mt19937_64 eng_;
};

}  // namespace stcop
