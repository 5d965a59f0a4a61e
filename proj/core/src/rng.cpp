#include "stcop/rng.hpp"

#include <cmath>

#include "stcop/numerics.hpp"

namespace stcop {

namespace {

uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

uint64_t fnv1a(std::string_view s) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

uint64_t substream_seed(uint64_t root, std::string_view label, uint64_t index_a,
                        uint64_t index_b) {
  uint64_t h = splitmix64(root);
  h = splitmix64(h ^ fnv1a(label));
  h = splitmix64(h ^ index_a);
  h = splitmix64(h ^ index_b);
  return h;
}

double RngStream::normal() { return std_normal_quantile(uniform()); }

double RngStream::gamma(double shape) {
  if (shape < 1.0) {
    // boost to shape+1 (Marsaglia-Tsang trick)
    double u = uniform();
    return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    double u = uniform();
    double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double RngStream::student_t(double nu) {
  return normal() / std::sqrt(chi_square(nu) / nu);
}

}  // namespace stcop
