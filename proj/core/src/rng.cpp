#include "corpusforge/rng.hpp"

#include <cmath>

namespace corpusforge {

std::uint64_t derive_seed(std::uint64_t seed, std::string_view component) {
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a offset basis
  for (const char c : component) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return splitmix64(seed ^ h);
}

std::uint64_t uniform_index(std::mt19937_64& g, std::uint64_t n) {
  if (n == 0) return 0;
  // Reject draws from the incomplete top interval so the modulo is unbiased.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t r = g();
  while (r >= limit) r = g();
  return r % n;
}

double normal_draw(std::mt19937_64& g) {
  double u1 = uniform_unit(g);
  const double u2 = uniform_unit(g);
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
}

}  // namespace corpusforge
