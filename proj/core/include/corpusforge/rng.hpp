#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

namespace corpusforge {

// Seeding and uniform draws shared by every randomized component.
//
// std::mt19937_64 is fully specified by the standard, so engine output is
// identical across platforms. The <random> distributions are NOT specified,
// so bounded draws are implemented here and every consumer (including test
// oracles) follows the same contract:
//   - uniform_index(g, n): rejection sampling on the top of the 64-bit range,
//     then modulo; unbiased.
//   - uniform_unit(g): top 53 bits scaled to [0, 1).
//   - shuffle_inplace: Fisher-Yates from the back, j = uniform_index(g, i).

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Sub-seed for a named component: FNV-1a over the name, mixed with the seed.
// This is the documented global-seed -> sub-seed derivation used by the CLI.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view component);

// Sub-seed for an indexed stream (cluster index, bootstrap resample, ...).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(seed ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

inline std::mt19937_64 make_engine(std::uint64_t seed) {
  return std::mt19937_64(seed);
}

std::uint64_t uniform_index(std::mt19937_64& g, std::uint64_t n);

inline double uniform_unit(std::mt19937_64& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

template <typename T>
void shuffle_inplace(std::vector<T>& v, std::mt19937_64& g) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform_index(g, i));
    std::swap(v[i - 1], v[j]);
  }
}

// Standard normal via Box-Muller on uniform_unit draws (two per call pair).
double normal_draw(std::mt19937_64& g);

}  // namespace corpusforge
