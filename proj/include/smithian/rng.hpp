#pragma once

// Deterministic, splittable random streams. std::mt19937 and the standard
// distributions are not guaranteed bit-identical across implementations, so
// experiment reproducibility uses this self-contained splitmix64 generator.

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace smithian {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1) with 53-bit resolution
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // uniform integer in [0, n)
  std::uint64_t next_below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("next_below: n must be positive");
    // rejection sampling to avoid modulo bias
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x = next_u64();
    while (x >= limit) x = next_u64();
    return x % n;
  }

  // sample an index from a discrete distribution (weights need not be normalized)
  std::size_t next_index(const std::vector<double>& weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    if (total <= 0.0) throw std::invalid_argument("next_index: weights sum to zero");
    double u = next_double() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      acc += weights[i];
      if (u < acc) return i;
    }
    return weights.size() - 1;  // guard against rounding at the top end
  }

 private:
  std::uint64_t state_;
};

// Stable seed derivation for named substreams: hashes the parent seed with a
// list of indices so (master, condition, cost, trial) layouts reproduce exactly.
inline std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = base ^ 0xd1b54a32d192ed03ULL;
  for (std::uint64_t part : path) {
    h ^= part + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    Rng mix(h);
    h = mix.next_u64();
  }
  return h;
}

}  // namespace smithian
