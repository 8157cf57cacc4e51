#pragma once

#include <cstdint>
#include <span>

// Deterministic random numbers with stable cross-platform output.
// std::mt19937_64 is reproducible but the standard distributions are not,
// so sampling is done directly on the raw 64-bit stream.
namespace cocyc {

class DetRng {
 public:
  explicit DetRng(std::uint64_t seed) : state_(seed) {}

  // splitmix64 step; passes standard statistical batteries at this scale.
  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53-bit resolution.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Uniform integer in [0, n); rejection-free modulo bias is irrelevant at
  // the n used here but kept exact anyway via rejection sampling.
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) return 0;
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t v = next_u64();
    while (v >= limit) v = next_u64();
    return v % n;
  }

  // Index sampled proportionally to the nonnegative weights (CDF inversion).
  std::size_t weighted(std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    double u = uniform01() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
      acc += weights[i];
      if (u < acc) return i;
    }
    return weights.empty() ? 0 : weights.size() - 1;
  }

 private:
  std::uint64_t state_;
};

// Stable derivation of independent per-task seeds from a master seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  DetRng r(master ^ (0xd1342543de82ef95ull * (index + 1)));
  return r.next_u64();
}

}  // namespace cocyc
