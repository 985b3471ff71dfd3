#pragma once
#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

namespace migplan {

// Thin wrapper around mt19937_64 with hand-rolled uniform draws so that a
// given seed produces the same stream on every platform/toolchain.
class rng {
 public:
  explicit rng(std::uint64_t seed) : gen_(seed) {}

  double uniform01() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  bool bernoulli(double p) { return uniform01() < p; }

  // uniform integer in [0, n)
  std::size_t index(std::size_t n) {
    // rejection sampling, unbiased
    std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v;
    do {
      v = gen_();
    } while (v >= limit);
    return static_cast<std::size_t>(v % n);
  }

  // k distinct indices from [0, n), returned sorted ascending
  std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k);

  std::uint64_t raw() { return gen_(); }

 private:
  std::mt19937_64 gen_;
};

inline std::vector<std::size_t> rng::sample_without_replacement(std::size_t n, std::size_t k) {
  std::vector<std::size_t> pool(n);
  for (std::size_t i = 0; i < n; ++i) pool[i] = i;
  std::vector<std::size_t> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k && i < n; ++i) {
    std::size_t j = i + index(n - i);
    std::swap(pool[i], pool[j]);
    out.push_back(pool[i]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace migplan
