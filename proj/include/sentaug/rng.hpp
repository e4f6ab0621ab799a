#pragma once

#include <cassert>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace sentaug {

// 64-bit FNV-1a. Stable word hashes, vocab fingerprints, seed mixing.
inline uint64_t fnv1a(std::string_view s, uint64_t h = 14695981039346656037ull) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline uint64_t mix_seed(uint64_t seed, std::string_view tag) {
  return fnv1a(tag, seed ^ 0x9e3779b97f4a7c15ull);
}

// mt19937_64 is bit-stable across platforms; the std:: distributions are not,
// so the uniform mappings are done by hand.
class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}

  uint64_t next_u64() { return eng_(); }

  // uniform in [0, 1)
  double next_real() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double next_real(double lo, double hi) { return lo + (hi - lo) * next_real(); }

  // uniform integer in [0, n); rejection sampling keeps it exactly uniform
  uint64_t next_below(uint64_t n) {
    assert(n > 0);
    uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t x;
    do {
      x = eng_();
    } while (x >= limit);
    return x % n;
  }

  // uniform integer in [lo, hi] inclusive
  int next_int(int lo, int hi) {
    return lo + static_cast<int>(next_below(static_cast<uint64_t>(hi - lo) + 1));
  }

  bool next_coin() { return (eng_() & 1ull) != 0; }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i)
      std::swap(v[i - 1], v[static_cast<size_t>(next_below(i))]);
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace sentaug
