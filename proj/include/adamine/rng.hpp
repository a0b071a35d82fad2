#ifndef ADAMINE_RNG_HPP
#define ADAMINE_RNG_HPP

#include <cmath>
#include <cstdint>
#include <vector>

namespace adamine {

/*
 * Deterministic generator used for every random draw in the project:
 * xoshiro256** 1.0 (Blackman & Vigna), state seeded by four successive
 * outputs of splitmix64 applied to the user seed.
 *
 *   uniform double  = (next() >> 11) * 2^-53              in [0, 1)
 *   gaussian        = Box-Muller on two uniforms, the second value of each
 *                     pair is cached and returned on the next call
 *   uniform_int(n)  = rejection sampling on the top bits (unbiased)
 *   shuffle         = Fisher-Yates, descending index
 *
 * The algorithm is pinned so fixtures and frozen oracle values stay valid
 * across platforms and reimplementations.
 */
class Rng {
public:
  explicit Rng(uint64_t seed) {
    uint64_t x = seed;
    for (auto& word : state_) {
      // splitmix64
      x += 0x9E3779B97F4A7C15ull;
      uint64_t z = x;
      z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
      z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
      word = z ^ (z >> 31);
    }
  }

  uint64_t next() {
    const uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // [0, 1)
  double uniform() { return (next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // unbiased integer in [0, n)
  uint64_t uniform_int(uint64_t n) {
    if (n == 0) return 0;
    uint64_t threshold = (-n) % n;
    for (;;) {
      uint64_t r = next();
      if (r >= threshold) return r % n;
    }
  }

  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();  // avoid log(0)
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  double gaussian(double mean, double stddev) {
    return mean + stddev * gaussian();
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(uniform_int(i));
      std::swap(v[i - 1], v[j]);
    }
  }

private:
  static uint64_t rotl(uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  uint64_t state_[4];
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace adamine

#endif  // ADAMINE_RNG_HPP
