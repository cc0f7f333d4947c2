#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace msh {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Deterministic combination of a base seed and a stream id.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(seed ^ splitmix64(stream + 0x9e3779b97f4a7c15ULL));
}

// mt19937_64 with hand-rolled uniform/normal transforms. The engine's output
// sequence is fixed by the standard; std:: distributions are not, so using
// them would make seeds non-portable across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform over {0, ..., n-1}, rejection sampled (no modulo bias).
  int uniform_int(int n) {
    const auto un = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % un;
    std::uint64_t r = next();
    while (r >= limit) r = next();
    return static_cast<int>(r % un);
  }

  // Standard normal via Box-Muller; caches the second deviate.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1], keeps log() finite
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * kPi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  double normal(double mean, double sigma) { return mean + sigma * normal(); }

  // Independent substream; deterministic in (seed, stream).
  Rng derive(std::uint64_t stream) const { return Rng(mix_seed(seed_, stream)); }

 private:
  static constexpr double kPi = 3.141592653589793238462643383279502884;

  std::uint64_t seed_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace msh
