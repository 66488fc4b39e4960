#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace gtfdi {

/// Deterministic random stream. Gaussian draws use the Marsaglia polar
/// method instead of std::normal_distribution so that sequences are
/// bit-reproducible across standard-library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform draw on [0, 1).
  double uniform() {
    // 53 random bits -> double mantissa.
    return (engine_() >> 11) * 0x1.0p-53;
  }

  /// Standard normal draw.
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    has_spare_ = true;
    return u * m;
  }

  std::uint64_t raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Per-run seed derivation: campaign seed XOR run index (splitmix-mixed so
/// neighbouring runs do not share low bits).
inline std::uint64_t derive_seed(std::uint64_t campaign_seed, std::uint64_t run_index) {
  std::uint64_t z = campaign_seed ^ run_index;
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace gtfdi
