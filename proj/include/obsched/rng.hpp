#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace obsched {

// Mixes a 64-bit value into a well-spread hash. Used to derive independent
// stream seeds so that e.g. the fading and beam generators never share state.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  return splitmix64(base ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

// Deterministic random source. All distributions are hand-rolled on top of
// mt19937_64 so that identical seeds give identical draws on every platform,
// independent of the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform on (0, 1]; never returns 0 so it is safe under log().
  double uniform() {
    return static_cast<double>((gen_() >> 11) + 1) * 0x1p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller.
  double gaussian() {
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    return r * std::cos(k_two_pi * uniform());
  }

  // Circularly symmetric complex Gaussian with unit total variance,
  // i.e. real and imaginary parts are independent N(0, 1/2).
  std::complex<double> complex_gaussian() {
    const double mag = std::sqrt(-std::log(uniform()));
    const double phase = k_two_pi * uniform();
    return {mag * std::cos(phase), mag * std::sin(phase)};
  }

  std::uint64_t next() { return gen_(); }

 private:
  static constexpr double k_two_pi = 6.28318530717958647692528676655900577;
  std::mt19937_64 gen_;
};

}  // namespace obsched
