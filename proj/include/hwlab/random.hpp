#ifndef HWLAB_RANDOM_HPP
#define HWLAB_RANDOM_HPP

#include <cmath>
#include <complex>
#include <cstdint>

namespace hwlab {

// Seeded generator used for every random ensemble in the laboratory.
// The exact mixing function is part of the file-format/reproducibility
// contract (see README), so ports in other languages can regenerate
// identical ensembles: it is the splitmix64 sequence
//   state += 0x9E3779B97F4A7C15
//   z = state; z ^= z >> 30; z *= 0xBF58476D1CE4E5B9;
//   z ^= z >> 27; z *= 0x94D049BB133111EB; z ^= z >> 31;
// uniforms are (z >> 11) * 2^-53, Gaussians are Box-Muller pairs.
class SplitMix64 {
public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1)
  double next_uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // standard normal pair via Box-Muller; uniform u clamped away from 0
  std::complex<double> next_gaussian_pair() {
    double u = next_uniform();
    double v = next_uniform();
    if (u < 0x1.0p-53) u = 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u));
    const double a = 6.283185307179586476925286766559 * v;
    return {r * std::cos(a), r * std::sin(a)};
  }

  // derive an independent stream for sample k of a seeded ensemble
  static std::uint64_t substream(std::uint64_t seed, std::uint64_t k) {
    SplitMix64 g(seed ^ (0x632BE59BD9B4E019ULL * (k + 1)));
    return g.next_u64();
  }

private:
  std::uint64_t state_;
};

} // namespace hwlab

#endif
