#ifndef HWLAB_TEST_UTIL_HPP
#define HWLAB_TEST_UTIL_HPP

#include "hwlab/grid.hpp"
#include "hwlab/random.hpp"

#include <cmath>
#include <functional>
#include <vector>

namespace hwlab::test {

// white-noise field in physical space, deterministic in the seed
inline Field noise_field(const GridSpec& g, std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<cplx> v(g.size());
  for (cplx& z : v) z = rng.next_gaussian_pair();
  return Field::from_physical(g, v);
}

// smooth random field: noise filtered to the lowest modes
inline Field smooth_field(const GridSpec& g, std::uint64_t seed, int keep_x = 6, int keep_y = 6) {
  SplitMix64 rng(seed);
  std::vector<cplx> c(g.size());
  for (int k = 0; k < g.nx; ++k)
    for (int m = 0; m < g.ny; ++m) {
      if (std::abs(g.mode_x(k)) > keep_x || std::abs(g.mode_y(m)) > keep_y) continue;
      c[g.at(k, m)] = rng.next_gaussian_pair();
    }
  return Field::from_spectral(g, std::move(c));
}

inline double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(1e-300, std::abs(want));
}

inline double rel_l2(const Field& a, const Field& b) {
  double d2 = 0.0, r2 = 0.0;
  for (std::size_t n = 0; n < a.grid().size(); ++n) {
    d2 += std::norm(a.coefficients()[n] - b.coefficients()[n]);
    r2 += std::norm(b.coefficients()[n]);
  }
  return r2 > 0 ? std::sqrt(d2 / r2) : std::sqrt(d2);
}

// independent 1D quadrature oracle (composite trapezoid on a dense grid)
inline double quad_1d(const std::function<double(double)>& f, double a, double b, int n = 200000) {
  const double h = (b - a) / n;
  double acc = 0.5 * (f(a) + f(b));
  for (int i = 1; i < n; ++i) acc += f(a + i * h);
  return acc * h;
}

} // namespace hwlab::test

#endif
