#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hwlab/grid.hpp"
#include "test_util.hpp"

#include <algorithm>
#include <cmath>

using namespace hwlab;
using namespace hwlab::test;

TEST_CASE("make_grid populates the wavenumber tables") {
  const GridSpec g = make_grid(8, 8, two_pi, YDomain::Torus);
  // xi modes run over {-4,...,3}, eta likewise on the torus
  std::vector<int> modes;
  for (int k = 0; k < g.nx; ++k) modes.push_back(g.mode_x(k));
  std::sort(modes.begin(), modes.end());
  CHECK(modes.front() == -4);
  CHECK(modes.back() == 3);
  CHECK(g.eta(1) == doctest::Approx(1.0).epsilon(1e-15));

  const GridSpec fine = make_grid(256, 64, 80.0, YDomain::Torus);
  CHECK(fine.dx() == doctest::Approx(0.3125).epsilon(1e-15));
}

TEST_CASE("make_grid rejects bad sizes and lengths") {
  CHECK_THROWS_AS(make_grid(8, 4, -1.0, YDomain::Torus), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(100, 8, 1.0, YDomain::Torus), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(8, 12, 1.0, YDomain::Torus), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(8, 8, 0.0, YDomain::Torus), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(8, 8, 1.0, YDomain::TruncatedLine, -2.0), std::invalid_argument);
}

TEST_CASE("transform: zero field, single mode, round trip") {
  const GridSpec g = make_grid(32, 16, 10.0, YDomain::Torus);

  const Field zero = Field::zeros(g);
  for (const cplx& c : zero.coefficients()) CHECK(std::abs(c) == 0.0);

  // e^{i xi_1 x} concentrates on the k=1 column
  const Field mode = Field::sample(g, [&](double x, double) {
    const double ph = g.xi(1) * x;
    return cplx(std::cos(ph), std::sin(ph));
  });
  for (int k = 0; k < g.nx; ++k)
    for (int m = 0; m < g.ny; ++m) {
      const double expect = (k == 1 && m == 0) ? 1.0 : 0.0;
      CHECK(std::abs(mode.coeff_at(k, m) - expect) < 1e-12);
    }

  const Field f = noise_field(g, 7);
  const Field back = Field::from_spectral(
      g, {f.coefficients().begin(), f.coefficients().end()});
  double err = 0.0, ref = 0.0;
  for (std::size_t n = 0; n < g.size(); ++n) {
    err += std::norm(back.values()[n] - f.values()[n]);
    ref += std::norm(f.values()[n]);
  }
  CHECK(std::sqrt(err / ref) < 1e-12);
}

TEST_CASE("transform rejects non-finite input") {
  const GridSpec g = make_grid(8, 8, 1.0, YDomain::Torus);
  std::vector<cplx> bad(g.size(), 0.0);
  bad[3] = cplx(std::nan(""), 0.0);
  CHECK_THROWS_AS(Field::from_physical(g, bad), std::invalid_argument);
}

TEST_CASE("norms: zero field, sech profile oracle, weight identity") {
  const GridSpec g = make_grid(256, 16, 40.0, YDomain::Torus);
  const Field zero = Field::zeros(g);
  for (auto kind : {NormKind::l2(), NormKind::linf(), NormKind::lp(3.0),
                    NormKind::aniso_hs(0.5), NormKind::h1_l2_y()})
    CHECK(norm(zero, kind) == 0.0);

  // ||sech(x) * 1_y||_{L2}^2 = 2 pi * integral sech^2 = 2 pi * 2
  const Field sech = Field::sample(g, [](double x, double) {
    return cplx(1.0 / std::cosh(x), 0.0);
  });
  const double oracle = quad_1d([](double x) { return std::pow(1.0 / std::cosh(x), 2); },
                                -20.0, 20.0);
  CHECK(oracle == doctest::Approx(2.0).epsilon(1e-9));
  const double l2 = norm(sech, NormKind::l2());
  CHECK(rel_err(l2 * l2, two_pi * oracle) < 1e-9);
  CHECK(l2 * l2 == doctest::Approx(12.566).epsilon(1e-3));

  const Field f = noise_field(g, 11);
  CHECK(rel_err(norm(f, NormKind::l2_hs_y(0.0)), norm(f, NormKind::l2())) < 1e-12);

  CHECK_THROWS_AS(norm(f, NormKind::lp(0.5)), std::invalid_argument);
}

TEST_CASE("Parseval: physical quadrature matches spectral sum") {
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL, 4ULL}) {
    const GridSpec g = make_grid(64, 32, 25.0, seed % 2 ? YDomain::Torus : YDomain::TruncatedLine,
                                 17.0);
    const Field f = noise_field(g, seed);
    double quad = 0.0;
    for (const cplx& z : f.values()) quad += std::norm(z);
    quad *= g.dx() * g.dy();
    const double spec = norm(f, NormKind::l2());
    CHECK(rel_err(std::sqrt(quad), spec) < 1e-10);
  }
}

TEST_CASE("norm equivalence of the combined anisotropic weight") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const GridSpec g = make_grid(32, 32, 12.0, YDomain::Torus);
    const Field f = noise_field(g, 100 + seed);
    const double a = norm(f, NormKind::l2_hs_y(0.5));
    const double b = norm(f, NormKind::h1_l2_y());
    const double c = norm(f, NormKind::aniso_hs(0.5));
    const double mx = std::max(a, b);
    CHECK(c >= mx * (1.0 - 1e-12));
    CHECK(c <= std::sqrt(2.0) * mx * (1.0 + 1e-12));
  }
}

TEST_CASE("apply_symbol: y-constant kernel, second derivative, half-wave root") {
  const GridSpec g = make_grid(32, 16, 10.0, YDomain::Torus);

  const Field yconst = Field::sample(g, [](double x, double) {
    return cplx(std::sin(x), 0.2 * std::cos(2 * x));
  });
  CHECK(norm(apply_symbol(yconst, Symbol::AbsDy), NormKind::l2()) < 1e-13);

  const Field mode = Field::sample(g, [&](double x, double) {
    const double ph = g.xi(1) * x;
    return cplx(std::cos(ph), std::sin(ph));
  });
  const Field dxx = apply_symbol(mode, Symbol::Dxx);
  const double want = -g.xi(1) * g.xi(1);
  for (std::size_t n = 0; n < g.size(); ++n)
    CHECK(std::abs(dxx.values()[n] - want * mode.values()[n]) < 1e-12);

  const Field f = noise_field(g, 21);
  const Field twice = apply_symbol(apply_symbol(f, Symbol::AbsDyHalf), Symbol::AbsDyHalf);
  const Field once = apply_symbol(f, Symbol::AbsDy);
  CHECK(rel_l2(twice, once) < 1e-12);
}

TEST_CASE("inner products: norm consistency, orthogonality, Cauchy-Schwarz") {
  const GridSpec g = make_grid(32, 16, 9.0, YDomain::Torus);
  const Field f = noise_field(g, 31);
  const Field h = noise_field(g, 32);

  for (auto kind : {NormKind::l2(), NormKind::aniso_hs(0.5), NormKind::l2_hs_y(0.7)}) {
    const double n = norm(f, kind);
    CHECK(rel_err(std::real(inner_product(f, f, kind)), n * n) < 1e-12);
    CHECK(std::abs(std::imag(inner_product(f, f, kind))) < 1e-12 * n * n);
    // |<f,h>| <= ||f|| ||h||
    CHECK(std::abs(inner_product(f, h, kind)) <= n * norm(h, kind) * (1.0 + 1e-12));
  }

  const Field m1 = Field::sample(g, [&](double x, double) {
    return cplx(std::cos(g.xi(1) * x), std::sin(g.xi(1) * x));
  });
  const Field m2 = Field::sample(g, [&](double, double y) {
    return cplx(std::cos(2 * y), std::sin(2 * y));
  });
  CHECK(std::abs(inner_product(m1, m2, NormKind::l2())) < 1e-12);

  CHECK_THROWS_AS(inner_product(f, h, NormKind::linf()), std::invalid_argument);
  const GridSpec other = make_grid(16, 16, 9.0, YDomain::Torus);
  CHECK_THROWS_AS(inner_product(f, Field::zeros(other), NormKind::l2()),
                  std::invalid_argument);
}

TEST_CASE("conjugate linearity in the second slot") {
  const GridSpec g = make_grid(16, 16, 5.0, YDomain::Torus);
  const Field f = noise_field(g, 41);
  const Field h = noise_field(g, 42);
  const cplx alpha(0.3, -0.8);
  std::vector<cplx> scaled(h.coefficients().begin(), h.coefficients().end());
  for (cplx& z : scaled) z *= alpha;
  const Field ah = Field::from_spectral(g, std::move(scaled));
  const cplx lhs = inner_product(f, ah, NormKind::l2());
  const cplx rhs = std::conj(alpha) * inner_product(f, h, NormKind::l2());
  CHECK(std::abs(lhs - rhs) < 1e-12 * std::abs(rhs));
}

TEST_CASE("Holder chain: L^{p+1} against L2/L6 interpolation") {
  const GridSpec g = make_grid(32, 32, 15.0, YDomain::Torus);
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const Field f = seed % 2 ? noise_field(g, 200 + seed) : smooth_field(g, 200 + seed);
    for (double p : {1.2, 1.7, 2.0}) {
      const double lhs = norm(f, NormKind::lp(p + 1.0));
      const double theta = 3.0 / (p + 1.0) - 0.5;
      const double rhs = std::pow(norm(f, NormKind::l2()), theta) *
                         std::pow(norm(f, NormKind::lp(6.0)), 1.5 - 3.0 / (p + 1.0));
      CHECK(lhs <= rhs * (1.0 + 1e-10));
    }
  }
}

TEST_CASE("translate shifts the sample lattice exactly") {
  const GridSpec g = make_grid(32, 16, 11.0, YDomain::Torus);
  const Field f = smooth_field(g, 55);
  const Field t = translate(f, 3, -2);
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) {
      const int ii = (i + 3) % g.nx;
      const int jj = (j - 2 + g.ny) % g.ny;
      CHECK(std::abs(t.value_at(i, j) - f.value_at(ii, jj)) < 1e-10);
    }
}

TEST_CASE("tail mass monitor flags data leaking to the x boundary") {
  const GridSpec g = make_grid(64, 8, 40.0, YDomain::Torus);
  const Field centered = Field::sample(g, [](double x, double) {
    return cplx(std::exp(-x * x), 0.0);
  });
  CHECK(tail_mass_fraction(centered) < 1e-10);
  const Field edge = Field::sample(g, [&](double x, double) {
    return cplx(std::exp(-std::pow(x - 19.0, 2)), 0.0);
  });
  CHECK(tail_mass_fraction(edge) > 0.5);
}
