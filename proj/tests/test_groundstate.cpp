#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hwlab/dynamics.hpp"
#include "hwlab/groundstate.hpp"
#include "test_util.hpp"

#include <cmath>

using namespace hwlab;
using namespace hwlab::test;

namespace {

const EquationParams kFocusing = make_params(2.0, Sign::Focusing, 0.5);

// dense 4th-order finite differences on the closed-form profile; a check on
// the formula that never touches the spectral code
double fd_residual(double omega, double p, double half_width = 40.0, int n = 20000) {
  const double h = 2.0 * half_width / n;
  const double amp = std::pow(0.5 * (p + 1.0) * omega, 1.0 / (p - 1.0));
  const double rate = 0.5 * (p - 1.0) * std::sqrt(omega);
  const double shape = 2.0 / (p - 1.0);
  auto R = [&](double x) { return amp * std::pow(1.0 / std::cosh(rate * x), shape); };
  double acc = 0.0;
  for (int i = 2; i < n - 2; ++i) {
    const double x = -half_width + i * h;
    const double rxx =
        (-R(x - 2 * h) + 16 * R(x - h) - 30 * R(x) + 16 * R(x + h) - R(x + 2 * h)) /
        (12 * h * h);
    const double r = -rxx + omega * R(x) - std::pow(R(x), p);
    acc += r * r * h;
  }
  return std::sqrt(acc);
}

} // namespace

TEST_CASE("line soliton formula: peak value, y-independence, mass") {
  const GridSpec g = make_grid(512, 8, 80.0, YDomain::Torus);
  const Field r1 = line_soliton(1.0, kFocusing, g);

  // peak ((p+1) w / 2)^{1/(p-1)} = 1.5 at x = 0 for p = 2, w = 1
  CHECK(norm(r1, NormKind::linf()) == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(norm(apply_symbol(r1, Symbol::AbsDy), NormKind::l2()) < 1e-12);

  // mass 6 pi w^{3/2}: oracle quadrature of the profile itself
  const double prof = quad_1d([](double x) {
    return std::pow(1.5 / std::pow(std::cosh(0.5 * x), 2), 2);
  }, -40.0, 40.0);
  CHECK(rel_err(mass(r1), 0.5 * two_pi * prof) < 1e-9);
  CHECK(mass(r1) == doctest::Approx(6.0 * 3.141592653589793).epsilon(1e-8));

  CHECK_THROWS_AS(line_soliton(-1.0, kFocusing, g), std::invalid_argument);
}

TEST_CASE("elliptic residual: zero field, true profile, detuned frequency") {
  const GridSpec g = make_grid(512, 16, 80.0, YDomain::Torus);
  CHECK(elliptic_residual(Field::zeros(g), 1.0, kFocusing) == 0.0);

  const Field r1 = line_soliton(1.0, kFocusing, g);
  CHECK(elliptic_residual(r1, 1.0, kFocusing) <= 1e-8);

  // independent dense substitution oracle for the same profile
  CHECK(fd_residual(1.0, 2.0) <= 1e-7);

  const double wrong = elliptic_residual(r1, 2.0, kFocusing);
  CHECK(wrong >= 0.1 * norm(r1, NormKind::l2()));
}

TEST_CASE("energy functional identity E_w = H_- + w M") {
  const GridSpec g = make_grid(32, 16, 15.0, YDomain::Torus);
  CHECK(energy_functional(Field::zeros(g), 0.7, kFocusing) == 0.0);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Field v = noise_field(g, 300 + seed);
    for (double w : {0.3, 1.0, 2.5}) {
      const double lhs = energy_functional(v, w, kFocusing);
      const double rhs = energy(v, kFocusing) + w * mass(v);
      CHECK(rel_err(lhs, rhs) < 1e-12);
    }
  }

  // 1D reduction oracle for the line soliton value
  const GridSpec fine = make_grid(512, 8, 80.0, YDomain::Torus);
  const Field r1 = line_soliton(1.0, kFocusing, fine);
  auto prof = [](double x) { return 1.5 / std::pow(std::cosh(0.5 * x), 2); };
  auto dprof = [&](double x) {
    return -1.5 * std::tanh(0.5 * x) / std::pow(std::cosh(0.5 * x), 2);
  };
  const double dx2 = quad_1d([&](double x) { return dprof(x) * dprof(x); }, -40.0, 40.0);
  const double l22 = quad_1d([&](double x) { return prof(x) * prof(x); }, -40.0, 40.0);
  const double l33 = quad_1d([&](double x) { return std::pow(prof(x), 3); }, -40.0, 40.0);
  const double oracle = two_pi * (0.5 * dx2 + 0.5 * l22 - l33 / 3.0);
  CHECK(rel_err(energy_functional(r1, 1.0, kFocusing), oracle) < 1e-8);
}

TEST_CASE("gradient flow: fixed point at the line soliton") {
  const GridSpec g = make_grid(256, 16, 80.0, YDomain::Torus);
  const Field r = line_soliton(0.3, kFocusing, g);
  const GroundState gs = gradient_flow(r, mass(r), kFocusing, {0.5, 1e-7, 5000});
  CHECK(gs.converged);
  CHECK(std::abs(gs.omega - 0.3) < 1e-3);
  CHECK(gs.iterations < 200);
  CHECK(rel_err(mass(gs.profile), gs.eta) < 1e-10);
  CHECK(gs.max_h_increase <= 1e-12);
}

TEST_CASE("gradient flow: y-perturbed start returns to the line profile") {
  const GridSpec g = make_grid(256, 16, 80.0, YDomain::Torus);
  const Field r = line_soliton(0.3, kFocusing, g);
  std::vector<cplx> v(r.values().begin(), r.values().end());
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) v[g.at(i, j)] *= 1.0 + 0.1 * std::cos(g.y(j));
  const GroundState gs =
      gradient_flow(Field::from_physical(g, std::move(v)), mass(r), kFocusing, {0.5, 1e-7, 20000});
  CHECK(gs.converged);
  CHECK(std::abs(gs.omega - 0.3) <= 1e-3);
  CHECK(rel_l2(gs.profile, line_soliton(gs.omega, kFocusing, g)) <= 1e-3);
  CHECK(y_energy_fraction(gs.profile) < 1e-8);
}

TEST_CASE("gradient flow preconditions") {
  const GridSpec g = make_grid(64, 8, 40.0, YDomain::Torus);
  const Field r = line_soliton(0.5, kFocusing, g);
  CHECK_THROWS_AS(gradient_flow(r, -1.0, kFocusing, {}), std::invalid_argument);
  CHECK_THROWS_AS(gradient_flow(r, 1.0, make_params(2.0, Sign::Defocusing), {}),
                  std::invalid_argument);
  CHECK_THROWS_AS(gradient_flow(Field::zeros(g), 1.0, kFocusing, {}), std::invalid_argument);
}

TEST_CASE("rescale: identity, amplitude exponent, residual carried to the new grid") {
  const GridSpec g = make_grid(256, 16, 60.0, YDomain::TruncatedLine, 30.0);
  const Field q1 = line_soliton(1.0, kFocusing, g);

  CHECK(rel_l2(rescale_ground_state(q1, 1.0, kFocusing), q1) == 0.0);

  const Field q4 = rescale_ground_state(q1, 4.0, kFocusing);
  CHECK(rel_err(norm(q4, NormKind::linf()), 4.0 * norm(q1, NormKind::linf())) < 1e-12);
  CHECK(q4.grid().lx == doctest::Approx(30.0));
  CHECK(q4.grid().ly == doctest::Approx(7.5));

  // the rescaled profile solves the elliptic equation at the new frequency
  const double res1 = elliptic_residual(q1, 1.0, kFocusing);
  const double res4 = elliptic_residual(q4, 4.0, kFocusing);
  CHECK(res4 <= 1e-6 + 100.0 * res1);

  const GridSpec torus = make_grid(64, 8, 40.0, YDomain::Torus);
  CHECK_THROWS_AS(rescale_ground_state(line_soliton(1.0, kFocusing, torus), 2.0, kFocusing),
                  std::invalid_argument);
}

TEST_CASE("omega(eta) formula and scaling consistency") {
  const EquationParams p2 = kFocusing;
  // base of the power: 2 eta = ||Q1||^2 gives omega = 1
  CHECK(omega_of_eta(3.5, 7.0, p2) == doctest::Approx(1.0).epsilon(1e-14));
  // p = 2 exponent is 2(p-1)/(7-3p) = 2
  CHECK(omega_of_eta(7.0, 7.0, p2) == doctest::Approx(4.0).epsilon(1e-13));
  CHECK_THROWS_AS(omega_of_eta(-1.0, 1.0, p2), std::invalid_argument);
  CHECK_THROWS_AS(omega_of_eta(1.0, 1.0, make_params(7.0 / 3.0, Sign::Focusing)),
                  std::invalid_argument);

  // mass(rescale(Q1, omega(eta))) recovers eta
  const GridSpec g = make_grid(512, 16, 120.0, YDomain::TruncatedLine, 40.0);
  const Field q1 = line_soliton(1.0, p2, g);
  const double q1sq = 2.0 * mass(q1);
  for (double eta : {0.3 * q1sq, 0.5 * q1sq, 0.6 * q1sq}) {
    const double w = omega_of_eta(eta, q1sq, p2);
    const Field qw = rescale_ground_state(q1, w, p2);
    CHECK(rel_err(mass(qw), eta) < 1e-6);
  }
}

TEST_CASE("omega threshold formula") {
  CHECK(omega_threshold(make_params(2.0, Sign::Focusing)) == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(omega_threshold(make_params(1.5, Sign::Focusing)) ==
        doctest::Approx(4.0 / (0.5 * 4.5)).epsilon(1e-14));
  // p -> 1+ blows up; evaluate the formula independently at p = 1.01
  const double p = 1.01;
  const double oracle = 4.0 / ((p - 1.0) * (p + 3.0));
  CHECK(omega_threshold(make_params(p, Sign::Focusing)) == doctest::Approx(oracle).epsilon(1e-13));
  CHECK(oracle > 20.0);
  CHECK_THROWS_AS(omega_threshold(make_params(2.5, Sign::Focusing)), std::invalid_argument);
}

TEST_CASE("a converged ground state rotates in place under the flow") {
  const GridSpec g = make_grid(128, 16, 60.0, YDomain::Torus);
  const Field seed = line_soliton(0.3, kFocusing, g);
  const GroundState gs = gradient_flow(seed, mass(seed), kFocusing, {0.5, 1e-6, 10000});
  REQUIRE(gs.converged);

  const double q_l2 = norm(gs.profile, NormKind::l2());
  const EvolveResult run = evolve(gs.profile, kFocusing, {2.0, 1e-3, 500, 500, 1e12});
  double worst = 0.0;
  for (const auto& [t, u] : run.snapshots) {
    // modulus comparison: |u(t)| should track |Q| regardless of phase
    double d2 = 0.0;
    for (std::size_t n = 0; n < g.size(); ++n) {
      const double d = std::abs(u.values()[n]) - std::abs(gs.profile.values()[n]);
      d2 += d * d;
    }
    worst = std::max(worst, std::sqrt(d2 * g.dx() * g.dy()) / q_l2);
  }
  const double budget = 10.0 * gs.residual_l2 / q_l2 + 1e-4;
  CHECK(worst <= budget);
}

TEST_CASE("frequency targeting via the eta bisection helper") {
  const GridSpec g = make_grid(256, 16, 80.0, YDomain::Torus);
  const GroundState gs = solve_for_omega(0.4, kFocusing, g, {0.5, 1e-7, 5000}, 1e-4, 30);
  CHECK(std::abs(gs.omega - 0.4) <= 1e-4);
  CHECK(gs.converged);
}

TEST_CASE("sweep classifies a below-threshold frequency as line-like") {
  const GridSpec g = make_grid(128, 16, 60.0, YDomain::Torus);
  const auto pts = omega_sweep({0.3}, kFocusing, g, {0.5, 1e-6, 20000});
  REQUIRE(pts.size() == 1);
  CHECK(pts[0].line_like);
  // the empirical stable frequency sits inside (0, omega_p]
  CHECK(pts[0].omega_target > 0.0);
  CHECK(pts[0].omega_target <= omega_threshold(kFocusing));
}
