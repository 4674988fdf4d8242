#include "hwlab/groundstate.hpp"

#include <algorithm>
#include <cmath>

namespace hwlab {

namespace {

std::vector<cplx> pointwise_nonlinearity(const Field& q, double p) {
  std::vector<cplx> out(q.values().begin(), q.values().end());
  const bool linear_modulus = p == 2.0;
  for (cplx& z : out) {
    const double a = std::abs(z);
    z *= linear_modulus ? a : (a > 0.0 ? std::pow(a, p - 1.0) : 0.0);
  }
  return out;
}

// <(-dxx + |Dy|) v, v>_{L2}
double quadratic_form(const Field& v) {
  const GridSpec& g = v.grid();
  double acc = 0.0;
  for (int k = 0; k < g.nx; ++k) {
    const double xi2 = g.xi(k) * g.xi(k);
    for (int m = 0; m < g.ny; ++m)
      acc += (xi2 + std::abs(g.eta(m))) * std::norm(v.coeff_at(k, m));
  }
  return acc * g.lx * g.ly;
}

double lp1_integral(const Field& v, double p) {
  double acc = 0.0;
  for (const cplx& z : v.values()) acc += std::pow(std::abs(z), p + 1.0);
  return acc * v.grid().dx() * v.grid().dy();
}

} // namespace

Field line_soliton(double omega, const EquationParams& params, const GridSpec& grid) {
  if (!(omega > 0.0)) throw std::invalid_argument("line_soliton: omega must be positive");
  const double p = params.p;
  const double amp = std::pow(0.5 * (p + 1.0) * omega, 1.0 / (p - 1.0));
  const double rate = 0.5 * (p - 1.0) * std::sqrt(omega);
  const double shape = 2.0 / (p - 1.0);
  std::vector<cplx> v(grid.size());
  for (int i = 0; i < grid.nx; ++i) {
    const double sech = 1.0 / std::cosh(rate * grid.x(i));
    const double value = amp * std::pow(sech, shape);
    for (int j = 0; j < grid.ny; ++j) v[grid.at(i, j)] = value;
  }
  return Field::from_physical(grid, std::move(v));
}

double elliptic_residual(const Field& q, double omega, const EquationParams& params) {
  if (!(omega > 0.0)) throw std::invalid_argument("elliptic_residual: omega must be positive");
  const GridSpec& g = q.grid();
  auto nl = transform_forward(g, pointwise_nonlinearity(q, params.p));
  double acc = 0.0;
  for (int k = 0; k < g.nx; ++k) {
    const double xi2 = g.xi(k) * g.xi(k);
    for (int m = 0; m < g.ny; ++m) {
      const cplx r = (xi2 + std::abs(g.eta(m)) + omega) * q.coeff_at(k, m) - nl[g.at(k, m)];
      acc += std::norm(r);
    }
  }
  return std::sqrt(acc * g.lx * g.ly);
}

double energy_functional(const Field& v, double omega, const EquationParams& params) {
  if (!(omega > 0.0)) throw std::invalid_argument("energy_functional: omega must be positive");
  return 0.5 * quadratic_form(v) + 0.5 * omega * 2.0 * mass(v) -
         lp1_integral(v, params.p) / (params.p + 1.0);
}

double extract_omega(const Field& v, const EquationParams& params) {
  const double l2sq = 2.0 * mass(v);
  if (l2sq == 0.0) throw std::invalid_argument("extract_omega: zero field");
  return (lp1_integral(v, params.p) - quadratic_form(v)) / l2sq;
}

GroundState gradient_flow(const Field& initial, double eta, const EquationParams& params,
                          const GradientFlowOptions& opts) {
  if (!(eta > 0.0)) throw std::invalid_argument("gradient_flow: eta must be positive");
  if (params.sign != Sign::Focusing)
    throw std::invalid_argument("gradient_flow: minimization needs the focusing sign");
  if (mass(initial) == 0.0) throw std::invalid_argument("gradient_flow: zero initial field");
  if (!(opts.dt > 0.0) || !(opts.tol > 0.0) || opts.max_iter < 1)
    throw std::invalid_argument("gradient_flow: bad options");

  const GridSpec& g = initial.grid();
  const EquationParams focusing = params;

  std::vector<double> symbol(g.size());
  for (int k = 0; k < g.nx; ++k) {
    const double xi2 = g.xi(k) * g.xi(k);
    for (int m = 0; m < g.ny; ++m) symbol[g.at(k, m)] = xi2 + std::abs(g.eta(m));
  }

  auto renormalize = [&](std::vector<cplx> coeffs) {
    double l2sq = 0.0;
    for (const cplx& c : coeffs) l2sq += std::norm(c);
    l2sq *= g.lx * g.ly;
    const double r = std::sqrt(2.0 * eta / l2sq);
    for (cplx& c : coeffs) c *= r;
    return Field::from_spectral(g, std::move(coeffs));
  };

  Field v = renormalize({initial.coefficients().begin(), initial.coefficients().end()});

  GroundState gs{v, 0.0, 0.0, eta, 0, GroundStateSource::GradientFlow, false, 0.0};
  double h_prev = energy(v, focusing);

  for (int iter = 1; iter <= opts.max_iter; ++iter) {
    // shifting the resolvent by the Rayleigh estimate makes the constrained
    // critical point an exact fixed point of the discrete step
    const double mu = std::max(0.0, extract_omega(v, params));
    auto rhs = pointwise_nonlinearity(v, params.p);
    for (std::size_t n = 0; n < g.size(); ++n)
      rhs[n] = v.values()[n] + opts.dt * rhs[n];
    auto coeffs = transform_forward(g, rhs);
    for (std::size_t n = 0; n < g.size(); ++n)
      coeffs[n] /= 1.0 + opts.dt * (symbol[n] + mu);
    v = renormalize(std::move(coeffs));

    const double h_now = energy(v, focusing);
    gs.max_h_increase = std::max(gs.max_h_increase, h_now - h_prev);
    h_prev = h_now;

    gs.omega = extract_omega(v, params);
    gs.iterations = iter;
    if (gs.omega > 0.0) {
      gs.residual_l2 = elliptic_residual(v, gs.omega, params);
      if (gs.residual_l2 <= opts.tol) {
        gs.converged = true;
        break;
      }
    }
  }
  gs.profile = v;
  return gs;
}

Field rescale_ground_state(const Field& q1, double omega, const EquationParams& params) {
  if (!(omega > 0.0)) throw std::invalid_argument("rescale_ground_state: omega must be positive");
  const GridSpec& g = q1.grid();
  if (g.y_domain == YDomain::Torus && omega != 1.0)
    throw std::invalid_argument("rescale_ground_state: torus y-period does not scale");
  GridSpec scaled = g;
  scaled.lx = g.lx / std::sqrt(omega);
  scaled.ly = g.ly / omega;
  const double amp = std::pow(omega, 1.0 / (params.p - 1.0));
  std::vector<cplx> coeffs(q1.coefficients().begin(), q1.coefficients().end());
  for (cplx& c : coeffs) c *= amp;
  return Field::from_spectral(scaled, std::move(coeffs));
}

double omega_of_eta(double eta, double q1_l2sq, const EquationParams& params) {
  if (!(eta > 0.0) || !(q1_l2sq > 0.0))
    throw std::invalid_argument("omega_of_eta: eta and ||Q1||^2 must be positive");
  if (params.p == 7.0 / 3.0)
    throw std::invalid_argument("omega_of_eta: exponent is singular at p = 7/3");
  return std::pow(2.0 * eta / q1_l2sq, 2.0 * (params.p - 1.0) / (7.0 - 3.0 * params.p));
}

double omega_threshold(const EquationParams& params) {
  if (!(params.p > 1.0) || !(params.p <= 2.0))
    throw std::invalid_argument("omega_threshold: formula covers p in (1, 2]");
  return 4.0 / ((params.p - 1.0) * (params.p + 3.0));
}

GroundState solve_for_omega(double omega_target, const EquationParams& params,
                            const GridSpec& grid, const GradientFlowOptions& opts,
                            double omega_tol, int max_bisections) {
  if (!(omega_target > 0.0))
    throw std::invalid_argument("solve_for_omega: omega must be positive");
  const Field seed = line_soliton(omega_target, params, grid);
  double eta = mass(seed);
  GroundState gs = gradient_flow(seed, eta, params, opts);
  if (std::abs(gs.omega - omega_target) <= omega_tol) return gs;

  // omega(eta) is increasing; expand a bracket, then bisect
  double lo = eta, hi = eta;
  GroundState lo_gs = gs, hi_gs = gs;
  for (int guard = 0; lo_gs.omega > omega_target; ++guard) {
    if (guard >= 60) throw std::runtime_error("solve_for_omega: lower bracket not found");
    lo *= 0.5;
    lo_gs = gradient_flow(seed, lo, params, opts);
  }
  for (int guard = 0; hi_gs.omega < omega_target; ++guard) {
    if (guard >= 60) throw std::runtime_error("solve_for_omega: upper bracket not found");
    hi *= 2.0;
    hi_gs = gradient_flow(seed, hi, params, opts);
  }
  for (int b = 0; b < max_bisections; ++b) {
    const double mid = 0.5 * (lo + hi);
    gs = gradient_flow(seed, mid, params, opts);
    if (std::abs(gs.omega - omega_target) <= omega_tol) return gs;
    (gs.omega < omega_target ? lo : hi) = mid;
  }
  return gs;
}

double y_energy_fraction(const Field& f) {
  const GridSpec& g = f.grid();
  double total = 0.0, zero_mode = 0.0;
  for (int k = 0; k < g.nx; ++k)
    for (int m = 0; m < g.ny; ++m) {
      const double a = std::norm(f.coeff_at(k, m));
      total += a;
      if (g.mode_y(m) == 0) zero_mode += a;
    }
  return total > 0.0 ? 1.0 - zero_mode / total : 0.0;
}

std::vector<OmegaSweepPoint> omega_sweep(const std::vector<double>& omegas,
                                         const EquationParams& params, const GridSpec& grid,
                                         const GradientFlowOptions& opts,
                                         double perturbation_amp) {
  std::vector<OmegaSweepPoint> out;
  for (double w : omegas) {
    const Field base = line_soliton(w, params, grid);
    std::vector<cplx> v(base.values().begin(), base.values().end());
    for (int i = 0; i < grid.nx; ++i)
      for (int j = 0; j < grid.ny; ++j)
        v[grid.at(i, j)] *= 1.0 + perturbation_amp * std::cos(two_pi * grid.y(j) / grid.ly);
    GroundState gs = gradient_flow(Field::from_physical(grid, std::move(v)), mass(base), params, opts);
    OmegaSweepPoint pt;
    pt.omega_target = w;
    pt.omega_est = gs.omega;
    pt.residual_l2 = gs.residual_l2;
    pt.y_fraction = y_energy_fraction(gs.profile);
    pt.line_like = pt.y_fraction < 1e-6;
    out.push_back(pt);
  }
  return out;
}

} // namespace hwlab
