#include "hwlab/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace hwlab {

namespace {

// e^{-i t (xi^2 + |eta|)} for every mode, in FFT index order
std::vector<cplx> free_flow_multiplier(const GridSpec& g, double t) {
  std::vector<cplx> mult(g.size());
  for (int k = 0; k < g.nx; ++k) {
    const double xi2 = g.xi(k) * g.xi(k);
    for (int m = 0; m < g.ny; ++m) {
      const double phase = -t * (xi2 + std::abs(g.eta(m)));
      mult[g.at(k, m)] = cplx(std::cos(phase), std::sin(phase));
    }
  }
  return mult;
}

void apply_nonlinear_phase(std::vector<cplx>& phys, double dt, const EquationParams& params) {
  const double coef = params.kappa() * params.nonlinear_coeff * dt;
  if (coef == 0.0) return;
  const bool linear_modulus = params.p == 2.0;
  for (cplx& z : phys) {
    const double a = std::abs(z);
    const double amp = linear_modulus ? a : (a > 0.0 ? std::pow(a, params.p - 1.0) : 0.0);
    const double phase = -coef * amp;
    z *= cplx(std::cos(phase), std::sin(phase));
  }
}

bool all_finite(const std::vector<cplx>& v) {
  for (const cplx& z : v)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  return true;
}

// nonlinear phase applied in physical space, optionally on a 3/2 zero-padded
// grid; input and output are coefficients on g
std::vector<cplx> nonlinear_substep(const GridSpec& g, const std::vector<cplx>& spec, double dt,
                                    const EquationParams& params) {
  if (!params.dealias) {
    auto phys = transform_inverse(g, spec);
    apply_nonlinear_phase(phys, dt, params);
    return transform_forward(g, phys);
  }
  GridSpec pg = g;
  pg.nx = 3 * g.nx / 2;
  pg.ny = 3 * g.ny / 2;
  auto embed = [&](int k, int m) {
    const int mk = g.mode_x(k), mm = g.mode_y(m);
    return pg.at(mk >= 0 ? mk : mk + pg.nx, mm >= 0 ? mm : mm + pg.ny);
  };
  std::vector<cplx> padded(pg.size());
  for (int k = 0; k < g.nx; ++k)
    for (int m = 0; m < g.ny; ++m) padded[embed(k, m)] = spec[g.at(k, m)];
  auto phys = transform_inverse(pg, padded);
  apply_nonlinear_phase(phys, dt, params);
  padded = transform_forward(pg, phys);
  std::vector<cplx> out(g.size());
  for (int k = 0; k < g.nx; ++k)
    for (int m = 0; m < g.ny; ++m) out[g.at(k, m)] = padded[embed(k, m)];
  return out;
}

} // namespace

EquationParams make_params(double p, Sign sign, double s) {
  if (!(p > 1.0) || !(p <= 5.0))
    throw std::invalid_argument("make_params: p must lie in (1, 5]");
  if (!(s >= 0.5) || !(s <= 1.0))
    throw std::invalid_argument("make_params: s must lie in [1/2, 1]");
  EquationParams e;
  e.p = p;
  e.sign = sign;
  e.s = s;
  e.extended_p = p > 2.0;
  return e;
}

Exponents Exponents::from_p(double p) {
  if (!(p > 1.0) || !(p < 5.0))
    throw std::invalid_argument("Exponents: p must lie in (1, 5)");
  Exponents e;
  e.q_prime = 4.0 / (5.0 - p);
  e.r_prime = 2.0 / p;
  e.q = 4.0 / (p - 1.0);
  e.r = (p == 2.0) ? std::numeric_limits<double>::infinity() : 2.0 / (2.0 - p);
  return e;
}

double ConservedLedger::relative_mass_drift() const {
  if (rows.size() < 2) return 0.0;
  const double m0 = rows.front().mass;
  double d = 0.0;
  for (const auto& r : rows) d = std::max(d, std::abs(r.mass - m0));
  return m0 != 0.0 ? d / std::abs(m0) : d;
}

double ConservedLedger::relative_energy_drift() const {
  if (rows.size() < 2) return 0.0;
  const double e0 = rows.front().energy;
  double d = 0.0;
  for (const auto& r : rows) d = std::max(d, std::abs(r.energy - e0));
  return e0 != 0.0 ? d / std::abs(e0) : d;
}

double mass(const Field& f) {
  const double l2 = norm(f, NormKind::l2());
  return 0.5 * l2 * l2;
}

double energy(const Field& f, const EquationParams& params) {
  const GridSpec& g = f.grid();
  double quad = 0.0;
  for (int k = 0; k < g.nx; ++k) {
    const double xi2 = g.xi(k) * g.xi(k);
    for (int m = 0; m < g.ny; ++m)
      quad += (xi2 + std::abs(g.eta(m))) * std::norm(f.coeff_at(k, m));
  }
  quad *= g.lx * g.ly;

  const double pp1 = params.p + 1.0;
  double nl = 0.0;
  for (const cplx& z : f.values()) nl += std::pow(std::abs(z), pp1);
  nl *= g.dx() * g.dy();

  // H_- subtracts the potential term, H_+ adds it
  const double sign = params.sign == Sign::Focusing ? -1.0 : 1.0;
  return 0.5 * quad + sign * params.nonlinear_coeff * nl / pp1;
}

LedgerRow ledger_row(const Field& f, double t, const EquationParams& params) {
  LedgerRow row;
  row.t = t;
  row.mass = mass(f);
  row.energy = energy(f, params);
  row.l2hs = norm(f, NormKind::l2_hs_y(params.s));
  row.h1l2 = norm(f, NormKind::h1_l2_y());
  row.linf = norm(f, NormKind::linf());
  // q' = 4/(5-p) is singular at the p = 5 endpoint; monitor the plain norm there
  const double q_prime = params.p < 5.0 ? Exponents::from_p(params.p).q_prime : 1.0;
  row.blowup_n = std::pow(row.l2hs, q_prime);
  return row;
}

Field linear_propagate(const Field& f, double t) {
  const GridSpec& g = f.grid();
  auto mult = free_flow_multiplier(g, t);
  std::vector<cplx> out(g.size());
  for (std::size_t n = 0; n < g.size(); ++n) out[n] = mult[n] * f.coefficients()[n];
  return Field::from_spectral(g, std::move(out));
}

Field nonlinear_step(const Field& f, double dt, const EquationParams& params) {
  if (!std::isfinite(dt)) throw std::invalid_argument("nonlinear_step: dt must be finite");
  if (params.dealias) {
    std::vector<cplx> spec(f.coefficients().begin(), f.coefficients().end());
    return Field::from_spectral(f.grid(), nonlinear_substep(f.grid(), spec, dt, params));
  }
  std::vector<cplx> phys(f.values().begin(), f.values().end());
  apply_nonlinear_phase(phys, dt, params);
  return Field::from_physical(f.grid(), std::move(phys));
}

Field strang_step(const Field& f, double dt, const EquationParams& params) {
  if (dt == 0.0 || !std::isfinite(dt))
    throw std::invalid_argument("strang_step: dt must be nonzero and finite");
  return linear_propagate(nonlinear_step(linear_propagate(f, 0.5 * dt), dt, params), 0.5 * dt);
}

EvolveResult evolve(const Field& u0, const EquationParams& params, const EvolveOptions& opts) {
  if (!u0.finite()) throw std::invalid_argument("evolve: initial data not finite");
  if (opts.sample_every < 1) throw std::invalid_argument("evolve: sample_every must be >= 1");

  const GridSpec& g = u0.grid();
  EvolveResult res{Field::zeros(g), {}, {}, false, 0.0, 0};

  int nsteps = 0;
  if (opts.T != 0.0) {
    if (opts.dt == 0.0 || !(opts.T / opts.dt > 0.0))
      throw std::invalid_argument("evolve: dt must be nonzero with the same sign as T");
    nsteps = static_cast<int>(std::llround(opts.T / opts.dt));
    if (nsteps < 1 || std::abs(nsteps * opts.dt - opts.T) > 1e-9 * std::abs(opts.T))
      throw std::invalid_argument("evolve: dt must divide T up to rounding");
  }

  auto observe = [&](const Field& u, double t) {
    res.ledger.rows.push_back(ledger_row(u, t, params));
    res.max_tail_fraction = std::max(res.max_tail_fraction, tail_mass_fraction(u));
    if (res.ledger.rows.back().blowup_n > opts.blowup_ceiling) res.blowup_suspected = true;
  };

  observe(u0, 0.0);
  if (nsteps == 0) {
    res.final_state = u0;
    return res;
  }

  const auto half = free_flow_multiplier(g, 0.5 * opts.dt);
  std::vector<cplx> spec(u0.coefficients().begin(), u0.coefficients().end());

  for (int step = 1; step <= nsteps; ++step) {
    for (std::size_t n = 0; n < g.size(); ++n) spec[n] *= half[n];
    // overflow in |u|^{p-1} is the one source of non-finite values
    try {
      spec = nonlinear_substep(g, spec, opts.dt, params);
    } catch (const std::invalid_argument&) {
      throw EvolveNanError(step);
    }
    if (!all_finite(spec)) throw EvolveNanError(step);
    for (std::size_t n = 0; n < g.size(); ++n) spec[n] *= half[n];

    const bool last = step == nsteps;
    const bool sampling = last || step % opts.sample_every == 0;
    if (!sampling) continue;

    if (!all_finite(spec)) throw EvolveNanError(step);
    Field u = Field::from_spectral(g, spec);
    const double t = step * opts.dt;
    observe(u, t);
    if (opts.snapshot_every > 0 && (last || step % opts.snapshot_every == 0))
      res.snapshots.emplace_back(t, u);
    if (last || res.blowup_suspected) {
      res.final_state = std::move(u);
      res.steps_taken = step;
      break;
    }
  }
  return res;
}

Field scaling_transform(const Field& f, double lambda, const EquationParams& params) {
  if (!(lambda > 0.0)) throw std::invalid_argument("scaling_transform: lambda must be positive");
  const GridSpec& g = f.grid();
  if (g.y_domain == YDomain::Torus && lambda != 1.0)
    throw std::invalid_argument("scaling_transform: torus y-domain does not scale");
  GridSpec scaled = g;
  scaled.lx = g.lx / lambda;
  scaled.ly = g.ly / (lambda * lambda);
  const double amp = std::pow(lambda, 2.0 / (params.p - 1.0));
  std::vector<cplx> coeffs(f.coefficients().begin(), f.coefficients().end());
  for (cplx& c : coeffs) c *= amp;
  return Field::from_spectral(scaled, std::move(coeffs));
}

} // namespace hwlab
