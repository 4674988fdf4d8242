#include "hwlab/duhamel.hpp"

#include <algorithm>
#include <cmath>

namespace hwlab {

namespace {

// kappa * coeff * |u|^{p-1} u at one node, as spectral coefficients
std::vector<cplx> nonlinearity_coeffs(const Field& u, const EquationParams& params) {
  const GridSpec& g = u.grid();
  const double coef = params.kappa() * params.nonlinear_coeff;
  std::vector<cplx> phys(u.values().begin(), u.values().end());
  const bool linear_modulus = params.p == 2.0;
  for (cplx& z : phys) {
    const double a = std::abs(z);
    const double amp = linear_modulus ? a : (a > 0.0 ? std::pow(a, params.p - 1.0) : 0.0);
    z *= coef * amp;
  }
  return transform_forward(g, phys);
}

void check_nodes(const Trajectory& traj) {
  if (traj.fields.empty() || traj.times.size() != traj.fields.size())
    throw std::invalid_argument("trajectory: inconsistent node arrays");
  if (traj.times.front() != 0.0)
    throw std::invalid_argument("trajectory: times must start at 0");
}

} // namespace

double trajectory_norm(const Trajectory& traj, double s) {
  double m = 0.0;
  for (const Field& f : traj.fields) m = std::max(m, norm(f, NormKind::aniso_hs(s)));
  return m;
}

double trajectory_distance(const Trajectory& a, const Trajectory& b, double s) {
  if (a.nodes() != b.nodes())
    throw std::invalid_argument("trajectory_distance: node count mismatch");
  const GridSpec& g = a.grid();
  double m = 0.0;
  for (int n = 0; n < a.nodes(); ++n) {
    std::vector<cplx> d(g.size());
    for (std::size_t idx = 0; idx < g.size(); ++idx)
      d[idx] = a.fields[n].coefficients()[idx] - b.fields[n].coefficients()[idx];
    m = std::max(m, norm(Field::from_spectral(g, std::move(d)), NormKind::aniso_hs(s)));
  }
  return m;
}

Trajectory free_trajectory(const Field& u0, double T, int nodes_minus_one) {
  if (!(T > 0.0)) throw std::invalid_argument("free_trajectory: T must be positive");
  if (nodes_minus_one < 1) throw std::invalid_argument("free_trajectory: need at least 2 nodes");
  Trajectory traj;
  const double dt = T / nodes_minus_one;
  for (int n = 0; n <= nodes_minus_one; ++n) {
    traj.times.push_back(n * dt);
    traj.fields.push_back(linear_propagate(u0, n * dt));
  }
  return traj;
}

Trajectory apply_phi(const Trajectory& traj, const Field& u0, const EquationParams& params) {
  check_nodes(traj);
  const GridSpec& g = traj.grid();
  if (!(u0.grid() == g)) throw std::invalid_argument("apply_phi: u0 grid mismatch");
  for (const Field& f : traj.fields)
    if (!f.finite()) throw std::invalid_argument("apply_phi: non-finite trajectory node");

  const int nodes = traj.nodes();
  const double dt = traj.times.back() / (nodes - 1);

  // g_n = e^{-i t_n L} G(u(t_n)) in coefficients
  std::vector<std::vector<cplx>> integrand(nodes);
  for (int n = 0; n < nodes; ++n) {
    auto gn = nonlinearity_coeffs(traj.fields[n], params);
    const double t = traj.times[n];
    for (int k = 0; k < g.nx; ++k) {
      const double xi2 = g.xi(k) * g.xi(k);
      for (int m = 0; m < g.ny; ++m) {
        const double phase = t * (xi2 + std::abs(g.eta(m)));
        gn[g.at(k, m)] *= cplx(std::cos(phase), std::sin(phase));
      }
    }
    integrand[n] = std::move(gn);
  }

  Trajectory out;
  out.times = traj.times;
  out.fields.reserve(nodes);

  std::vector<cplx> integral(g.size(), 0.0);
  const cplx minus_i(0.0, -1.0);
  for (int n = 0; n < nodes; ++n) {
    if (n > 0)
      for (std::size_t idx = 0; idx < g.size(); ++idx)
        integral[idx] += 0.5 * dt * (integrand[n - 1][idx] + integrand[n][idx]);
    // w_n = u0 - i * integral, then back to the lab frame
    std::vector<cplx> wn(g.size());
    for (std::size_t idx = 0; idx < g.size(); ++idx)
      wn[idx] = u0.coefficients()[idx] + minus_i * integral[idx];
    const double t = traj.times[n];
    for (int k = 0; k < g.nx; ++k) {
      const double xi2 = g.xi(k) * g.xi(k);
      for (int m = 0; m < g.ny; ++m) {
        const double phase = -t * (xi2 + std::abs(g.eta(m)));
        wn[g.at(k, m)] *= cplx(std::cos(phase), std::sin(phase));
      }
    }
    out.fields.push_back(Field::from_spectral(g, std::move(wn)));
  }
  return out;
}

ContractionReport picard_solve(const Field& u0, const EquationParams& params, double T,
                               int nodes_minus_one, int max_iter, double tol) {
  if (!(T > 0.0)) throw std::invalid_argument("picard_solve: T must be positive");
  if (nodes_minus_one < 8) throw std::invalid_argument("picard_solve: need M >= 8");
  if (max_iter < 1) throw std::invalid_argument("picard_solve: max_iter must be >= 1");

  ContractionReport report;
  Trajectory current = free_trajectory(u0, T, nodes_minus_one);

  int growth_streak = 0;
  for (int iter = 1; iter <= max_iter; ++iter) {
    Trajectory next = apply_phi(current, u0, params);
    const double d = trajectory_distance(next, current, params.s);
    report.diffs.push_back(d);
    report.iterations = iter;
    current = std::move(next);

    if (d <= tol) {
      report.converged = true;
      break;
    }
    const std::size_t n = report.diffs.size();
    if (n >= 2 && report.diffs[n - 1] > report.diffs[n - 2]) {
      if (++growth_streak >= 3) {
        report.diverged = true;
        break;
      }
    } else {
      growth_streak = 0;
    }
  }

  std::vector<double> ratios;
  for (std::size_t n = 1; n < report.diffs.size(); ++n)
    if (report.diffs[n - 1] > 0.0) ratios.push_back(report.diffs[n] / report.diffs[n - 1]);
  if (!ratios.empty()) {
    std::sort(ratios.begin(), ratios.end());
    report.rho = ratios[ratios.size() / 2];
  }
  report.trajectory = std::move(current);
  return report;
}

} // namespace hwlab
