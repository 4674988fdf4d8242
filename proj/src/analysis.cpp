#include "hwlab/analysis.hpp"

#include "hwlab/parallel.hpp"
#include "hwlab/random.hpp"

#include <algorithm>
#include <cmath>

namespace hwlab {

namespace {

bool mode_retained(const SpectrumSpec& sp, double xi, double eta) {
  if (sp.kind == SpectrumSpec::Kind::BandLimited)
    return std::abs(xi) <= sp.cutoff_xi && std::abs(eta) <= sp.cutoff_eta;
  return true;
}

double envelope(const SpectrumSpec& sp, double xi, double eta) {
  if (sp.kind == SpectrumSpec::Kind::BandLimited) return 1.0;
  return std::pow(1.0 + xi * xi + eta * eta, -0.5 * sp.alpha);
}

// index-order coefficients -> physical samples, 1D, with the same
// [-len/2, len/2) phase convention as the 2D grid
std::vector<cplx> line_inverse(int n, const std::vector<cplx>& coeffs) {
  std::vector<cplx> in(n);
  for (int k = 0; k < n; ++k) {
    const int mode = k < n / 2 ? k : k - n;
    in[k] = (mode % 2 == 0 ? 1.0 : -1.0) * coeffs[k];
  }
  return dft1_unnormalized(n, in, false);
}

std::vector<cplx> line_forward(const LineField& f) {
  const int n = f.n();
  auto out = dft1_unnormalized(n, f.values, true);
  const double scale = 1.0 / n;
  for (int k = 0; k < n; ++k) {
    const int mode = k < n / 2 ? k : k - n;
    out[k] *= (mode % 2 == 0 ? scale : -scale);
  }
  return out;
}

double line_xi(int n, double length, int k) {
  const int mode = k < n / 2 ? k : k - n;
  return two_pi * mode / length;
}

// max over an ensemble of a per-sample ratio; NaN samples are skipped
template <class Fn>
std::pair<double, int> ensemble_max(int count, Fn&& ratio_of) {
  std::vector<double> ratios(count);
  parallel_for(count, [&](int i) { ratios[i] = ratio_of(i); });
  double best = 0.0;
  int worst = -1;
  for (int i = 0; i < count; ++i) {
    if (std::isnan(ratios[i])) continue;
    if (!std::isfinite(ratios[i]))
      throw std::runtime_error("inequality check produced a non-finite ratio");
    if (ratios[i] > best) {
      best = ratios[i];
      worst = i;
    }
  }
  return {best, worst};
}

template <class Fn>
RatioReport run_protocol(const std::string& id, const Ensemble& ens, Fn&& ratio_of) {
  if (ens.count < 1) throw std::invalid_argument("check: ensemble must have samples");
  RatioReport rep;
  rep.id = id;
  const Ensemble hold = ens.holdout();
  auto [cal, cal_worst] = ensemble_max(ens.count, [&](int i) { return ratio_of(ens, i); });
  (void)cal_worst;
  auto [held, worst] = ensemble_max(hold.count, [&](int i) { return ratio_of(hold, i); });
  rep.c_cal = cal;
  rep.holdout_max = held;
  rep.worst_index = worst;
  rep.pass = held <= rep.margin * cal;
  return rep;
}

} // namespace

Field Ensemble::field(int index) const {
  SplitMix64 stream(SplitMix64::substream(seed, static_cast<std::uint64_t>(index)));
  std::vector<cplx> coeffs(grid.size());
  for (int k = 0; k < grid.nx; ++k) {
    const double xi = grid.xi(k);
    for (int m = 0; m < grid.ny; ++m) {
      const double eta = grid.eta(m);
      if (!mode_retained(spectrum, xi, eta)) continue;
      coeffs[grid.at(k, m)] = stream.next_gaussian_pair() * envelope(spectrum, xi, eta);
    }
  }
  return Field::from_spectral(grid, std::move(coeffs));
}

Ensemble Ensemble::holdout() const {
  Ensemble h = *this;
  h.seed = seed + 1;
  return h;
}

LineField line_sample(int n, double length, const SpectrumSpec& spectrum, std::uint64_t seed,
                      int index) {
  SplitMix64 stream(SplitMix64::substream(seed, static_cast<std::uint64_t>(index)) ^
                    0x11D11D11D11D11D1ULL);
  std::vector<cplx> coeffs(n);
  for (int k = 0; k < n; ++k) {
    const double xi = line_xi(n, length, k);
    if (!mode_retained(spectrum, xi, 0.0)) continue;
    coeffs[k] = stream.next_gaussian_pair() * envelope(spectrum, xi, 0.0);
  }
  return LineField{length, line_inverse(n, coeffs)};
}

double line_norm_lp(const LineField& f, double p) {
  if (p < 1.0) throw std::invalid_argument("line_norm_lp: p >= 1 required");
  double acc = 0.0;
  for (const cplx& z : f.values) acc += std::pow(std::abs(z), p);
  return std::pow(acc * f.dx(), 1.0 / p);
}

double line_norm_linf(const LineField& f) {
  double m = 0.0;
  for (const cplx& z : f.values) m = std::max(m, std::abs(z));
  return m;
}

double line_norm_hs(const LineField& f, double s) {
  const auto coeffs = line_forward(f);
  const int n = f.n();
  double acc = 0.0;
  for (int k = 0; k < n; ++k) {
    const double xi = line_xi(n, f.length, k);
    acc += std::pow(1.0 + xi * xi, s) * std::norm(coeffs[k]);
  }
  return std::sqrt(acc * f.length);
}

double ratio_brezis_gallouet(const Field& v, double s, bool plane_2d) {
  const GridSpec& g = v.grid();
  if (plane_2d) {
    if (!(s > 1.0)) throw std::invalid_argument("brezis_gallouet 2d: s > 1 required");
    // L1 of the full transform against the H^1 log kernel
    double lhs = 0.0;
    for (const cplx& c : v.coefficients()) lhs += std::abs(c);
    lhs *= (two_pi / g.lx) * (two_pi / g.ly);
    const double n1 = norm(v, NormKind::full_hs(1.0));
    const double ns = norm(v, NormKind::full_hs(s));
    if (n1 == 0.0) return std::nan("");
    return lhs / (n1 * std::sqrt(std::log1p(ns / n1)));
  }
  if (!(s > 0.5)) throw std::invalid_argument("brezis_gallouet: s > 1/2 required");
  // sum over y-modes of the L2_x norm of each mode function
  double lhs = 0.0;
  for (int m = 0; m < g.ny; ++m) {
    double row = 0.0;
    for (int k = 0; k < g.nx; ++k) row += std::norm(v.coeff_at(k, m));
    lhs += std::sqrt(row * g.lx);
  }
  const double n_half = norm(v, NormKind::l2_hs_y(0.5));
  const double n_s = norm(v, NormKind::l2_hs_y(s));
  if (n_half == 0.0) return std::nan("");
  return lhs / (n_half * std::sqrt(std::log1p(n_s / n_half)));
}

double ratio_strichartz(const Field& u0, double q, double r, double T, int time_intervals) {
  if (std::abs(2.0 / q + 1.0 / r - 0.5) > 1e-12 || !(q > 2.0))
    throw std::invalid_argument("strichartz: pair must satisfy 2/q + 1/r = 1/2, q > 2");
  if (time_intervals < 64)
    throw std::invalid_argument("strichartz: need at least 64 time quadrature intervals");
  const GridSpec& g = u0.grid();
  const double l2 = norm(u0, NormKind::l2());
  if (l2 == 0.0) return std::nan("");

  const double dt = T / time_intervals;
  double time_acc = 0.0;
  std::vector<cplx> spec(u0.coefficients().begin(), u0.coefficients().end());
  for (int l = 0; l <= time_intervals; ++l) {
    const double t = l * dt;
    std::vector<cplx> st(g.size());
    for (int k = 0; k < g.nx; ++k) {
      const double xi2 = g.xi(k) * g.xi(k);
      for (int m = 0; m < g.ny; ++m) {
        const double phase = -t * (xi2 + std::abs(g.eta(m)));
        st[g.at(k, m)] = spec[g.at(k, m)] * cplx(std::cos(phase), std::sin(phase));
      }
    }
    const auto phys = transform_inverse(g, st);
    // ||u(t, x, .)||_{L2_y} per column, then the L^r_x norm
    double gt = 0.0;
    if (std::isinf(r)) {
      for (int i = 0; i < g.nx; ++i) {
        double col = 0.0;
        for (int j = 0; j < g.ny; ++j) col += std::norm(phys[g.at(i, j)]);
        gt = std::max(gt, std::sqrt(col * g.dy()));
      }
    } else {
      double acc = 0.0;
      for (int i = 0; i < g.nx; ++i) {
        double col = 0.0;
        for (int j = 0; j < g.ny; ++j) col += std::norm(phys[g.at(i, j)]);
        acc += std::pow(std::sqrt(col * g.dy()), r);
      }
      gt = std::pow(acc * g.dx(), 1.0 / r);
    }
    const double wq = (l == 0 || l == time_intervals) ? 0.5 : 1.0;
    time_acc += wq * dt * std::pow(gt, q);
  }
  return std::pow(time_acc, 1.0 / q) / l2;
}

double ratio_quadratic_h2(const Field& g) {
  const double linf = norm(g, NormKind::linf());
  if (linf == 0.0) return std::nan("");
  std::vector<cplx> nl(g.values().begin(), g.values().end());
  for (cplx& z : nl) z *= std::abs(z);
  const Field gg = Field::from_physical(g.grid(), std::move(nl));
  const double h2 = norm(g, NormKind::full_hs(2.0));
  if (h2 == 0.0) return std::nan("");
  return norm(gg, NormKind::full_hs(2.0)) / (linf * h2);
}

double ratio_holder_chain(const Field& u, double p) {
  const double l2 = norm(u, NormKind::l2());
  if (l2 == 0.0) return std::nan("");
  const double lp1 = norm(u, NormKind::lp(p + 1.0));
  const double l6 = norm(u, NormKind::lp(6.0));
  const double theta = 3.0 / (p + 1.0) - 0.5;
  return lp1 / (std::pow(l2, theta) * std::pow(l6, 1.5 - 3.0 / (p + 1.0)));
}

double ratio_l6_embedding(const Field& u) {
  const double w = norm(u, NormKind::aniso_hs(0.5));
  if (w == 0.0) return std::nan("");
  return norm(u, NormKind::lp(6.0)) / w;
}

double ratio_trudinger(const LineField& u, int k) {
  if (k <= 2) throw std::invalid_argument("trudinger: k > 2 required");
  const double h_half = line_norm_hs(u, 0.5);
  if (h_half == 0.0) return std::nan("");
  return line_norm_lp(u, k) / (std::sqrt(static_cast<double>(k)) * h_half);
}

double ratio_nonlinearity_sobolev(const LineField& f, double s, double p) {
  if (!(s > 0.0) || !(s <= 1.0))
    throw std::invalid_argument("nonlinearity_sobolev: s in (0, 1] required");
  if (!(p > 1.0)) throw std::invalid_argument("nonlinearity_sobolev: p > 1 required");
  const double linf = line_norm_linf(f);
  const double hs = line_norm_hs(f, s);
  if (linf == 0.0 || hs == 0.0) return std::nan("");
  LineField nl{f.length, f.values};
  for (cplx& z : nl.values) {
    const double a = std::abs(z);
    z *= (a > 0.0 ? std::pow(a, p - 1.0) : 0.0);
  }
  return line_norm_hs(nl, s) / (std::pow(linf, p - 1.0) * hs);
}

RatioReport check_brezis_gallouet(const Ensemble& ens, double s, bool plane_2d) {
  auto rep = run_protocol(plane_2d ? "brezis_gallouet_2d" : "brezis_gallouet", ens,
                          [&](const Ensemble& e, int i) {
                            return ratio_brezis_gallouet(e.field(i), s, plane_2d);
                          });
  rep.note = "s=" + std::to_string(s);
  return rep;
}

RatioReport check_trudinger(const Ensemble& ens, const std::vector<int>& k_values) {
  if (k_values.empty()) throw std::invalid_argument("trudinger: empty k list");
  for (int k : k_values)
    if (k <= 2 || k > 64)
      throw std::invalid_argument("trudinger: k values must lie in (2, 64]");
  auto rep = run_protocol("trudinger", ens, [&](const Ensemble& e, int i) {
    const LineField u = line_sample(e.grid.nx, e.grid.lx, e.spectrum, e.seed, i);
    double best = std::nan("");
    for (int k : k_values) {
      const double r = ratio_trudinger(u, k);
      if (std::isnan(best) || (!std::isnan(r) && r > best)) best = r;
    }
    return best;
  });
  rep.note = "k in [" + std::to_string(k_values.front()) + ", " + std::to_string(k_values.back()) + "]";
  return rep;
}

RatioReport check_strichartz(const Ensemble& ens, double q, double r, double T,
                             int time_intervals) {
  auto rep = run_protocol("strichartz", ens, [&](const Ensemble& e, int i) {
    return ratio_strichartz(e.field(i), q, r, T, time_intervals);
  });
  rep.id = "strichartz_q" + std::to_string(static_cast<int>(q)) + "_r" +
           (std::isinf(r) ? std::string("inf") : std::to_string(static_cast<int>(r)));
  rep.note = "T=" + std::to_string(T);
  return rep;
}

RatioReport check_nonlinearity_sobolev(const Ensemble& ens, double s, double p) {
  auto rep = run_protocol("nonlinearity_sobolev", ens, [&](const Ensemble& e, int i) {
    return ratio_nonlinearity_sobolev(line_sample(e.grid.nx, e.grid.lx, e.spectrum, e.seed, i),
                                      s, p);
  });
  rep.note = "s=" + std::to_string(s) + " p=" + std::to_string(p);
  return rep;
}

RatioReport check_quadratic_h2(const Ensemble& ens) {
  return run_protocol("quadratic_h2", ens,
                      [&](const Ensemble& e, int i) { return ratio_quadratic_h2(e.field(i)); });
}

InterpolationReport check_apriori_interpolation(const Ensemble& ens, double p) {
  InterpolationReport rep;
  rep.holder = run_protocol("holder_chain", ens, [&](const Ensemble& e, int i) {
    return ratio_holder_chain(e.field(i), p);
  });
  // exact constant 1: the margin is a roundoff allowance, not a fit
  rep.holder.margin = 0.0;
  rep.holder.pass = rep.holder.c_cal <= 1.0 + 1e-10 && rep.holder.holdout_max <= 1.0 + 1e-10;
  rep.holder.note = "exact constant 1";
  rep.embedding = run_protocol("l6_embedding", ens, [&](const Ensemble& e, int i) {
    return ratio_l6_embedding(e.field(i));
  });
  return rep;
}

} // namespace hwlab
