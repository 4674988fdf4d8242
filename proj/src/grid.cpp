#include "hwlab/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <memory>
#include <mutex>

namespace hwlab {

namespace {

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

// FFTW plans are not thread-safe to create; execution on private buffers is.
// Each thread keeps its own in-place plans per grid size, with FFTW_ESTIMATE
// so planning never depends on timing measurements.
std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

struct PlanEntry {
  int nx = 0, ny = 0;
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
  fftw_complex* buf = nullptr;

  ~PlanEntry() {
    if (fwd) fftw_destroy_plan(fwd);
    if (bwd) fftw_destroy_plan(bwd);
    if (buf) fftw_free(buf);
  }
};

PlanEntry& plans_for(int nx, int ny) {
  thread_local std::vector<std::unique_ptr<PlanEntry>> cache;
  for (auto& e : cache)
    if (e->nx == nx && e->ny == ny) return *e;
  auto e = std::make_unique<PlanEntry>();
  e->nx = nx;
  e->ny = ny;
  e->buf = fftw_alloc_complex(static_cast<std::size_t>(nx) * ny);
  {
    std::lock_guard<std::mutex> lock(plan_mutex());
    if (ny == 1) {
      e->fwd = fftw_plan_dft_1d(nx, e->buf, e->buf, FFTW_FORWARD, FFTW_ESTIMATE);
      e->bwd = fftw_plan_dft_1d(nx, e->buf, e->buf, FFTW_BACKWARD, FFTW_ESTIMATE);
    } else {
      e->fwd = fftw_plan_dft_2d(nx, ny, e->buf, e->buf, FFTW_FORWARD, FFTW_ESTIMATE);
      e->bwd = fftw_plan_dft_2d(nx, ny, e->buf, e->buf, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
  }
  cache.push_back(std::move(e));
  return *cache.back();
}

void check_finite(std::span<const cplx> v) {
  for (const cplx& z : v)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
      throw std::invalid_argument("transform: non-finite value in input field");
}

} // namespace

GridSpec make_grid(int nx, int ny, double lx, YDomain y_domain, double ly) {
  if (!power_of_two(nx) || nx < 8)
    throw std::invalid_argument("make_grid: nx must be a power of two >= 8");
  if (!power_of_two(ny) || ny < 8)
    throw std::invalid_argument("make_grid: ny must be a power of two >= 8");
  if (!(lx > 0.0))
    throw std::invalid_argument("make_grid: lx must be positive");
  GridSpec g;
  g.nx = nx;
  g.ny = ny;
  g.lx = lx;
  g.y_domain = y_domain;
  if (y_domain == YDomain::Torus) {
    g.ly = two_pi;
  } else {
    if (!(ly > 0.0))
      throw std::invalid_argument("make_grid: ly must be positive for a truncated line");
    g.ly = ly;
  }
  return g;
}

// x_0 = -lx/2 shifts the x phase of every coefficient by e^{-i xi_k x_0}
// = (-1)^k exactly; y starts at 0 so no y phase.
std::vector<cplx> transform_forward(const GridSpec& g, std::span<const cplx> physical) {
  check_finite(physical);
  PlanEntry& pe = plans_for(g.nx, g.ny);
  std::copy(physical.begin(), physical.end(), reinterpret_cast<cplx*>(pe.buf));
  fftw_execute(pe.fwd);
  std::vector<cplx> out(g.size());
  const double scale = 1.0 / static_cast<double>(g.size());
  const cplx* b = reinterpret_cast<const cplx*>(pe.buf);
  for (int k = 0; k < g.nx; ++k) {
    const double sx = (g.mode_x(k) % 2 == 0) ? scale : -scale;
    for (int m = 0; m < g.ny; ++m) out[g.at(k, m)] = sx * b[g.at(k, m)];
  }
  return out;
}

std::vector<cplx> transform_inverse(const GridSpec& g, std::span<const cplx> spectral) {
  check_finite(spectral);
  PlanEntry& pe = plans_for(g.nx, g.ny);
  cplx* b = reinterpret_cast<cplx*>(pe.buf);
  for (int k = 0; k < g.nx; ++k) {
    const double sx = (g.mode_x(k) % 2 == 0) ? 1.0 : -1.0;
    for (int m = 0; m < g.ny; ++m) b[g.at(k, m)] = sx * spectral[g.at(k, m)];
  }
  fftw_execute(pe.bwd);
  std::vector<cplx> out(g.size());
  std::copy_n(reinterpret_cast<const cplx*>(pe.buf), g.size(), out.data());
  return out;
}

Field Field::zeros(const GridSpec& g) {
  return Field(g, std::vector<cplx>(g.size()), std::vector<cplx>(g.size()));
}

Field Field::from_physical(const GridSpec& g, std::vector<cplx> values) {
  if (values.size() != g.size())
    throw std::invalid_argument("Field: value array does not match grid");
  auto spec = transform_forward(g, values);
  return Field(g, std::move(values), std::move(spec));
}

Field Field::from_spectral(const GridSpec& g, std::vector<cplx> coeffs) {
  if (coeffs.size() != g.size())
    throw std::invalid_argument("Field: coefficient array does not match grid");
  auto phys = transform_inverse(g, coeffs);
  return Field(g, std::move(phys), std::move(coeffs));
}

Field Field::sample(const GridSpec& g, const std::function<cplx(double, double)>& f) {
  std::vector<cplx> v(g.size());
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) v[g.at(i, j)] = f(g.x(i), g.y(j));
  return from_physical(g, std::move(v));
}

bool Field::finite() const {
  for (const cplx& z : phys_)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  return true;
}

double NormKind::weight(double xi, double eta) const {
  switch (tag) {
    case Tag::L2: return 1.0;
    case Tag::L2xHsy: return std::pow(1.0 + eta * eta, param);
    case Tag::H1xL2y: return 1.0 + xi * xi;
    case Tag::HalfDyHalfSemi: return std::abs(eta);
    case Tag::AnisoHs: return 1.0 + xi * xi + std::pow(1.0 + eta * eta, param);
    case Tag::FullHs: return std::pow(1.0 + xi * xi + eta * eta, param);
    default: throw std::logic_error("weight: kind has no spectral weight");
  }
}

std::string NormKind::name() const {
  switch (tag) {
    case Tag::L2: return "L2";
    case Tag::Lp: return "L" + std::to_string(param);
    case Tag::Linf: return "Linf";
    case Tag::L2xHsy: return "L2xH" + std::to_string(param) + "y";
    case Tag::H1xL2y: return "H1xL2y";
    case Tag::HalfDyHalfSemi: return "|Dy|^{1/2} seminorm";
    case Tag::AnisoHs: return "AnisoH" + std::to_string(param);
    case Tag::FullHs: return "H" + std::to_string(param);
  }
  return "?";
}

double norm(const Field& f, NormKind kind) {
  const GridSpec& g = f.grid();
  if (kind.tag == NormKind::Tag::Linf) {
    double m = 0.0;
    for (const cplx& z : f.values()) m = std::max(m, std::abs(z));
    return m;
  }
  if (kind.tag == NormKind::Tag::Lp) {
    const double p = kind.param;
    if (p < 1.0) throw std::invalid_argument("norm: Lp requires p >= 1");
    double acc = 0.0;
    for (const cplx& z : f.values()) acc += std::pow(std::abs(z), p);
    return std::pow(acc * g.dx() * g.dy(), 1.0 / p);
  }
  double acc = 0.0;
  for (int k = 0; k < g.nx; ++k)
    for (int m = 0; m < g.ny; ++m)
      acc += kind.weight(g.xi(k), g.eta(m)) * std::norm(f.coeff_at(k, m));
  return std::sqrt(acc * g.lx * g.ly);
}

cplx inner_product(const Field& f, const Field& h, NormKind kind) {
  if (!(f.grid() == h.grid()))
    throw std::invalid_argument("inner_product: grid mismatch");
  if (!kind.quadratic())
    throw std::invalid_argument("inner_product: no inner product for " + kind.name());
  const GridSpec& g = f.grid();
  cplx acc = 0.0;
  for (int k = 0; k < g.nx; ++k)
    for (int m = 0; m < g.ny; ++m)
      acc += kind.weight(g.xi(k), g.eta(m)) * f.coeff_at(k, m) * std::conj(h.coeff_at(k, m));
  return acc * (g.lx * g.ly);
}

Field apply_symbol(const Field& f, Symbol sym, double s) {
  const GridSpec& g = f.grid();
  std::vector<cplx> out(g.size());
  for (int k = 0; k < g.nx; ++k) {
    const double xi = g.xi(k);
    for (int m = 0; m < g.ny; ++m) {
      const double eta = g.eta(m);
      cplx mult;
      switch (sym) {
        case Symbol::Dx: mult = cplx(0.0, xi); break;
        case Symbol::Dxx: mult = -xi * xi; break;
        case Symbol::AbsDy: mult = std::abs(eta); break;
        case Symbol::AbsDyHalf: mult = std::sqrt(std::abs(eta)); break;
        case Symbol::JapaneseBracketY: mult = std::pow(1.0 + eta * eta, 0.5 * s); break;
      }
      out[g.at(k, m)] = mult * f.coeff_at(k, m);
    }
  }
  return Field::from_spectral(g, std::move(out));
}

double tail_mass_fraction(const Field& f) {
  const GridSpec& g = f.grid();
  double total = 0.0, tail = 0.0;
  for (int i = 0; i < g.nx; ++i) {
    const bool outer = std::abs(g.x(i)) >= 0.45 * g.lx;
    for (int j = 0; j < g.ny; ++j) {
      const double a = std::norm(f.value_at(i, j));
      total += a;
      if (outer) tail += a;
    }
  }
  return total > 0.0 ? tail / total : 0.0;
}

std::vector<cplx> dft2_unnormalized(const GridSpec& g, std::span<const cplx> in, bool forward) {
  PlanEntry& pe = plans_for(g.nx, g.ny);
  std::copy(in.begin(), in.end(), reinterpret_cast<cplx*>(pe.buf));
  fftw_execute(forward ? pe.fwd : pe.bwd);
  std::vector<cplx> out(g.size());
  std::copy_n(reinterpret_cast<const cplx*>(pe.buf), g.size(), out.data());
  return out;
}

std::vector<cplx> dft1_unnormalized(int n, std::span<const cplx> in, bool forward) {
  PlanEntry& pe = plans_for(n, 1);
  std::copy(in.begin(), in.end(), reinterpret_cast<cplx*>(pe.buf));
  fftw_execute(forward ? pe.fwd : pe.bwd);
  std::vector<cplx> out(n);
  std::copy_n(reinterpret_cast<const cplx*>(pe.buf), n, out.data());
  return out;
}

Field translate(const Field& f, int si, int sj) {
  const GridSpec& g = f.grid();
  const double ax = si * g.dx();
  const double by = sj * g.dy();
  std::vector<cplx> out(g.size());
  for (int k = 0; k < g.nx; ++k)
    for (int m = 0; m < g.ny; ++m) {
      const double phase = g.xi(k) * ax + g.eta(m) * by;
      out[g.at(k, m)] = f.coeff_at(k, m) * cplx(std::cos(phase), std::sin(phase));
    }
  return Field::from_spectral(g, std::move(out));
}

} // namespace hwlab
