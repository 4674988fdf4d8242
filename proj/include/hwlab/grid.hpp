#ifndef HWLAB_GRID_HPP
#define HWLAB_GRID_HPP

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hwlab {

using cplx = std::complex<double>;

inline constexpr double two_pi = 6.283185307179586476925286766559;

enum class YDomain { Torus, TruncatedLine };

// Discretization of [-lx/2, lx/2) x [0, ly), periodic in both directions.
// The y direction is either the exact torus (ly = 2*pi, integer wavenumbers)
// or a truncated line of length ly. Wavenumbers follow FFT index order:
// index k in 0..n-1 stands for the signed mode k (k < n/2) or k - n.
struct GridSpec {
  int nx = 0;
  int ny = 0;
  double lx = 0.0;
  YDomain y_domain = YDomain::Torus;
  double ly = two_pi;

  double dx() const { return lx / nx; }
  double dy() const { return ly / ny; }
  double x(int i) const { return -0.5 * lx + i * dx(); }
  double y(int j) const { return j * dy(); }

  int mode_x(int k) const { return k < nx / 2 ? k : k - nx; }
  int mode_y(int m) const { return m < ny / 2 ? m : m - ny; }
  double xi(int k) const { return two_pi * mode_x(k) / lx; }
  double eta(int m) const { return two_pi * mode_y(m) / ly; }

  std::size_t size() const { return static_cast<std::size_t>(nx) * ny; }
  std::size_t at(int i, int j) const { return static_cast<std::size_t>(i) * ny + j; }

  bool operator==(const GridSpec&) const = default;
};

// errors: non-power-of-two or undersized nx/ny, nonpositive lengths
GridSpec make_grid(int nx, int ny, double lx, YDomain y_domain, double ly = two_pi);

// Complex field on a grid, immutable after construction. Both views are kept
// in sync: values() are the physical samples u(x_i, y_j) stored x-major
// (index i*ny + j), coefficients() are Fourier-series coefficients c_{k,m}
// with
//     u(x, y) = sum_{k,m} c_{k,m} e^{i (xi_k x + eta_m y)}.
// The quadrature convention  integral |u|^2 dx dy ~ sum |u_ij|^2 dx dy
// then matches  lx*ly * sum |c_km|^2  exactly (discrete Parseval), which
// fixes every constant prefactor in the norms below.
class Field {
public:
  static Field zeros(const GridSpec& g);
  static Field from_physical(const GridSpec& g, std::vector<cplx> values);
  static Field from_spectral(const GridSpec& g, std::vector<cplx> coeffs);
  static Field sample(const GridSpec& g, const std::function<cplx(double, double)>& f);

  const GridSpec& grid() const { return grid_; }
  std::span<const cplx> values() const { return phys_; }
  std::span<const cplx> coefficients() const { return spec_; }

  cplx value_at(int i, int j) const { return phys_[grid_.at(i, j)]; }
  cplx coeff_at(int k, int m) const { return spec_[grid_.at(k, m)]; }

  bool finite() const;

private:
  Field(GridSpec g, std::vector<cplx> phys, std::vector<cplx> spec)
      : grid_(g), phys_(std::move(phys)), spec_(std::move(spec)) {}
  GridSpec grid_;
  std::vector<cplx> phys_;
  std::vector<cplx> spec_;
};

// forward/inverse transforms as standalone operations; round-trip is exact
// to ~1e-15 relative. errors: NaN/Inf in input.
std::vector<cplx> transform_forward(const GridSpec& g, std::span<const cplx> physical);
std::vector<cplx> transform_inverse(const GridSpec& g, std::span<const cplx> spectral);

struct NormKind {
  enum class Tag { L2, Lp, Linf, L2xHsy, H1xL2y, HalfDyHalfSemi, AnisoHs, FullHs };
  Tag tag = Tag::L2;
  double param = 0.0; // s for the Sobolev kinds, p for Lp

  static NormKind l2() { return {Tag::L2, 0.0}; }
  static NormKind lp(double p) { return {Tag::Lp, p}; }
  static NormKind linf() { return {Tag::Linf, 0.0}; }
  static NormKind l2_hs_y(double s) { return {Tag::L2xHsy, s}; }
  static NormKind h1_l2_y() { return {Tag::H1xL2y, 0.0}; }
  static NormKind half_dy_semi() { return {Tag::HalfDyHalfSemi, 0.0}; }
  static NormKind aniso_hs(double s) { return {Tag::AnisoHs, s}; }
  static NormKind full_hs(double s) { return {Tag::FullHs, s}; }

  bool quadratic() const { return tag != Tag::Lp && tag != Tag::Linf; }
  // spectral weight for the quadratic kinds
  double weight(double xi, double eta) const;
  std::string name() const;
};

double norm(const Field& f, NormKind kind);

// weighted spectral inner product inducing norm(., kind) for the quadratic
// kinds; conjugate-linear in the second slot. errors: grid mismatch, kinds
// without an inner product (Lp, Linf).
cplx inner_product(const Field& f, const Field& g, NormKind kind);

enum class Symbol { Dx, Dxx, AbsDy, AbsDyHalf, JapaneseBracketY };

// multiply coefficients by i*xi, -xi^2, |eta|, |eta|^(1/2), <eta>^s
Field apply_symbol(const Field& f, Symbol sym, double s = 0.0);

// fraction of quadrature mass in the outer 10% of the x-domain
// (|x| >= 0.45*lx); the warning monitor for the R_x truncation.
double tail_mass_fraction(const Field& f);

// lattice translate u(x,y) -> u(x + si*dx, y + sj*dy), exact in spectral space
Field translate(const Field& f, int si, int sj);

// plain index-space DFT, out[i,j] = sum_{k,m} in[k,m] e^{-+ 2 pi i (ki/nx + mj/ny)},
// no scaling or grid phases; the building block for lattice cross-correlations
std::vector<cplx> dft2_unnormalized(const GridSpec& g, std::span<const cplx> in, bool forward);

// 1D sibling for the x-axis line helpers
std::vector<cplx> dft1_unnormalized(int n, std::span<const cplx> in, bool forward);

} // namespace hwlab

#endif
