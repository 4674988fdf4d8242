#ifndef HWLAB_GROUNDSTATE_HPP
#define HWLAB_GROUNDSTATE_HPP

#include "hwlab/dynamics.hpp"
#include "hwlab/grid.hpp"

#include <vector>

namespace hwlab {

enum class GroundStateSource { LineSolitonFormula, GradientFlow };

struct GroundState {
  Field profile;
  double omega = 0.0;       // extracted Lagrange multiplier
  double residual_l2 = 0.0; // L2 residual of the elliptic equation
  double eta = 0.0;         // mass constraint used
  int iterations = 0;
  GroundStateSource source = GroundStateSource::GradientFlow;
  bool converged = false;
  double max_h_increase = 0.0; // largest per-step increase of H_- (monitor)
};

// R_omega(x) = ((p+1) w / 2)^{1/(p-1)} sech^{2/(p-1)}((p-1) sqrt(w) x / 2),
// extended constant in y. errors: omega <= 0.
Field line_soliton(double omega, const EquationParams& params, const GridSpec& grid);

// || -dxx Q + |Dy| Q + omega Q - |Q|^{p-1} Q ||_{L2}
double elliptic_residual(const Field& q, double omega, const EquationParams& params);

// E_omega(v) = H_-(v) + omega M(v)
double energy_functional(const Field& v, double omega, const EquationParams& params);

// Rayleigh-type quotient making grad H_-(v) + omega v = 0 in the L2
// projection onto v
double extract_omega(const Field& v, const EquationParams& params);

struct GradientFlowOptions {
  double dt = 0.5;
  double tol = 1e-8;
  int max_iter = 50000;
};

// Mass-constrained minimization of H_- by semi-implicit imaginary-time
// descent: v* = (1 + dt(-dxx + |Dy|))^{-1}(v + dt |v|^{p-1} v), then rescale
// to mass eta. errors: eta <= 0, defocusing sign, zero initial field.
// max_iter exhaustion returns the best iterate with converged = false.
GroundState gradient_flow(const Field& initial, double eta, const EquationParams& params,
                          const GradientFlowOptions& opts = {});

// Q_omega(x,y) = omega^{1/(p-1)} Q1(sqrt(omega) x, omega y) as a coefficient
// carry-over onto the grid (lx/sqrt(omega), ly/omega). errors: Torus y-domain
// with omega != 1.
Field rescale_ground_state(const Field& q1, double omega, const EquationParams& params);

// omega(eta) = (2 eta / ||Q1||_{L2}^2)^{2(p-1)/(7-3p)}; errors: p = 7/3
double omega_of_eta(double eta, double q1_l2sq, const EquationParams& params);

// omega_p = 4 / ((p-1)(p+3)) for p in (1, 2]
double omega_threshold(const EquationParams& params);

// Targets a frequency instead of a mass: starts from eta = mass(R_omega) and
// bisects eta (<= max_bisections flow runs) until the extracted omega lands
// within omega_tol of the target.
GroundState solve_for_omega(double omega_target, const EquationParams& params,
                            const GridSpec& grid, const GradientFlowOptions& opts = {},
                            double omega_tol = 1e-4, int max_bisections = 30);

// fraction of the profile's squared L2 mass carried by nonzero y-modes
double y_energy_fraction(const Field& f);

struct OmegaSweepPoint {
  double omega_target = 0.0;
  double omega_est = 0.0;
  double residual_l2 = 0.0;
  double y_fraction = 0.0;
  bool line_like = false; // converged back to a y-independent profile
};

// Bifurcation probe: flow from a y-perturbed line soliton at each frequency
// and classify whether the minimizer stays y-independent.
std::vector<OmegaSweepPoint> omega_sweep(const std::vector<double>& omegas,
                                         const EquationParams& params, const GridSpec& grid,
                                         const GradientFlowOptions& opts = {},
                                         double perturbation_amp = 0.1);

} // namespace hwlab

#endif
