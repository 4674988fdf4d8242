#ifndef HWLAB_DUHAMEL_HPP
#define HWLAB_DUHAMEL_HPP

#include "hwlab/dynamics.hpp"
#include "hwlab/grid.hpp"

#include <vector>

namespace hwlab {

// node values of a candidate solution on [0, T], uniform spacing
struct Trajectory {
  std::vector<double> times;
  std::vector<Field> fields;

  const GridSpec& grid() const { return fields.front().grid(); }
  double horizon() const { return times.back(); }
  int nodes() const { return static_cast<int>(times.size()); }
};

struct ContractionReport {
  std::vector<double> diffs;   // d_k = ||u^{k+1} - u^k||_{X_T}
  double rho = 0.0;            // median of d_{k+1}/d_k
  bool converged = false;
  bool diverged = false;       // d_k grew three times in a row
  int iterations = 0;
  Trajectory trajectory;
};

// max over nodes of the AnisoHs(s) norm; the X_T norm of the iteration
double trajectory_norm(const Trajectory& traj, double s);
double trajectory_distance(const Trajectory& a, const Trajectory& b, double s);

// free flow e^{itL}u0 sampled at the nodes; the first Picard iterate
Trajectory free_trajectory(const Field& u0, double T, int nodes_minus_one);

// One application of the Duhamel fixed-point map: the integral is evaluated
// in the interaction picture w(t) = e^{-itL}u(t) with a composite trapezoid
// over the nodes, so the only scheme error is the O(T dt^2) quadrature.
Trajectory apply_phi(const Trajectory& traj, const Field& u0, const EquationParams& params);

// Picard iteration from the free-flow initial guess; stops at tolerance in
// the X_T norm or after max_iter. Divergence is reported, not thrown.
ContractionReport picard_solve(const Field& u0, const EquationParams& params, double T,
                               int nodes_minus_one, int max_iter, double tol);

} // namespace hwlab

#endif
