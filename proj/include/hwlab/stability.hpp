#ifndef HWLAB_STABILITY_HPP
#define HWLAB_STABILITY_HPP

#include "hwlab/dynamics.hpp"
#include "hwlab/grid.hpp"
#include "hwlab/groundstate.hpp"

#include <vector>

namespace hwlab {

// distance from u to the orbit {e^{i theta} Q(. + x1, . + y1)} in the
// AnisoH^{1/2} metric
struct OrbitDistanceResult {
  double distance = 0.0;
  double shift_x = 0.0; // physical shifts, sub-grid refined
  double shift_y = 0.0;
  int lattice_i = 0; // argmax lattice shift
  int lattice_j = 0;
  double phase = 0.0;  // in [0, 2 pi)
  double g_max = 0.0;  // |G| at the reported shift
  double u_norm = 0.0; // weighted norms entering distance^2 = u^2 + q^2 - 2|G|
  double q_norm = 0.0;
};

// All lattice shifts are scanned at once through the weighted spectral
// cross-correlation; a quadratic fit around the argmax refines the shift to
// sub-grid accuracy. errors: grid mismatch.
OrbitDistanceResult orbit_distance(const Field& u, const Field& q);

struct StabilitySample {
  double t = 0.0;
  double distance = 0.0;
};

struct StabilityResult {
  EvolveResult evolution;
  std::vector<StabilitySample> series;
  double max_distance = 0.0;
};

// evolve Q + perturbation and record the orbit distance on the ledger
// cadence. errors: defocusing sign, grid mismatch.
StabilityResult stability_experiment(const GroundState& q, const Field& perturbation,
                                     const EquationParams& params, double T, double dt,
                                     int sample_every);

} // namespace hwlab

#endif
