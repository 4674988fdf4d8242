#ifndef HWLAB_CONFIG_HPP
#define HWLAB_CONFIG_HPP

#include "hwlab/analysis.hpp"
#include "hwlab/dynamics.hpp"
#include "hwlab/grid.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace hwlab {

enum class Experiment { Evolve, GroundState, Stability, Picard, Inequalities, ScalingCheck };

struct InitialSpec {
  enum class Type { Gaussian, LineSoliton, RandomBandLimited, SingleMode };
  Type type = Type::Gaussian;
  double amplitude = 1.0;
  double sigma_x = 2.0;
  double sigma_y = 1.0; // torus: von Mises concentration 1/sigma_y^2
  double omega = 1.0;
  double cutoff_x = 4.0;
  double cutoff_y = 4.0;
  int kx = 1;
  int ky = 0;
  // optional normalization applied after construction
  std::optional<NormKind> normalize_kind;
  double normalize_value = 1.0;
};

struct GroundStateBlock {
  std::optional<double> eta;          // mass-constrained mode
  std::optional<double> omega_target; // frequency-targeted mode (bisection)
  double seed_omega = 1.0;            // line soliton used as the seed profile
  double perturbation_cos_y = 0.0;
  double dt = 0.5;
  double tol = 1e-8;
  int max_iter = 50000;
  std::vector<double> omega_sweep;
};

struct StabilityBlock {
  double omega = 0.3;
  double delta = 1e-2; // AnisoH^{1/2} size of the perturbation
  double cutoff_x = 1.0;
  double cutoff_y = 2.0;
};

struct PicardBlock {
  int nodes = 32; // M
  int max_iter = 50;
  double tol = 1e-12;
  bool cross_check = true; // compare the fixed point against split-step
};

struct InequalitiesBlock {
  int count = 64;
  SpectrumSpec spectrum;
  double s = 1.0;
  std::vector<int> trudinger_k = {4, 8, 16, 32, 64};
  std::vector<std::pair<double, double>> strichartz_pairs = {
      {4.0, std::numeric_limits<double>::infinity()}, {8.0, 4.0}};
  double strichartz_T = 1.0;
  bool include_2d_variant = true;
};

struct ScalingBlock {
  double lambda = 2.0;
};

struct RunConfig {
  Experiment experiment = Experiment::Evolve;
  GridSpec grid;
  EquationParams equation;
  double T = 1.0;
  double dt = 1e-3;
  int sample_every = 1;
  int snapshot_every = 0;
  double blowup_ceiling = 1e12;
  std::uint64_t seed = 0;
  InitialSpec initial;
  GroundStateBlock ground_state;
  StabilityBlock stability;
  PicardBlock picard;
  InequalitiesBlock inequalities;
  ScalingBlock scaling;
  std::string output_dir = "out";
  bool warn_extended_p = false;
};

struct ParseResult {
  std::optional<RunConfig> config;
  std::vector<std::string> errors; // human-readable violations, field-named
  std::vector<std::string> warnings;

  bool ok() const { return errors.empty() && config.has_value(); }
};

// full validation of every module precondition before dispatch; unknown keys
// are rejected
ParseResult parse_config(const std::string& json_text);

Field build_initial(const InitialSpec& spec, const GridSpec& grid, const EquationParams& params,
                    std::uint64_t seed);

// exit status: 0 ok, 2 validation failure (never produced here; parse first),
// 3 NaN or blow-up flag. Artifacts: ledger.csv, summary.json, snapshots.
int run_experiment(const RunConfig& config, const std::string& output_override = "");

} // namespace hwlab

#endif
