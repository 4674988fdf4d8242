#include "hwlab/acceptance.hpp"

#include "hwlab/analysis.hpp"
#include "hwlab/config.hpp"
#include "hwlab/duhamel.hpp"
#include "hwlab/dynamics.hpp"
#include "hwlab/groundstate.hpp"
#include "hwlab/io.hpp"
#include "hwlab/stability.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

namespace hwlab {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

std::string fmt(double v) { return io::format_double(v); }

Field gaussian_torus(const GridSpec& g, double amp, double sx, double sy) {
  const double inv2sx = 1.0 / (2.0 * sx * sx);
  const double ky = 1.0 / (sy * sy);
  return Field::sample(g, [&](double x, double y) {
    return cplx(amp * std::exp(-x * x * inv2sx) * std::exp(ky * (std::cos(y - 3.141592653589793) - 1.0)),
                0.0);
  });
}

double rel_l2_diff(const Field& a, const Field& b) {
  double diff2 = 0.0, ref2 = 0.0;
  for (std::size_t n = 0; n < a.grid().size(); ++n) {
    diff2 += std::norm(a.coefficients()[n] - b.coefficients()[n]);
    ref2 += std::norm(b.coefficients()[n]);
  }
  return ref2 > 0 ? std::sqrt(diff2 / ref2) : std::sqrt(diff2);
}

Field scale_coeffs(const Field& f, double r) {
  std::vector<cplx> c(f.coefficients().begin(), f.coefficients().end());
  for (cplx& z : c) z *= r;
  return Field::from_spectral(f.grid(), std::move(c));
}

CriterionResult mass_conservation() {
  CriterionResult res{1, "mass-conservation", "FAIL", "", 0.0};
  const GridSpec g = make_grid(128, 64, 40.0, YDomain::Torus);
  const EquationParams params = make_params(2.0, Sign::Focusing, 0.5);
  const Field u0 = gaussian_torus(g, 1.0, 2.0, 1.0);
  const EvolveResult r = evolve(u0, params, {5.0, 1e-3, 100, 0, 1e12});
  const double drift = r.ledger.relative_mass_drift();
  res.detail = "rel mass drift " + fmt(drift) + " (<= 1e-10)";
  res.status = drift <= 1e-10 ? "PASS" : "FAIL";
  return res;
}

CriterionResult energy_order() {
  CriterionResult res{2, "energy-order", "FAIL", "", 0.0};
  const GridSpec g = make_grid(128, 64, 40.0, YDomain::Torus);
  const EquationParams params = make_params(2.0, Sign::Focusing, 0.5);
  const Field u0 = gaussian_torus(g, 1.0, 2.0, 1.0);

  auto drift_at = [&](double dt) {
    const int every = static_cast<int>(std::llround(0.1 / dt));
    return evolve(u0, params, {5.0, dt, every, 0, 1e12}).ledger.relative_energy_drift();
  };

  std::ostringstream detail;
  bool ok = true;
  double prev = drift_at(1e-2);
  const double dts[] = {1e-2, 5e-3, 2.5e-3};
  for (double dt : dts) {
    const double half = drift_at(0.5 * dt);
    const double ratio = half > 0 ? prev / half : 0.0;
    detail << "ratio(dt=" << fmt(dt) << ") = " << fmt(ratio) << "  ";
    ok = ok && ratio >= 3.0 && ratio <= 5.0;
    prev = half;
  }
  res.detail = detail.str() + "(each in [3, 5])";
  res.status = ok ? "PASS" : "FAIL";
  return res;
}

CriterionResult soliton_stationarity() {
  CriterionResult res{3, "soliton-stationarity", "FAIL", "", 0.0};
  const GridSpec g = make_grid(512, 16, 80.0, YDomain::Torus);
  const EquationParams params = make_params(2.0, Sign::Focusing, 0.5);
  const Field r1 = line_soliton(1.0, params, g);
  const double r1_l2 = norm(r1, NormKind::l2());

  const EvolveResult r = evolve(r1, params, {5.0, 1e-3, 50, 50, 1e12});
  double worst = 0.0;
  for (const auto& [t, u] : r.snapshots) {
    // exact standing wave e^{i t} R_1
    std::vector<cplx> ref(g.size());
    const cplx phase(std::cos(t), std::sin(t));
    for (std::size_t n = 0; n < g.size(); ++n) ref[n] = phase * r1.coefficients()[n];
    double diff2 = 0.0;
    for (std::size_t n = 0; n < g.size(); ++n)
      diff2 += std::norm(u.coefficients()[n] - ref[n]);
    worst = std::max(worst, std::sqrt(diff2 * g.lx * g.ly) / r1_l2);
  }
  res.detail = "max rel L2 error " + fmt(worst) + " (<= 1e-4)";
  res.status = worst <= 1e-4 ? "PASS" : "FAIL";
  return res;
}

// dense 4th-order finite-difference substitution of the 1D soliton profile,
// fully independent of the spectral machinery
double line_soliton_fd_residual(double omega, double p, double half_width, int n) {
  const double h = 2.0 * half_width / n;
  const double amp = std::pow(0.5 * (p + 1.0) * omega, 1.0 / (p - 1.0));
  const double rate = 0.5 * (p - 1.0) * std::sqrt(omega);
  const double shape = 2.0 / (p - 1.0);
  auto R = [&](double x) { return amp * std::pow(1.0 / std::cosh(rate * x), shape); };
  double acc = 0.0;
  for (int i = 2; i < n - 2; ++i) {
    const double x = -half_width + i * h;
    const double rxx =
        (-R(x - 2 * h) + 16 * R(x - h) - 30 * R(x) + 16 * R(x + h) - R(x + 2 * h)) /
        (12 * h * h);
    const double resid = -rxx + omega * R(x) - std::pow(R(x), p);
    acc += resid * resid * h;
  }
  return std::sqrt(acc);
}

CriterionResult soliton_residual() {
  CriterionResult res{4, "soliton-residual", "FAIL", "", 0.0};
  const GridSpec g = make_grid(512, 16, 80.0, YDomain::Torus);
  const EquationParams params = make_params(2.0, Sign::Focusing, 0.5);
  const double spectral = elliptic_residual(line_soliton(1.0, params, g), 1.0, params);
  const double oracle = line_soliton_fd_residual(1.0, 2.0, 40.0, 40000);
  res.detail = "spectral residual " + fmt(spectral) + " (<= 1e-8), independent FD oracle " +
               fmt(oracle) + " (<= 1e-7)";
  res.status = spectral <= 1e-8 && oracle <= 1e-7 ? "PASS" : "FAIL";
  return res;
}

CriterionResult groundstate_flow() {
  CriterionResult res{5, "groundstate-flow", "FAIL", "", 0.0};
  const GridSpec g = make_grid(256, 16, 80.0, YDomain::Torus);
  const EquationParams params = make_params(2.0, Sign::Focusing, 0.5);
  const double target = 0.3; // below omega_2 = 0.8

  const Field r = line_soliton(target, params, g);
  std::vector<cplx> v(r.values().begin(), r.values().end());
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) v[g.at(i, j)] *= 1.0 + 0.1 * std::cos(g.y(j));
  const Field start = Field::from_physical(g, std::move(v));

  const GroundState gs = gradient_flow(start, mass(r), params, {0.5, 1e-7, 50000});
  const Field ref = line_soliton(gs.omega, params, g);
  const double prof_err = rel_l2_diff(gs.profile, ref);
  const double om_err = std::abs(gs.omega - target);
  res.detail = "omega " + fmt(gs.omega) + " (|err| " + fmt(om_err) + " <= 1e-3), profile err " +
               fmt(prof_err) + " (<= 1e-3), " + std::to_string(gs.iterations) + " iters";
  res.status = gs.converged && om_err <= 1e-3 && prof_err <= 1e-3 ? "PASS" : "FAIL";
  return res;
}

CriterionResult picard_contraction() {
  CriterionResult res{6, "picard-contraction", "FAIL", "", 0.0};
  const GridSpec g = make_grid(64, 16, 40.0, YDomain::Torus);
  const EquationParams params = make_params(2.0, Sign::Focusing, 0.5);
  Field u0 = gaussian_torus(g, 1.0, 2.0, 1.0);
  u0 = scale_coeffs(u0, 0.1 / norm(u0, NormKind::aniso_hs(0.5)));

  const int nodes = 32;
  const double T = 0.1;
  const ContractionReport rep = picard_solve(u0, params, T, nodes, 50, 1e-12);

  const EvolveResult split = evolve(u0, params, {T, T / nodes, nodes, 0, 1e12});
  const double cross = rel_l2_diff(rep.trajectory.fields.back(), split.final_state);

  res.detail = "rho " + fmt(rep.rho) + " (<= 0.5), fixed point vs split-step " + fmt(cross) +
               " (<= 1e-6)";
  res.status = rep.converged && rep.rho <= 0.5 && cross <= 1e-6 ? "PASS" : "FAIL";
  return res;
}

CriterionResult scaling_covariance() {
  CriterionResult res{7, "scaling-covariance", "FAIL", "", 0.0};
  const GridSpec g = make_grid(128, 32, 40.0, YDomain::TruncatedLine, 20.0);
  const EquationParams params = make_params(2.0, Sign::Focusing, 0.5);
  Ensemble ens{424242ULL, 1, SpectrumSpec{SpectrumSpec::Kind::BandLimited, 1.5, 1.0, 2.0}, g};
  Field u0 = ens.field(0);
  u0 = scale_coeffs(u0, 0.5 / norm(u0, NormKind::l2()));

  const double lam = 2.0, T = 0.25, dt = 1e-3;
  const Field a =
      scaling_transform(evolve(u0, params, {T * lam * lam, dt * lam * lam, 1000, 0, 1e12}).final_state,
                        lam, params);
  const Field b =
      evolve(scaling_transform(u0, lam, params), params, {T, dt, 1000, 0, 1e12}).final_state;
  const double mism = rel_l2_diff(a, b);
  res.detail = "rel L2 mismatch " + fmt(mism) + " (<= 1e-6)";
  res.status = mism <= 1e-6 ? "PASS" : "FAIL";
  return res;
}

CriterionResult orbital_stability() {
  CriterionResult res{8, "orbital-stability", "FAIL", "", 0.0};
  const GridSpec g = make_grid(256, 16, 80.0, YDomain::Torus);
  const EquationParams params = make_params(2.0, Sign::Focusing, 0.5);
  const Field profile = line_soliton(0.3, params, g);
  const GroundState q{profile, 0.3, elliptic_residual(profile, 0.3, params), mass(profile), 0,
                      GroundStateSource::LineSolitonFormula, true, 0.0};

  Ensemble ens{31337ULL, 1, SpectrumSpec{SpectrumSpec::Kind::BandLimited, 1.0, 2.0, 2.0}, g};
  Field pert = ens.field(0);
  pert = scale_coeffs(pert, 1e-2 / norm(pert, NormKind::aniso_hs(0.5)));

  const StabilityResult r = stability_experiment(q, pert, params, 20.0, 1e-3, 100);
  res.detail = "max orbit distance " + fmt(r.max_distance) + " (PASS <= 5e-2, WARN <= 1e-1)";
  res.status = r.max_distance <= 5e-2 ? "PASS" : (r.max_distance <= 1e-1 ? "WARN" : "FAIL");
  return res;
}

CriterionResult inequalities() {
  CriterionResult res{9, "inequalities", "FAIL", "", 0.0};
  const GridSpec g = make_grid(64, 64, 40.0, YDomain::Torus);
  Ensemble ens{2026ULL, 64, SpectrumSpec{SpectrumSpec::Kind::BandLimited, 8.0, 8.0, 2.0}, g};

  std::ostringstream detail;
  bool ok = true;
  auto eat = [&](const RatioReport& r) {
    detail << r.id << (r.pass ? " ok" : " FAIL") << "  ";
    ok = ok && r.pass;
  };

  const InterpolationReport interp = check_apriori_interpolation(ens, 2.0);
  const bool holder_ok = interp.holder.c_cal <= 1.0 + 1e-10 &&
                         interp.holder.holdout_max <= 1.0 + 1e-10;
  detail << "holder_chain max " << fmt(std::max(interp.holder.c_cal, interp.holder.holdout_max))
         << (holder_ok ? " ok" : " FAIL") << "  ";
  ok = ok && holder_ok;
  eat(interp.embedding);
  eat(check_brezis_gallouet(ens, 1.0, false));
  eat(check_brezis_gallouet(ens, 2.0, true));
  eat(check_trudinger(ens, {4, 8, 16, 32, 64}));
  eat(check_strichartz(ens, 4.0, std::numeric_limits<double>::infinity(), 1.0, 64));
  eat(check_strichartz(ens, 8.0, 4.0, 1.0, 64));
  eat(check_nonlinearity_sobolev(ens, 1.0, 2.0));
  eat(check_quadratic_h2(ens));

  res.detail = detail.str();
  res.status = ok ? "PASS" : "FAIL";
  return res;
}

CriterionResult determinism(const std::string& recipes_dir) {
  CriterionResult res{10, "determinism", "FAIL", "", 0.0};
  const fs::path recipe = fs::path(recipes_dir) / "determinism.json";
  std::ifstream in(recipe);
  if (!in) {
    res.detail = "missing recipe " + recipe.string();
    return res;
  }
  std::stringstream buf;
  buf << in.rdbuf();
  const ParseResult parsed = parse_config(buf.str());
  if (!parsed.ok()) {
    res.detail = "recipe failed validation";
    return res;
  }

  const fs::path tmp = fs::temp_directory_path() / "hwlab_determinism";
  fs::remove_all(tmp);
  run_experiment(*parsed.config, (tmp / "a").string());
  run_experiment(*parsed.config, (tmp / "b").string());

  auto slurp = [](const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream s;
    s << f.rdbuf();
    return s.str();
  };
  const std::string a = slurp(tmp / "a" / "summary.json");
  const std::string b = slurp(tmp / "b" / "summary.json");
  fs::remove_all(tmp);

  const bool same = !a.empty() && a == b;
  res.detail = same ? "two runs produced byte-identical summary.json"
                    : "summary.json bytes differ between identical runs";
  res.status = same ? "PASS" : "FAIL";
  return res;
}

struct Entry {
  std::string name;
  double time_limit; // seconds; 0 = no limit
  std::function<CriterionResult()> fn;
};

} // namespace

std::vector<std::string> acceptance_suite_names() {
  return {"mass-conservation", "energy-order",       "soliton-stationarity",
          "soliton-residual",  "groundstate-flow",   "picard-contraction",
          "scaling-covariance", "orbital-stability", "inequalities",
          "determinism"};
}

std::vector<CriterionResult> run_acceptance(const std::string& suite,
                                            const std::string& recipes_dir) {
  const std::vector<Entry> entries = {
      {"mass-conservation", 60.0, mass_conservation},
      {"energy-order", 120.0, energy_order},
      {"soliton-stationarity", 0.0, soliton_stationarity},
      {"soliton-residual", 0.0, soliton_residual},
      {"groundstate-flow", 300.0, groundstate_flow},
      {"picard-contraction", 0.0, picard_contraction},
      {"scaling-covariance", 0.0, scaling_covariance},
      {"orbital-stability", 0.0, orbital_stability},
      {"inequalities", 300.0, inequalities},
      {"determinism", 0.0, [&] { return determinism(recipes_dir); }},
  };

  std::vector<CriterionResult> out;
  for (std::size_t idx = 0; idx < entries.size(); ++idx) {
    const Entry& e = entries[idx];
    if (suite != "all" && suite != e.name) continue;
    const auto start = Clock::now();
    CriterionResult r;
    try {
      r = e.fn();
    } catch (const std::exception& ex) {
      r.status = "FAIL";
      r.detail = std::string("exception: ") + ex.what();
    }
    r.index = static_cast<int>(idx) + 1;
    r.name = e.name;
    r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    if (e.time_limit > 0.0 && r.seconds > e.time_limit && r.status == "PASS") {
      r.status = "FAIL";
      r.detail += " [runtime " + fmt(r.seconds) + "s exceeded " + fmt(e.time_limit) + "s]";
    }
    out.push_back(std::move(r));
  }
  if (out.empty()) throw std::invalid_argument("unknown acceptance suite '" + suite + "'");
  return out;
}

} // namespace hwlab
