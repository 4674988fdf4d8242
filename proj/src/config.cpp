#include "hwlab/config.hpp"

#include "hwlab/duhamel.hpp"
#include "hwlab/groundstate.hpp"
#include "hwlab/io.hpp"
#include "hwlab/parallel.hpp"
#include "hwlab/stability.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

namespace hwlab {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Parser {
  std::vector<std::string>& errors;
  std::vector<std::string>& warnings;

  void fail(const std::string& field, const std::string& why) {
    errors.push_back(field + ": " + why);
  }

  void check_keys(const json& obj, const std::string& path,
                  std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) {
      fail(path, "must be a JSON object");
      return;
    }
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      bool known = false;
      for (const char* k : allowed)
        if (it.key() == k) known = true;
      if (!known) fail(path, "unknown key '" + it.key() + "'");
    }
  }

  template <class T>
  T get(const json& obj, const std::string& path, const char* key, T fallback) {
    if (!obj.is_object() || !obj.contains(key)) return fallback;
    try {
      return obj.at(key).get<T>();
    } catch (const json::exception&) {
      fail(path + "." + key, "has the wrong type");
      return fallback;
    }
  }
};

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

std::string experiment_name(Experiment e) {
  switch (e) {
    case Experiment::Evolve: return "evolve";
    case Experiment::GroundState: return "ground_state";
    case Experiment::Stability: return "stability";
    case Experiment::Picard: return "picard";
    case Experiment::Inequalities: return "inequalities";
    case Experiment::ScalingCheck: return "scaling_check";
  }
  return "?";
}

SpectrumSpec parse_spectrum(Parser& p, const json& obj, const std::string& path) {
  SpectrumSpec sp;
  p.check_keys(obj, path, {"kind", "cutoff_x", "cutoff_y", "alpha"});
  const std::string kind = p.get<std::string>(obj, path, "kind", "band_limited");
  if (kind == "band_limited")
    sp.kind = SpectrumSpec::Kind::BandLimited;
  else if (kind == "power_law")
    sp.kind = SpectrumSpec::Kind::PowerLawDecay;
  else
    p.fail(path + ".kind", "must be 'band_limited' or 'power_law'");
  sp.cutoff_xi = p.get<double>(obj, path, "cutoff_x", sp.cutoff_xi);
  sp.cutoff_eta = p.get<double>(obj, path, "cutoff_y", sp.cutoff_eta);
  sp.alpha = p.get<double>(obj, path, "alpha", sp.alpha);
  if (sp.cutoff_xi <= 0 || sp.cutoff_eta <= 0) p.fail(path, "cutoffs must be positive");
  return sp;
}

InitialSpec parse_initial(Parser& p, const json& obj) {
  InitialSpec spec;
  p.check_keys(obj, "initial",
               {"type", "amplitude", "sigma_x", "sigma_y", "omega", "cutoff_x", "cutoff_y", "kx",
                "ky", "normalize"});
  const std::string type = p.get<std::string>(obj, "initial", "type", "gaussian");
  if (type == "gaussian")
    spec.type = InitialSpec::Type::Gaussian;
  else if (type == "line_soliton")
    spec.type = InitialSpec::Type::LineSoliton;
  else if (type == "random_band_limited")
    spec.type = InitialSpec::Type::RandomBandLimited;
  else if (type == "single_mode")
    spec.type = InitialSpec::Type::SingleMode;
  else
    p.fail("initial.type", "unknown initial data type '" + type + "'");

  spec.amplitude = p.get<double>(obj, "initial", "amplitude", spec.amplitude);
  spec.sigma_x = p.get<double>(obj, "initial", "sigma_x", spec.sigma_x);
  spec.sigma_y = p.get<double>(obj, "initial", "sigma_y", spec.sigma_y);
  spec.omega = p.get<double>(obj, "initial", "omega", spec.omega);
  spec.cutoff_x = p.get<double>(obj, "initial", "cutoff_x", spec.cutoff_x);
  spec.cutoff_y = p.get<double>(obj, "initial", "cutoff_y", spec.cutoff_y);
  spec.kx = p.get<int>(obj, "initial", "kx", spec.kx);
  spec.ky = p.get<int>(obj, "initial", "ky", spec.ky);
  if (spec.sigma_x <= 0 || spec.sigma_y <= 0)
    p.fail("initial", "gaussian widths must be positive");
  if (spec.type == InitialSpec::Type::LineSoliton && spec.omega <= 0)
    p.fail("initial.omega", "must be positive");

  if (obj.is_object() && obj.contains("normalize")) {
    const json& nz = obj.at("normalize");
    p.check_keys(nz, "initial.normalize", {"norm", "value"});
    const std::string n = p.get<std::string>(nz, "initial.normalize", "norm", "l2");
    if (n == "l2")
      spec.normalize_kind = NormKind::l2();
    else if (n == "aniso_h_half")
      spec.normalize_kind = NormKind::aniso_hs(0.5);
    else if (n == "linf")
      spec.normalize_kind = NormKind::linf();
    else
      p.fail("initial.normalize.norm", "must be 'l2', 'aniso_h_half' or 'linf'");
    spec.normalize_value = p.get<double>(nz, "initial.normalize", "value", 1.0);
    if (spec.normalize_value <= 0) p.fail("initial.normalize.value", "must be positive");
  }
  return spec;
}

json grid_json(const GridSpec& g) {
  json j = {{"nx", g.nx}, {"ny", g.ny}, {"lx", g.lx}};
  j["y_domain"] = g.y_domain == YDomain::Torus ? "torus" : "truncated_line";
  j["ly"] = g.ly;
  return j;
}

json equation_json(const EquationParams& e) {
  return {{"p", e.p},
          {"sign", e.sign == Sign::Focusing ? "focusing" : "defocusing"},
          {"s", e.s}};
}

json ledger_row_json(const LedgerRow& r) {
  return {{"t", r.t},      {"mass", r.mass}, {"energy", r.energy}, {"l2hs", r.l2hs},
          {"h1l2", r.h1l2}, {"linf", r.linf}, {"N", r.blowup_n}};
}

json ratio_report_json(const RatioReport& r) {
  return {{"id", r.id},
          {"C_cal", r.c_cal},
          {"holdout_max", r.holdout_max},
          {"pass", r.pass},
          {"worst_seed_index", r.worst_index},
          {"params", r.note}};
}

// least-squares slope of log log(2+N) against log t; the Gronwall-shape
// diagnostic, reported and never asserted
std::optional<double> gronwall_beta_fit(const ConservedLedger& ledger) {
  std::vector<double> xs, ys;
  for (const auto& r : ledger.rows) {
    if (r.t <= 0.0 || !(r.blowup_n > 0.0)) continue;
    xs.push_back(std::log(r.t));
    ys.push_back(std::log(std::log(2.0 + r.blowup_n)));
  }
  if (xs.size() < 4) return std::nullopt;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double denom = n * sxx - sx * sx;
  if (std::abs(denom) < 1e-12) return std::nullopt;
  return (n * sxy - sx * sy) / denom;
}

// a-priori AnisoH^{1/2} ceiling solved from mass/energy with an embedding
// constant fitted on a fixed seeded ensemble plus the datum itself; reported,
// never asserted
json apriori_report(const ConservedLedger& ledger, const Field& u0,
                    const EquationParams& params, const GridSpec& grid) {
  json out;
  if (params.sign != Sign::Focusing || params.s != 0.5 || ledger.rows.empty()) return nullptr;
  auto aniso = [](const LedgerRow& r) { return std::sqrt(r.l2hs * r.l2hs + r.h1l2 * r.h1l2); };
  const double b0 = aniso(ledger.rows.front());
  double bmax = 0.0;
  for (const auto& r : ledger.rows) bmax = std::max(bmax, aniso(r));

  Ensemble fit{0xA11CEULL, 16,
               SpectrumSpec{SpectrumSpec::Kind::BandLimited,
                            std::min(8.0, two_pi * grid.nx / (4.0 * grid.lx)),
                            std::min(8.0, two_pi * grid.ny / (4.0 * grid.ly)), 2.0},
               grid};
  double c_embed = ratio_l6_embedding(u0);
  if (!std::isfinite(c_embed)) c_embed = 0.0;
  for (int i = 0; i < fit.count; ++i) {
    const double r = ratio_l6_embedding(fit.field(i));
    if (std::isfinite(r)) c_embed = std::max(c_embed, r);
  }

  const double p = params.p;
  const double m2 = 2.0 * ledger.rows.front().mass; // ||u0||_L2^2
  const double h0 = ledger.rows.front().energy;
  const double beta = 1.5 * (p - 1.0);
  const double coef = std::pow(c_embed, beta) / (p + 1.0) * std::pow(m2, 0.25 * (5.0 - p));
  auto f = [&](double b) { return 0.5 * b * b - m2 - coef * std::pow(b, beta) - h0; };

  std::optional<double> bound;
  double hi = std::max(b0, 1.0);
  for (int i = 0; i < 200 && f(hi) <= 0.0; ++i) hi *= 2.0;
  if (f(hi) > 0.0) {
    double lo = 0.0;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      (f(mid) > 0.0 ? hi : lo) = mid;
    }
    bound = hi;
  }

  out["b0"] = b0;
  out["b_max_run"] = bmax;
  out["c_embed_fit"] = c_embed;
  if (bound)
    out["b_bound"] = *bound;
  else
    out["b_bound"] = nullptr;
  out["bound_holds"] = bound ? json(bmax <= *bound) : json(nullptr);
  return out;
}

void write_summary(const fs::path& dir, const json& summary) {
  std::ofstream out(dir / "summary.json");
  if (!out) throw std::runtime_error((dir / "summary.json").string() + ": cannot write");
  out << summary.dump(2) << "\n";
}

std::string snapshot_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "snap_%06d.hwsfld", index);
  return buf;
}

} // namespace

ParseResult parse_config(const std::string& json_text) {
  ParseResult result;
  json root = json::parse(json_text, nullptr, false);
  if (root.is_discarded()) {
    result.errors.push_back("config: not well-formed JSON");
    return result;
  }
  Parser p{result.errors, result.warnings};
  p.check_keys(root, "config",
               {"experiment", "grid", "equation", "run", "initial", "ground_state", "stability",
                "picard", "inequalities", "scaling_check", "output_dir"});

  RunConfig cfg;

  const std::string exp = p.get<std::string>(root, "config", "experiment", "");
  if (exp == "evolve")
    cfg.experiment = Experiment::Evolve;
  else if (exp == "ground_state")
    cfg.experiment = Experiment::GroundState;
  else if (exp == "stability")
    cfg.experiment = Experiment::Stability;
  else if (exp == "picard")
    cfg.experiment = Experiment::Picard;
  else if (exp == "inequalities")
    cfg.experiment = Experiment::Inequalities;
  else if (exp == "scaling_check")
    cfg.experiment = Experiment::ScalingCheck;
  else
    p.fail("experiment", "must name one of evolve, ground_state, stability, picard, "
                         "inequalities, scaling_check");

  // grid
  if (!root.contains("grid")) {
    p.fail("grid", "section is required");
  } else {
    const json& g = root.at("grid");
    p.check_keys(g, "grid", {"nx", "ny", "lx", "y_domain", "ly"});
    const int nx = p.get<int>(g, "grid", "nx", 0);
    const int ny = p.get<int>(g, "grid", "ny", 0);
    const double lx = p.get<double>(g, "grid", "lx", 0.0);
    const std::string dom = p.get<std::string>(g, "grid", "y_domain", "torus");
    if (!power_of_two(nx) || nx < 8) p.fail("grid.nx", "must be a power of two >= 8");
    if (!power_of_two(ny) || ny < 8) p.fail("grid.ny", "must be a power of two >= 8");
    if (!(lx > 0)) p.fail("grid.lx", "must be positive");
    YDomain yd = YDomain::Torus;
    double ly = two_pi;
    if (dom == "torus") {
      if (g.contains("ly")) p.fail("grid.ly", "only valid for the truncated_line y-domain");
    } else if (dom == "truncated_line") {
      yd = YDomain::TruncatedLine;
      ly = p.get<double>(g, "grid", "ly", 0.0);
      if (!(ly > 0)) p.fail("grid.ly", "must be positive for a truncated line");
    } else {
      p.fail("grid.y_domain", "must be 'torus' or 'truncated_line'");
    }
    if (result.errors.empty()) cfg.grid = make_grid(nx, ny, lx, yd, ly);
  }

  // equation
  if (!root.contains("equation")) {
    p.fail("equation", "section is required");
  } else {
    const json& e = root.at("equation");
    p.check_keys(e, "equation", {"p", "sign", "s", "dealias"});
    const double pp = p.get<double>(e, "equation", "p", 2.0);
    const double s = p.get<double>(e, "equation", "s", 0.5);
    const std::string sign = p.get<std::string>(e, "equation", "sign", "focusing");
    const bool dealias = p.get<bool>(e, "equation", "dealias", false);
    if (!(pp > 1.0) || !(pp <= 5.0)) p.fail("equation.p", "must lie in (1, 5]");
    if (!(s >= 0.5) || !(s <= 1.0)) p.fail("equation.s", "must lie in [1/2, 1]");
    Sign sg = Sign::Focusing;
    if (sign == "focusing")
      sg = Sign::Focusing;
    else if (sign == "defocusing")
      sg = Sign::Defocusing;
    else
      p.fail("equation.sign", "must be 'focusing' or 'defocusing'");
    if (result.errors.empty()) {
      cfg.equation = make_params(pp, sg, s);
      cfg.equation.dealias = dealias;
      if (cfg.equation.extended_p) {
        cfg.warn_extended_p = true;
        result.warnings.push_back(
            "equation.p: values in (2, 5] are accepted for exploration only; the monitored "
            "bounds target p in (1, 2]");
      }
    }
  }

  // run
  if (root.contains("run")) {
    const json& r = root.at("run");
    p.check_keys(r, "run",
                 {"T", "dt", "sample_every", "snapshot_every", "seed", "blowup_ceiling"});
    cfg.T = p.get<double>(r, "run", "T", cfg.T);
    cfg.dt = p.get<double>(r, "run", "dt", cfg.dt);
    cfg.sample_every = p.get<int>(r, "run", "sample_every", cfg.sample_every);
    cfg.snapshot_every = p.get<int>(r, "run", "snapshot_every", cfg.snapshot_every);
    cfg.seed = p.get<std::uint64_t>(r, "run", "seed", cfg.seed);
    cfg.blowup_ceiling = p.get<double>(r, "run", "blowup_ceiling", cfg.blowup_ceiling);
    if (cfg.T < 0) p.fail("run.T", "must be nonnegative");
    if (!(cfg.dt > 0)) p.fail("run.dt", "must be positive");
    if (cfg.T > 0 && cfg.dt > cfg.T) p.fail("run.dt", "must not exceed run.T");
    if (cfg.sample_every < 1) p.fail("run.sample_every", "must be >= 1");
    if (cfg.snapshot_every < 0) p.fail("run.snapshot_every", "must be >= 0");
    if (!(cfg.blowup_ceiling > 0)) p.fail("run.blowup_ceiling", "must be positive");
  }

  if (root.contains("initial")) cfg.initial = parse_initial(p, root.at("initial"));

  if (root.contains("ground_state")) {
    const json& g = root.at("ground_state");
    p.check_keys(g, "ground_state",
                 {"eta", "omega_target", "seed_omega", "perturbation_cos_y", "dt", "tol",
                  "max_iter", "omega_sweep"});
    if (g.contains("eta")) cfg.ground_state.eta = p.get<double>(g, "ground_state", "eta", 0.0);
    if (g.contains("omega_target"))
      cfg.ground_state.omega_target = p.get<double>(g, "ground_state", "omega_target", 0.0);
    cfg.ground_state.seed_omega = p.get<double>(g, "ground_state", "seed_omega", 1.0);
    cfg.ground_state.perturbation_cos_y =
        p.get<double>(g, "ground_state", "perturbation_cos_y", 0.0);
    cfg.ground_state.dt = p.get<double>(g, "ground_state", "dt", 0.5);
    cfg.ground_state.tol = p.get<double>(g, "ground_state", "tol", 1e-8);
    cfg.ground_state.max_iter = p.get<int>(g, "ground_state", "max_iter", 50000);
    cfg.ground_state.omega_sweep =
        p.get<std::vector<double>>(g, "ground_state", "omega_sweep", {});
    if (cfg.ground_state.eta && *cfg.ground_state.eta <= 0)
      p.fail("ground_state.eta", "must be positive");
    if (cfg.ground_state.omega_target && *cfg.ground_state.omega_target <= 0)
      p.fail("ground_state.omega_target", "must be positive");
    if (!(cfg.ground_state.seed_omega > 0)) p.fail("ground_state.seed_omega", "must be positive");
    if (!(cfg.ground_state.dt > 0)) p.fail("ground_state.dt", "must be positive");
    if (!(cfg.ground_state.tol > 0)) p.fail("ground_state.tol", "must be positive");
    if (cfg.ground_state.max_iter < 1) p.fail("ground_state.max_iter", "must be >= 1");
  }

  if (root.contains("stability")) {
    const json& s = root.at("stability");
    p.check_keys(s, "stability", {"omega", "delta", "cutoff_x", "cutoff_y"});
    cfg.stability.omega = p.get<double>(s, "stability", "omega", 0.3);
    cfg.stability.delta = p.get<double>(s, "stability", "delta", 1e-2);
    cfg.stability.cutoff_x = p.get<double>(s, "stability", "cutoff_x", 1.0);
    cfg.stability.cutoff_y = p.get<double>(s, "stability", "cutoff_y", 2.0);
    if (!(cfg.stability.omega > 0)) p.fail("stability.omega", "must be positive");
    if (!(cfg.stability.delta > 0)) p.fail("stability.delta", "must be positive");
  }

  if (root.contains("picard")) {
    const json& q = root.at("picard");
    p.check_keys(q, "picard", {"M", "max_iter", "tol", "cross_check"});
    cfg.picard.nodes = p.get<int>(q, "picard", "M", 32);
    cfg.picard.max_iter = p.get<int>(q, "picard", "max_iter", 50);
    cfg.picard.tol = p.get<double>(q, "picard", "tol", 1e-12);
    cfg.picard.cross_check = p.get<bool>(q, "picard", "cross_check", true);
    if (cfg.picard.nodes < 8) p.fail("picard.M", "must be >= 8");
    if (cfg.picard.max_iter < 1) p.fail("picard.max_iter", "must be >= 1");
    if (!(cfg.picard.tol > 0)) p.fail("picard.tol", "must be positive");
  }

  if (root.contains("inequalities")) {
    const json& q = root.at("inequalities");
    p.check_keys(q, "inequalities",
                 {"count", "spectrum", "s", "trudinger_k", "strichartz_pairs", "strichartz_T",
                  "include_2d_variant"});
    cfg.inequalities.count = p.get<int>(q, "inequalities", "count", 64);
    if (q.contains("spectrum"))
      cfg.inequalities.spectrum = parse_spectrum(p, q.at("spectrum"), "inequalities.spectrum");
    cfg.inequalities.s = p.get<double>(q, "inequalities", "s", 1.0);
    cfg.inequalities.trudinger_k =
        p.get<std::vector<int>>(q, "inequalities", "trudinger_k", cfg.inequalities.trudinger_k);
    cfg.inequalities.strichartz_T = p.get<double>(q, "inequalities", "strichartz_T", 1.0);
    cfg.inequalities.include_2d_variant =
        p.get<bool>(q, "inequalities", "include_2d_variant", true);
    if (q.contains("strichartz_pairs")) {
      cfg.inequalities.strichartz_pairs.clear();
      if (!q.at("strichartz_pairs").is_array()) {
        p.fail("inequalities.strichartz_pairs", "must be an array of [q, r] pairs");
      } else {
        for (const auto& pr : q.at("strichartz_pairs")) {
          if (!pr.is_array() || pr.size() != 2) {
            p.fail("inequalities.strichartz_pairs", "each entry must be a [q, r] pair");
            continue;
          }
          const double qq = pr[0].get<double>();
          const double rr = pr[1].is_string() && pr[1].get<std::string>() == "inf"
                                ? std::numeric_limits<double>::infinity()
                                : pr[1].get<double>();
          if (std::abs(2.0 / qq + 1.0 / rr - 0.5) > 1e-12 || !(qq > 2.0))
            p.fail("inequalities.strichartz_pairs",
                   "pair must satisfy 2/q + 1/r = 1/2 with q > 2");
          cfg.inequalities.strichartz_pairs.emplace_back(qq, rr);
        }
      }
    }
    if (cfg.inequalities.count < 2) p.fail("inequalities.count", "must be >= 2");
    if (!(cfg.inequalities.s > 0.5))
      p.fail("inequalities.s", "must exceed 1/2 for the log-kernel checks");
    for (int k : cfg.inequalities.trudinger_k)
      if (k <= 2 || k > 64) p.fail("inequalities.trudinger_k", "entries must lie in (2, 64]");
  }

  if (root.contains("scaling_check")) {
    const json& s = root.at("scaling_check");
    p.check_keys(s, "scaling_check", {"lambda"});
    cfg.scaling.lambda = p.get<double>(s, "scaling_check", "lambda", 2.0);
    if (!(cfg.scaling.lambda > 0)) p.fail("scaling_check.lambda", "must be positive");
  }

  if (cfg.experiment == Experiment::ScalingCheck && cfg.grid.y_domain == YDomain::Torus &&
      result.errors.empty())
    p.fail("scaling_check", "requires the truncated_line y-domain (torus does not scale)");

  cfg.output_dir = p.get<std::string>(root, "config", "output_dir", cfg.output_dir);

  if (!result.errors.empty()) return result;
  result.config = cfg;
  return result;
}

Field build_initial(const InitialSpec& spec, const GridSpec& grid, const EquationParams& params,
                    std::uint64_t seed) {
  Field f = Field::zeros(grid);
  switch (spec.type) {
    case InitialSpec::Type::Gaussian: {
      const double inv2sx = 1.0 / (2.0 * spec.sigma_x * spec.sigma_x);
      const double kappa_y = 1.0 / (spec.sigma_y * spec.sigma_y);
      const double yc = grid.y_domain == YDomain::Torus ? 3.141592653589793 : 0.5 * grid.ly;
      f = Field::sample(grid, [&](double x, double y) {
        const double gx = std::exp(-x * x * inv2sx);
        // periodic (von Mises) bell on the torus, plain Gaussian otherwise
        const double gy = grid.y_domain == YDomain::Torus
                              ? std::exp(kappa_y * (std::cos(y - yc) - 1.0))
                              : std::exp(-(y - yc) * (y - yc) * 0.5 * kappa_y);
        return cplx(spec.amplitude * gx * gy, 0.0);
      });
      break;
    }
    case InitialSpec::Type::LineSoliton:
      f = line_soliton(spec.omega, params, grid);
      break;
    case InitialSpec::Type::RandomBandLimited: {
      Ensemble ens{seed, 1,
                   SpectrumSpec{SpectrumSpec::Kind::BandLimited, spec.cutoff_x, spec.cutoff_y,
                                2.0},
                   grid};
      const Field sample = ens.field(0);
      std::vector<cplx> c(sample.coefficients().begin(), sample.coefficients().end());
      for (cplx& z : c) z *= spec.amplitude;
      f = Field::from_spectral(grid, std::move(c));
      break;
    }
    case InitialSpec::Type::SingleMode:
      f = Field::sample(grid, [&](double x, double y) {
        const double phase = two_pi * spec.kx / grid.lx * x + two_pi * spec.ky / grid.ly * y;
        return spec.amplitude * cplx(std::cos(phase), std::sin(phase));
      });
      break;
  }
  if (spec.normalize_kind) {
    const double n = norm(f, *spec.normalize_kind);
    if (n == 0.0) throw std::invalid_argument("initial: cannot normalize a zero field");
    const double r = spec.normalize_value / n;
    std::vector<cplx> c(f.coefficients().begin(), f.coefficients().end());
    for (cplx& z : c) z *= r;
    f = Field::from_spectral(grid, std::move(c));
  }
  return f;
}

namespace {

int run_evolve(const RunConfig& cfg, const fs::path& outdir, json& summary) {
  const Field u0 = build_initial(cfg.initial, cfg.grid, cfg.equation, cfg.seed);
  EvolveOptions opts{cfg.T, cfg.dt, cfg.sample_every, cfg.snapshot_every, cfg.blowup_ceiling};
  const EvolveResult res = evolve(u0, cfg.equation, opts);

  io::write_ledger_csv(outdir / "ledger.csv", res.ledger);
  int index = 0;
  for (const auto& [t, field] : res.snapshots)
    io::write_snapshot(outdir / snapshot_name(index++), field, t, cfg.equation);

  summary["mass_drift"] = res.ledger.relative_mass_drift();
  summary["energy_drift"] = res.ledger.relative_energy_drift();
  summary["rows"] = res.ledger.rows.size();
  summary["snapshots"] = index;
  summary["final"] = ledger_row_json(res.ledger.rows.back());
  // H2 growth is monitored, never asserted
  summary["h2_initial"] = norm(u0, NormKind::full_hs(2.0));
  summary["h2_final"] = norm(res.final_state, NormKind::full_hs(2.0));
  summary["max_tail_fraction"] = res.max_tail_fraction;
  const Exponents ex = Exponents::from_p(std::min(cfg.equation.p, 4.999999));
  json gron = {{"beta_theory", (5.0 - cfg.equation.p) / (7.0 - 3.0 * cfg.equation.p)}};
  if (auto beta = gronwall_beta_fit(res.ledger))
    gron["beta_fit"] = *beta;
  else
    gron["beta_fit"] = nullptr;
  gron["q_prime"] = ex.q_prime;
  summary["gronwall"] = gron;

  // phase-corrected deviation from the exact standing wave e^{i w t} R_w
  if (cfg.initial.type == InitialSpec::Type::LineSoliton &&
      cfg.equation.sign == Sign::Focusing) {
    const Field ref = line_soliton(cfg.initial.omega, cfg.equation, cfg.grid);
    const double ref_l2 = norm(ref, NormKind::l2());
    auto dev = [&](const Field& u, double t) {
      const cplx ph(std::cos(cfg.initial.omega * t), std::sin(cfg.initial.omega * t));
      double d2 = 0.0;
      for (std::size_t n = 0; n < cfg.grid.size(); ++n)
        d2 += std::norm(u.coefficients()[n] - ph * ref.coefficients()[n]);
      return std::sqrt(d2 * cfg.grid.lx * cfg.grid.ly) / ref_l2;
    };
    double worst = dev(res.final_state, res.ledger.rows.back().t);
    for (const auto& [t, field] : res.snapshots) worst = std::max(worst, dev(field, t));
    summary["standing_wave_max_rel_error"] = worst;
  }
  summary["apriori_h_half"] = apriori_report(res.ledger, u0, cfg.equation, cfg.grid);
  if (res.max_tail_fraction > 1e-8)
    summary["warnings"].push_back("tail mass fraction exceeded 1e-8; increase lx");
  summary["status"] = res.blowup_suspected ? "blow_up_suspected" : "ok";
  return res.blowup_suspected ? 3 : 0;
}

int run_ground_state(const RunConfig& cfg, const fs::path& outdir, json& summary) {
  const GroundStateBlock& b = cfg.ground_state;
  GradientFlowOptions opts{b.dt, b.tol, b.max_iter};

  GroundState gs{Field::zeros(cfg.grid)};
  if (b.omega_target) {
    gs = solve_for_omega(*b.omega_target, cfg.equation, cfg.grid, opts);
  } else {
    const double seed_om = b.seed_omega;
    Field seed_field = line_soliton(seed_om, cfg.equation, cfg.grid);
    if (b.perturbation_cos_y != 0.0) {
      std::vector<cplx> v(seed_field.values().begin(), seed_field.values().end());
      for (int i = 0; i < cfg.grid.nx; ++i)
        for (int j = 0; j < cfg.grid.ny; ++j)
          v[cfg.grid.at(i, j)] *=
              1.0 + b.perturbation_cos_y * std::cos(two_pi * cfg.grid.y(j) / cfg.grid.ly);
      seed_field = Field::from_physical(cfg.grid, std::move(v));
    }
    const double eta = b.eta ? *b.eta : mass(line_soliton(seed_om, cfg.equation, cfg.grid));
    gs = gradient_flow(seed_field, eta, cfg.equation, opts);
  }

  io::write_snapshot(outdir / "profile.hwsfld", gs.profile, 0.0, cfg.equation);
  summary["omega"] = gs.omega;
  summary["eta"] = gs.eta;
  summary["residual_l2"] = gs.residual_l2;
  summary["iterations"] = gs.iterations;
  summary["source"] = gs.source == GroundStateSource::GradientFlow ? "gradient_flow"
                                                                   : "line_soliton_formula";
  summary["converged"] = gs.converged;
  summary["max_h_increase"] = gs.max_h_increase;
  summary["y_energy_fraction"] = y_energy_fraction(gs.profile);

  if (!b.omega_sweep.empty()) {
    json sweep = json::array();
    for (const auto& pt : omega_sweep(b.omega_sweep, cfg.equation, cfg.grid, opts)) {
      sweep.push_back({{"omega_target", pt.omega_target},
                       {"omega_est", pt.omega_est},
                       {"residual_l2", pt.residual_l2},
                       {"y_fraction", pt.y_fraction},
                       {"line_like", pt.line_like}});
    }
    summary["sweep"] = sweep;
  }
  summary["status"] = gs.converged ? "ok" : "max_iter_exhausted";
  return 0;
}

int run_stability(const RunConfig& cfg, const fs::path& outdir, json& summary) {
  const StabilityBlock& b = cfg.stability;
  const Field profile = line_soliton(b.omega, cfg.equation, cfg.grid);
  GroundState q{profile, b.omega, elliptic_residual(profile, b.omega, cfg.equation),
                mass(profile), 0, GroundStateSource::LineSolitonFormula, true, 0.0};

  Ensemble ens{cfg.seed, 1,
               SpectrumSpec{SpectrumSpec::Kind::BandLimited, b.cutoff_x, b.cutoff_y, 2.0},
               cfg.grid};
  Field pert = ens.field(0);
  const double pn = norm(pert, NormKind::aniso_hs(0.5));
  std::vector<cplx> c(pert.coefficients().begin(), pert.coefficients().end());
  for (cplx& z : c) z *= b.delta / pn;
  pert = Field::from_spectral(cfg.grid, std::move(c));

  const StabilityResult res =
      stability_experiment(q, pert, cfg.equation, cfg.T, cfg.dt, cfg.sample_every);

  // snapshots carry the ledger cadence, so the distance series lines up
  std::vector<StabilitySample> aligned = res.series;
  if (aligned.size() != res.evolution.ledger.rows.size()) aligned.clear();
  io::write_ledger_csv(outdir / "ledger.csv", res.evolution.ledger,
                       aligned.empty() ? nullptr : &aligned);

  summary["ground_state_omega"] = b.omega;
  summary["ground_state_residual"] = q.residual_l2;
  summary["delta"] = b.delta;
  summary["initial_distance"] = res.series.front().distance;
  summary["max_orbit_distance"] = res.max_distance;
  summary["rows"] = res.evolution.ledger.rows.size();
  summary["max_tail_fraction"] = res.evolution.max_tail_fraction;
  if (res.evolution.max_tail_fraction > 1e-8)
    summary["warnings"].push_back("tail mass fraction exceeded 1e-8; increase lx");
  summary["status"] = res.evolution.blowup_suspected ? "blow_up_suspected" : "ok";
  return res.evolution.blowup_suspected ? 3 : 0;
}

int run_picard(const RunConfig& cfg, const fs::path& outdir, json& summary) {
  const Field u0 = build_initial(cfg.initial, cfg.grid, cfg.equation, cfg.seed);
  const PicardBlock& b = cfg.picard;
  const ContractionReport rep =
      picard_solve(u0, cfg.equation, cfg.T, b.nodes, b.max_iter, b.tol);

  summary["converged"] = rep.converged;
  summary["diverged"] = rep.diverged;
  summary["iterations"] = rep.iterations;
  summary["rho"] = rep.rho;
  summary["diffs"] = rep.diffs;

  if (b.cross_check) {
    EvolveOptions opts{cfg.T, cfg.T / b.nodes, b.nodes, 0, cfg.blowup_ceiling};
    const EvolveResult split = evolve(u0, cfg.equation, opts);
    const Field& fp = rep.trajectory.fields.back();
    double diff2 = 0.0, ref2 = 0.0;
    for (std::size_t n = 0; n < cfg.grid.size(); ++n) {
      diff2 += std::norm(fp.coefficients()[n] - split.final_state.coefficients()[n]);
      ref2 += std::norm(split.final_state.coefficients()[n]);
    }
    summary["split_step_rel_l2_diff"] = ref2 > 0 ? std::sqrt(diff2 / ref2) : 0.0;
  }

  io::write_snapshot(outdir / "fixed_point.hwsfld", rep.trajectory.fields.back(), cfg.T,
                     cfg.equation);
  summary["status"] = rep.converged ? "ok" : (rep.diverged ? "diverged" : "max_iter_exhausted");
  return 0;
}

int run_inequalities(const RunConfig& cfg, const fs::path&, json& summary) {
  const InequalitiesBlock& b = cfg.inequalities;
  Ensemble ens{cfg.seed, b.count, b.spectrum, cfg.grid};

  json reports = json::array();
  bool all_pass = true;
  auto push = [&](const RatioReport& r) {
    reports.push_back(ratio_report_json(r));
    all_pass = all_pass && r.pass;
  };

  const InterpolationReport interp = check_apriori_interpolation(ens, cfg.equation.p);
  push(interp.holder);
  push(interp.embedding);
  push(check_brezis_gallouet(ens, b.s, false));
  if (b.include_2d_variant) push(check_brezis_gallouet(ens, std::max(b.s, 2.0), true));
  push(check_trudinger(ens, b.trudinger_k));
  for (const auto& [q, r] : b.strichartz_pairs)
    push(check_strichartz(ens, q, r, b.strichartz_T));
  push(check_nonlinearity_sobolev(ens, std::min(b.s, 1.0), cfg.equation.p));
  push(check_quadratic_h2(ens));

  summary["inequalities"] = reports;
  summary["all_pass"] = all_pass;
  summary["status"] = "ok";
  return 0;
}

int run_scaling_check(const RunConfig& cfg, const fs::path&, json& summary) {
  const Field u0 = build_initial(cfg.initial, cfg.grid, cfg.equation, cfg.seed);
  const double lam = cfg.scaling.lambda;

  // evolve-then-scale against scale-then-evolve on matched step counts
  EvolveOptions slow{cfg.T * lam * lam, cfg.dt * lam * lam, cfg.sample_every, 0,
                     cfg.blowup_ceiling};
  const Field a = scaling_transform(evolve(u0, cfg.equation, slow).final_state, lam, cfg.equation);

  EvolveOptions fast{cfg.T, cfg.dt, cfg.sample_every, 0, cfg.blowup_ceiling};
  const Field b = evolve(scaling_transform(u0, lam, cfg.equation), cfg.equation, fast).final_state;

  double diff2 = 0.0, ref2 = 0.0;
  for (std::size_t n = 0; n < a.grid().size(); ++n) {
    diff2 += std::norm(a.coefficients()[n] - b.coefficients()[n]);
    ref2 += std::norm(b.coefficients()[n]);
  }
  summary["lambda"] = lam;
  summary["rel_l2_mismatch"] = ref2 > 0 ? std::sqrt(diff2 / ref2) : 0.0;
  summary["status"] = "ok";
  return 0;
}

} // namespace

int run_experiment(const RunConfig& cfg, const std::string& output_override) {
  const fs::path outdir = output_override.empty() ? fs::path(cfg.output_dir)
                                                  : fs::path(output_override);
  std::error_code ec;
  fs::create_directories(outdir, ec);
  if (ec) throw std::runtime_error(outdir.string() + ": cannot create output directory");

  json summary;
  summary["experiment"] = experiment_name(cfg.experiment);
  summary["grid"] = grid_json(cfg.grid);
  summary["equation"] = equation_json(cfg.equation);
  summary["run"] = {{"T", cfg.T},
                    {"dt", cfg.dt},
                    {"sample_every", cfg.sample_every},
                    {"seed", cfg.seed}};
  summary["warnings"] = json::array();
  if (cfg.warn_extended_p) summary["warnings"].push_back("p exceeds 2: monitoring only");

  int code = 0;
  try {
    switch (cfg.experiment) {
      case Experiment::Evolve: code = run_evolve(cfg, outdir, summary); break;
      case Experiment::GroundState: code = run_ground_state(cfg, outdir, summary); break;
      case Experiment::Stability: code = run_stability(cfg, outdir, summary); break;
      case Experiment::Picard: code = run_picard(cfg, outdir, summary); break;
      case Experiment::Inequalities: code = run_inequalities(cfg, outdir, summary); break;
      case Experiment::ScalingCheck: code = run_scaling_check(cfg, outdir, summary); break;
    }
  } catch (const EvolveNanError& e) {
    summary["status"] = "nan";
    summary["nan_step"] = e.step;
    code = 3;
  }
  write_summary(outdir, summary);
  return code;
}

} // namespace hwlab
