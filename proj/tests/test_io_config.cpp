#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hwlab/config.hpp"
#include "hwlab/io.hpp"
#include "test_util.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace hwlab;
using namespace hwlab::test;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& tag) {
  const fs::path p = fs::temp_directory_path() / ("hwlab_test_" + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

const char* kMinimalEvolve = R"({
  "experiment": "evolve",
  "grid": {"nx": 16, "ny": 8, "lx": 20.0},
  "equation": {"p": 2.0, "sign": "focusing", "s": 0.5},
  "run": {"T": 0.0, "dt": 0.01, "sample_every": 1, "seed": 7}
})";

} // namespace

TEST_CASE("format_double: 17 significant digits, point decimal, round trip") {
  CHECK(io::format_double(0.5) == "0.5");
  CHECK(io::format_double(-3.0) == "-3");
  const double v = 0.1234567890123456789;
  const std::string s = io::format_double(v);
  CHECK(s.find(',') == std::string::npos);
  CHECK(std::stod(s) == v);
  CHECK(io::format_double(1e-300).find("e-300") != std::string::npos);
}

TEST_CASE("snapshot round trip is bit exact") {
  const fs::path dir = temp_dir("snap");
  const GridSpec g = make_grid(32, 16, 25.0, YDomain::TruncatedLine, 12.0);
  const EquationParams params = make_params(1.7, Sign::Defocusing, 0.8);
  const Field f = noise_field(g, 321);

  io::write_snapshot(dir / "a.hwsfld", f, 2.5, params);
  const io::Snapshot back = io::read_snapshot(dir / "a.hwsfld");

  CHECK(back.t == 2.5);
  CHECK(back.p == 1.7);
  CHECK(back.sign == "defocusing");
  CHECK(back.field.grid() == g);
  for (std::size_t n = 0; n < g.size(); ++n)
    CHECK(back.field.values()[n] == f.values()[n]);

  // leading bytes carry the magic and a little-endian header length
  const std::string bytes = slurp(dir / "a.hwsfld");
  REQUIRE(bytes.size() > 12);
  CHECK(bytes.substr(0, 8) == "HWSFLD01");
  const auto hlen = static_cast<unsigned char>(bytes[8]) |
                    (static_cast<unsigned char>(bytes[9]) << 8);
  CHECK(bytes.substr(12, 1) == "{");
  CHECK(bytes.size() == 12 + hlen + g.size() * 16);
  fs::remove_all(dir);
}

TEST_CASE("read_snapshot rejects corrupted files") {
  const fs::path dir = temp_dir("corrupt");
  std::ofstream(dir / "bad.hwsfld") << "NOTMAGIC garbage";
  CHECK_THROWS(io::read_snapshot(dir / "bad.hwsfld"));
  CHECK_THROWS(io::read_snapshot(dir / "missing.hwsfld"));
  fs::remove_all(dir);
}

TEST_CASE("ledger csv format") {
  const fs::path dir = temp_dir("csv");
  ConservedLedger ledger;
  ledger.rows.push_back({0.0, 1.0, -0.25, 1.5, 2.5, 0.75, 1.7});
  ledger.rows.push_back({0.5, 1.0, -0.25, 1.5, 2.5, 0.75, 1.7});
  io::write_ledger_csv(dir / "ledger.csv", ledger);
  const std::string text = slurp(dir / "ledger.csv");
  CHECK(text.rfind("t,mass,energy,l2hs,h1l2,linf,N\n", 0) == 0);
  CHECK(text.find("0.5,1,-0.25,1.5,2.5,0.75,1.7") != std::string::npos);
  CHECK(text.find(',') != std::string::npos);

  std::vector<StabilitySample> orbit = {{0.0, 0.1}, {0.5, 0.2}};
  io::write_ledger_csv(dir / "ledger2.csv", ledger, &orbit);
  CHECK(slurp(dir / "ledger2.csv").rfind("t,mass,energy,l2hs,h1l2,linf,N,orbit_dist\n", 0) == 0);
  fs::remove_all(dir);
}

TEST_CASE("parse_config accepts a minimal evolve config") {
  const ParseResult r = parse_config(kMinimalEvolve);
  REQUIRE(r.ok());
  CHECK(r.config->experiment == Experiment::Evolve);
  CHECK(r.config->grid.nx == 16);
  CHECK(r.config->seed == 7);
}

TEST_CASE("parse_config names the offending field") {
  auto has_error_on = [](const ParseResult& r, const std::string& field) {
    for (const std::string& e : r.errors)
      if (e.rfind(field, 0) == 0) return true;
    return false;
  };

  ParseResult r = parse_config(R"({"experiment":"evolve",
    "grid":{"nx":16,"ny":8,"lx":20.0},
    "equation":{"p":0.5,"sign":"focusing","s":0.5}})");
  CHECK(!r.ok());
  CHECK(has_error_on(r, "equation.p"));

  r = parse_config(R"({"experiment":"evolve",
    "grid":{"nx":16,"ny":8,"lx":20.0},
    "equation":{"p":2.0,"sign":"focusing","s":0.3}})");
  CHECK(has_error_on(r, "equation.s"));

  r = parse_config(R"({"experiment":"evolve",
    "grid":{"nx":100,"ny":8,"lx":20.0},
    "equation":{"p":2.0,"sign":"focusing","s":0.5}})");
  CHECK(has_error_on(r, "grid.nx"));

  r = parse_config(R"({"experiment":"evolve",
    "grid":{"nx":16,"ny":8,"lx":20.0},
    "equation":{"p":2.0,"sign":"focusing","s":0.5},
    "run":{"T":0.5,"dt":1.0,"sample_every":1,"seed":1}})");
  CHECK(has_error_on(r, "run.dt"));

  r = parse_config(R"({"experiment":"evolve",
    "grid":{"nx":16,"ny":8,"lx":20.0,"frobnicate":3},
    "equation":{"p":2.0,"sign":"focusing","s":0.5}})");
  CHECK(has_error_on(r, "grid"));
  CHECK(!r.ok());

  r = parse_config("{nope");
  CHECK(!r.ok());
}

TEST_CASE("extended p is accepted with a warning") {
  const ParseResult r = parse_config(R"({"experiment":"evolve",
    "grid":{"nx":16,"ny":8,"lx":20.0},
    "equation":{"p":3.0,"sign":"defocusing","s":0.5}})");
  REQUIRE(r.ok());
  CHECK(r.config->warn_extended_p);
  CHECK(!r.warnings.empty());
}

TEST_CASE("evolve run writes ledger, summary and exits clean") {
  const fs::path dir = temp_dir("run_evolve");
  const ParseResult r = parse_config(R"({
    "experiment": "evolve",
    "grid": {"nx": 32, "ny": 8, "lx": 20.0},
    "equation": {"p": 2.0, "sign": "focusing", "s": 0.5},
    "run": {"T": 0.05, "dt": 0.01, "sample_every": 1, "snapshot_every": 5, "seed": 3},
    "initial": {"type": "gaussian", "amplitude": 0.5, "sigma_x": 2.0, "sigma_y": 1.0}
  })");
  REQUIRE(r.ok());
  CHECK(run_experiment(*r.config, dir.string()) == 0);
  CHECK(fs::exists(dir / "ledger.csv"));
  CHECK(fs::exists(dir / "summary.json"));
  CHECK(fs::exists(dir / "snap_000000.hwsfld"));
  const std::string summary = slurp(dir / "summary.json");
  CHECK(summary.find("\"mass_drift\"") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("evolve with T = 0 leaves a single ledger row") {
  const fs::path dir = temp_dir("run_t0");
  const ParseResult r = parse_config(kMinimalEvolve);
  REQUIRE(r.ok());
  CHECK(run_experiment(*r.config, dir.string()) == 0);
  const std::string csv = slurp(dir / "ledger.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 2); // header + one row
  fs::remove_all(dir);
}

TEST_CASE("blow-up flag surfaces as exit code 3") {
  const fs::path dir = temp_dir("run_blowup");
  const ParseResult r = parse_config(R"({
    "experiment": "evolve",
    "grid": {"nx": 16, "ny": 8, "lx": 20.0},
    "equation": {"p": 2.0, "sign": "focusing", "s": 0.5},
    "run": {"T": 0.02, "dt": 0.01, "sample_every": 1, "seed": 1, "blowup_ceiling": 1e-9},
    "initial": {"type": "gaussian"}
  })");
  REQUIRE(r.ok());
  CHECK(run_experiment(*r.config, dir.string()) == 3);
  const std::string summary = slurp(dir / "summary.json");
  CHECK(summary.find("blow_up_suspected") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("summary bytes are identical across reruns with one seed") {
  const ParseResult r = parse_config(R"({
    "experiment": "evolve",
    "grid": {"nx": 32, "ny": 8, "lx": 20.0},
    "equation": {"p": 2.0, "sign": "focusing", "s": 0.5},
    "run": {"T": 0.05, "dt": 0.01, "sample_every": 1, "seed": 99},
    "initial": {"type": "random_band_limited", "cutoff_x": 2.0, "cutoff_y": 2.0,
                 "normalize": {"norm": "l2", "value": 0.5}}
  })");
  REQUIRE(r.ok());
  const fs::path a = temp_dir("det_a");
  const fs::path b = temp_dir("det_b");
  CHECK(run_experiment(*r.config, a.string()) == 0);
  CHECK(run_experiment(*r.config, b.string()) == 0);
  CHECK(slurp(a / "summary.json") == slurp(b / "summary.json"));
  CHECK(!slurp(a / "summary.json").empty());
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("picard experiment produces a contraction summary") {
  const fs::path dir = temp_dir("run_picard");
  const ParseResult r = parse_config(R"({
    "experiment": "picard",
    "grid": {"nx": 32, "ny": 8, "lx": 20.0},
    "equation": {"p": 2.0, "sign": "focusing", "s": 0.5},
    "run": {"T": 0.1, "dt": 0.01, "sample_every": 1, "seed": 4},
    "initial": {"type": "gaussian", "amplitude": 0.1},
    "picard": {"M": 16, "max_iter": 30, "tol": 1e-11}
  })");
  REQUIRE(r.ok());
  CHECK(run_experiment(*r.config, dir.string()) == 0);
  const std::string summary = slurp(dir / "summary.json");
  CHECK(summary.find("\"rho\"") != std::string::npos);
  CHECK(summary.find("\"split_step_rel_l2_diff\"") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("scaling_check demands a truncated line") {
  const ParseResult r = parse_config(R"({
    "experiment": "scaling_check",
    "grid": {"nx": 16, "ny": 8, "lx": 20.0},
    "equation": {"p": 2.0, "sign": "focusing", "s": 0.5}})");
  CHECK(!r.ok());
}

TEST_CASE("single mode initial data and linf normalization") {
  const GridSpec g = make_grid(16, 8, 10.0, YDomain::Torus);
  InitialSpec spec;
  spec.type = InitialSpec::Type::SingleMode;
  spec.kx = 1;
  spec.ky = 2;
  spec.normalize_kind = NormKind::linf();
  spec.normalize_value = 2.0;
  const Field f = build_initial(spec, g, make_params(2.0, Sign::Focusing), 0);
  CHECK(norm(f, NormKind::linf()) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(std::abs(f.coeff_at(1, 2)) == doctest::Approx(2.0).epsilon(1e-12));
}
