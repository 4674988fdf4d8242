// hwlab: pseudo-spectral laboratory for the anisotropic half-wave
// Schrodinger equation i u_t + (dxx - |Dy|) u = +-|u|^{p-1} u on a cylinder.

#include "hwlab/acceptance.hpp"
#include "hwlab/config.hpp"
#include "hwlab/parallel.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

int thread_budget(int cli_threads) {
  if (cli_threads > 0) return cli_threads;
  if (const char* env = std::getenv("HWLAB_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return 1;
}

int cmd_run(const std::string& config_path, const std::string& output, int threads) {
  std::ifstream in(config_path);
  if (!in) {
    std::cerr << "error: cannot open config " << config_path << "\n";
    return 2;
  }
  std::stringstream buf;
  buf << in.rdbuf();

  const hwlab::ParseResult parsed = hwlab::parse_config(buf.str());
  for (const std::string& w : parsed.warnings) std::cerr << "warning: " << w << "\n";
  if (!parsed.ok()) {
    std::cerr << "config validation failed:\n";
    for (const std::string& e : parsed.errors) std::cerr << "  - " << e << "\n";
    return 2;
  }

  hwlab::set_max_threads(thread_budget(threads));
  try {
    const int code = hwlab::run_experiment(*parsed.config, output);
    if (code == 3) std::cerr << "run flagged: NaN or suspected blow-up (see summary.json)\n";
    return code;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
}

int cmd_verify(const std::string& suite, const std::string& recipes, int threads) {
  hwlab::set_max_threads(thread_budget(threads));
  std::vector<hwlab::CriterionResult> results;
  try {
    results = hwlab::run_acceptance(suite, recipes);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  bool failed = false;
  for (const auto& r : results) {
    std::cout << "[" << r.status << "] " << r.index << ". " << r.name << ": " << r.detail
              << "  (" << static_cast<int>(r.seconds * 1000) << " ms)\n";
    failed = failed || r.failed();
  }
  return failed ? 1 : 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"hwlab - half-wave Schrodinger equation laboratory"};
  app.require_subcommand(1);

  std::string config_path, output, suite;
  std::string recipes = "docs/recipes";
  int threads = 0;

  CLI::App* run = app.add_subcommand("run", "run an experiment from a JSON config");
  run->add_option("config", config_path, "config file")->required();
  run->add_option("--output", output, "output directory (overrides config)");
  run->add_option("--threads", threads, "worker threads (default HWLAB_THREADS or 1)");

  CLI::App* verify = app.add_subcommand("verify", "run a named acceptance suite");
  verify->add_option("suite", suite, "suite name or 'all'")->required();
  verify->add_option("--recipes", recipes, "recipe directory for recipe-driven checks");
  verify->add_option("--threads", threads, "worker threads");

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) return cmd_run(config_path, output, threads);
  return cmd_verify(suite, recipes, threads);
}
