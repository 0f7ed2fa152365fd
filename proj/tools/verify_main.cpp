// verify: batch driver for the half-space conormal calculus checks.
//
//   verify --config configs/default.json --suite transforms --out reports/
//
// Exit codes: 0 all checks pass, 1 check failure, 2 config/schema violation,
// 3 internal assembly inconsistency.

#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "conormal/suites.hpp"

int main(int argc, char** argv) {
  using namespace conormal;

  CLI::App app{"numerical verification suites for the half-space conormal "
               "operator calculus"};
  std::string config_path;
  std::string suite = "all";
  std::string out_dir;
  std::string format = "both";
  std::vector<double> sweep_override;
  std::uint64_t seed_override = 0;
  bool seed_set = false;

  app.add_option("--config", config_path, "run configuration (JSON)")
      ->required();
  app.add_option("--suite", suite, "suite to run")
      ->check(CLI::IsMember(suite_names()));
  app.add_option("--gamma-sweep", sweep_override,
                 "override the gamma sweep (increasing values >= 1)");
  auto* seed_opt =
      app.add_option("--seed", seed_override, "override the sample seed");
  app.add_option("--out", out_dir, "output directory (default from config)");
  app.add_option("--format", format, "report format")
      ->check(CLI::IsMember(std::vector<std::string>{"json", "csv", "both"}));

  CLI11_PARSE(app, argc, argv);
  seed_set = seed_opt->count() > 0;

  RunConfig cfg;
  try {
    cfg = load_config(config_path);
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }

  if (!sweep_override.empty()) {
    double prev = 0.0;
    for (double g : sweep_override) {
      if (g < 1.0 || g <= prev) {
        std::cerr << "config error at --gamma-sweep: values must be "
                     "increasing and >= 1\n";
        return 2;
      }
      prev = g;
    }
    cfg.sweep = sweep_override;
  }
  if (seed_set) cfg.seed = seed_override;
  if (!out_dir.empty()) cfg.out_dir = out_dir;
  // Environment override for the output directory only.
  if (const char* envout = std::getenv("CONORMAL_OUT"))
    if (out_dir.empty()) cfg.out_dir = envout;

  try {
    SuiteEnvironment env(cfg);
    std::vector<CheckResult> results = run_suite(env, suite);
    ReportFiles files = emit_report(results, cfg.out_dir, format, suite);
    for (const auto& r : results)
      std::cout << r.status << "  " << r.id << "  measured=" << r.measured
                << " tol=" << r.tolerance << "\n";
    if (!files.report_json.empty())
      std::cout << "report: " << files.report_json << "\n";
    return exit_code_for(results);
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
}
