// Run configuration: JSON description of the grid, cutoff, sweep, toy
// problem and suite selection.  The defaults reproduce the acceptance setup.

#pragma once

#include <cstdint>

#include <json.hpp>

#include "conormal/pipeline.hpp"

namespace conormal {

struct RunConfig {
  HalfSpaceGrid grid = HalfSpaceGrid::default2d();
  double cutoff_safety = 0.9;
  std::vector<double> sweep = {1, 2, 4, 8, 16, 32, 64};
  std::uint64_t seed = 20260809ULL;
  int samples_per_family = 2;
  std::vector<std::string> families = {"gauss", "bump", "osc"};
  std::string suite = "all";
  std::string out_dir = "reports";

  // Toy problem description.
  int toy_N = 3, toy_r = 2, toy_s = 1, toy_d = 2;
  double toy_margin = 0.5;
  std::uint64_t toy_coefficient_seed = 0x7a1ce5ULL;
  // A1 invertible block: constant part and cosine modes (lattice multiples).
  Eigen::MatrixXd toy_a1_c0 = Eigen::MatrixXd{{2.0, 0.3}, {-0.2, 1.7}};
  struct A1Mode {
    std::vector<int> k;   // lattice frequency multiples per axis
    double phase = 0.0;
    Eigen::MatrixXd m;
  };
  std::vector<A1Mode> toy_a1_modes;

  RunConfig();  // fills toy_a1_modes with the defaults

  ToyBVP build_toy() const;
  CutoffSpec build_cutoff() const { return conormal::build_cutoff(grid.delta0, grid.n, cutoff_safety); }
};

// Parses and validates a config file; error messages carry a pointer to the
// offending field.  Throws ConfigError on violation (CLI exit code 2).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

RunConfig load_config(const std::string& path);
RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& c);

// The published schema as a JSON document (written next to the reports and
// shipped under configs/).
std::string config_schema_text();

}  // namespace conormal
