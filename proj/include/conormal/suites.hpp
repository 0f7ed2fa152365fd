// Named verification suites over the calculus.
//
// Check identifiers are frozen strings keyed to the verified statements;
// renaming one is a breaking change for report consumers.

#pragma once

#include "conormal/config.hpp"
#include "conormal/report.hpp"

namespace conormal {

// Shared state for a run: grids, banks and the toy problem are built once,
// sample families are drawn deterministically from the seed.
class SuiteEnvironment {
 public:
  explicit SuiteEnvironment(const RunConfig& config);

  const RunConfig& config() const { return cfg_; }
  const HalfSpaceGrid& grid() const { return cfg_.grid; }
  MollifierBank& bank() { return *bank_; }
  PipelineContext& pipeline() { return *pipe_; }
  const std::vector<double>& sweep() const { return cfg_.sweep; }

  // samples_per_family inputs per listed family, seeded deterministically.
  const std::vector<TestInput>& family_samples(int ncomp);
  // The spectrally resolved subset (families with analytic envelopes) used
  // by the tight identity checks.
  std::vector<const TestInput*> resolved_samples(int ncomp);

  TestInput draw(const std::string& family, std::uint64_t salt, int ncomp);

 private:
  RunConfig cfg_;
  std::shared_ptr<MollifierBank> bank_;
  std::shared_ptr<PipelineContext> pipe_;
  std::map<int, std::vector<TestInput>> samples_;
  std::map<int, std::vector<std::string>> sample_family_;
};

struct CheckSpec {
  std::string id;
  std::vector<std::string> suites;
  std::function<CheckResult(SuiteEnvironment&)> fn;
};

const std::vector<CheckSpec>& check_registry();
const std::vector<std::string>& suite_names();

// Runs every check registered for `suite` ("all" runs the union) in registry
// order; unknown suite names throw.
std::vector<CheckResult> run_suite(SuiteEnvironment& env,
                                   const std::string& suite);

}  // namespace conormal
