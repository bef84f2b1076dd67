#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace powerlaw {

// Property-suite runner behind `powerlaw_spde verify`.
struct CheckResult {
  std::string name;
  double tolerance = 0.0;
  double observed = 0.0;  // the deviation or statistic compared against tolerance
  bool passed = false;
};

struct SuiteReport {
  std::string suite;
  std::vector<CheckResult> checks;

  bool passed() const;
  double max_deviation() const;
  nlohmann::json to_json() const;
};

struct VerifyOptions {
  std::vector<double> dt_grid = {1e-2, 5e-3, 2.5e-3};
  unsigned long long seed = 7ULL;
};

const std::vector<std::string>& suite_names();

// Throws std::invalid_argument for an unknown suite name.
SuiteReport run_suite(const std::string& name, const VerifyOptions& options = {});

}  // namespace powerlaw
