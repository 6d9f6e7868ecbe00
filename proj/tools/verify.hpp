#pragma once

#include <string>
#include <vector>

namespace betasplit::cli {

struct SuiteResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

enum class VerifyLevel { fast, full };

// `tamper` perturbs a reference constant so the suites must fail.
std::vector<SuiteResult> run_verify(VerifyLevel level, bool tamper);

}  // namespace betasplit::cli
