#pragma once

// Identity suites behind `degloc verify` and the acceptance binary.

#include <string>
#include <vector>

namespace degloc {

struct VerifyOptions {
  int threads = 1;
  unsigned seed = 1;
};

struct CheckResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0;
  double budget = 0;  // seconds, 0 = none
};

// porteous: 1-3, hilbloc: 4-5, routes: 6-7, vw: 8, duality: 9, vanishing: 10, all
std::vector<int> suite_criteria(const std::string& suite);
CheckResult run_criterion(int id, const VerifyOptions& opt = {});
std::string format_line(const CheckResult& r, bool with_time = true);

}  // namespace degloc
