#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace cdho {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

// Runs the acceptance criteria (all when `only` is empty). When `log` is given, each
// criterion's line is written as soon as it finishes.
std::vector<CriterionResult> run_acceptance(const std::vector<int>& only = {},
                                            std::ostream* log = nullptr);

std::string format_line(const CriterionResult& r);

}  // namespace cdho
