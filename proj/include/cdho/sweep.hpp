#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace cdho {

struct SweepFailure {
  nlohmann::json value;
  std::string error;
};

struct SweepReport {
  int succeeded = 0;
  std::vector<SweepFailure> failures;
};

// One job per value of the dotted `axis` path; each writes into out/job_<k>. The headline
// numbers of every successful job go to out/sweep.csv, failures to out/failures.json.
// An empty value list or an axis that is not an existing scalar field is a Config error,
// raised before anything is written.
SweepReport sweep(const nlohmann::json& base, const std::string& axis,
                  const std::vector<nlohmann::json>& values, int jobs,
                  const std::filesystem::path& out);

}  // namespace cdho
