#pragma once

#include <filesystem>

#include "cdho/config.hpp"
#include "json.hpp"

namespace cdho {

struct RunReport {
  int status = 0;          // 0 when every invariant held
  nlohmann::json summary;  // "headline" numbers, "invariants", optional "error"
};

// Executes the configured experiment into `out` and writes manifest.json there.
// Module errors raised during compute are reported (status 1), not thrown.
RunReport run(const RunConfig& config, const std::filesystem::path& out);

// Pair covering every time the experiment touches.
FundamentalPair pair_for(const RunConfig& config, double t_span);

// Normalised sup ‖u‖∞(1 + |ζ2|)^{n/2} against log t over [pair.r0, ∞): slope, its standard
// error and the max/min ratio.
struct DecayTrend {
  double slope = 0, std_error = 0, ratio = 0;
  int points = 0;
};
DecayTrend decay_trend(const Trajectory& traj, int n);

}  // namespace cdho
