#pragma once

#include <vector>

#include "cdho/fundamental.hpp"

namespace cdho {

struct DispersiveFit {
  double slope_vs_zeta2 = 0, slope_vs_zeta2_se = 0;
  double slope_vs_t = 0, slope_vs_t_se = 0;      // coefficient of log t in the joint fit
  double log_exponent = 0, log_exponent_se = 0;  // coefficient of log log t
  int points = 0;
};

// Fits log‖u(t)‖∞ against log|ζ2(t)| and against {log t, log log t}, using samples with t > r0.
DispersiveFit dispersive_fit(const std::vector<double>& t, const std::vector<double>& linf,
                             const FundamentalPair& pair);

}  // namespace cdho
