#pragma once

#include <functional>
#include <string>
#include <vector>

#include "json.hpp"

namespace cdho {

enum class Verdict { Converging, Diverging, Inconclusive };

const char* to_string(Verdict v) noexcept;

// Tail model in u = log s: integrand e^u f(e^u) ≈ C·u^{-q}.
//   q > 1: I(∞) − I(T) ≈ C/(q−1)·(log T)^{−p}, p = q − 1
//   q ≤ 1: I(T) grows like (log T)^{p}, p = 1 − q (p = 0: log log T)
struct TailFit {
  double q = 0, C = 0, p = 0, rms = 0;
};

struct LadderPoint {
  double log_T;
  double value;
};

struct ThresholdReport {
  Verdict verdict = Verdict::Inconclusive;
  std::vector<LadderPoint> partial_integrals;
  double tail_estimate = 0;  // remaining ∫_T^∞ for Converging, NaN otherwise
  TailFit fit;
  std::string reason;
};

struct ThresholdOptions {
  int ladder_points = 64;
  double rel_tol = 1e-11;
  double q_converge_margin = 0.05;
  double q_diverge_margin = 0.01;
  double max_fit_rms = 0.05;
};

// Classifies ∫_{s0}^{∞} F(decay(s)) ds. The ladder runs over log T ∈ (log s0, log S_max];
// S_max may be given up to 1e300.
ThresholdReport classify_threshold(const std::function<double(double)>& decay,
                                   const std::function<double(double)>& F, double s0,
                                   double s_max, double divergence_bound,
                                   const ThresholdOptions& opt = {});

nlohmann::json to_json(const ThresholdReport& r);

}  // namespace cdho
