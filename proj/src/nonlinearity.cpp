#include "cdho/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cdho/error.hpp"

namespace cdho {

namespace {

double power_4n(double a, int n) {
  switch (n) {
    case 1: { const double a2 = a * a; return a2 * a2; }
    case 2: return a * a;
    default: return std::pow(a, 4.0 / n);
  }
}

// log(R + 1/a) = log1p(R a) − log a
double log_term(double a, double R) { return std::log1p(R * a) - std::log(a); }

}  // namespace

void NonlinearityParams::validate() const {
  if (!std::isfinite(mu_L)) throw Error(ErrorKind::Config, "params.mu_L must be finite");
  if (!std::isfinite(mu_S)) throw Error(ErrorKind::Config, "params.mu_S must be finite");
  if (!(theta >= 0.0 && theta < 1.0)) throw Error(ErrorKind::Config, "params.theta must lie in [0, 1)");
  if (!(delta0 > 0.0 && delta0 < 1.0)) throw Error(ErrorKind::Config, "params.delta0 must lie in (0, 1)");
  if (n < 1 || n > 3) throw Error(ErrorKind::Config, "params.n must be 1, 2 or 3");
  if (!(R > 0.0) || !std::isfinite(R)) throw Error(ErrorKind::Config, "params.R must be positive and finite");
  for (int k = 0; k <= 10; ++k)
    if (!is_admissible_R(R, delta0, k / 10.0))
      throw Error(ErrorKind::Config, "params.R=" + std::to_string(R) +
                                         " is not admissible for delta0=" + std::to_string(delta0));
}

NonlinearityParams NonlinearityParams::make(double mu_L, double mu_S, double theta, double R,
                                            double delta0, int n) {
  NonlinearityParams p{mu_L, mu_S, theta, R, delta0, n};
  p.validate();
  return p;
}

NonlinearityParams NonlinearityParams::with_min_R(double mu_L, double mu_S, double theta,
                                                  double delta0, int n) {
  return make(mu_L, mu_S, theta, min_admissible_R(delta0) * (1.0 + 1e-6), delta0, n);
}

NonlinearityParams NonlinearityParams::linear(int n) {
  return NonlinearityParams{0.0, 0.0, 0.0, std::exp(1.0), 0.5, n};
}

double log_power(double a, double R, int n) {
  if (!(a > 0.0)) return 0.0;
  const double p = power_4n(a, n);
  return p == 0.0 ? 0.0 : p * log_term(a, R);
}

double eval_FL(double a, const NonlinearityParams& p) {
  if (p.mu_L == 0.0) return 0.0;
  return p.mu_L * log_power(a, p.R, p.n);
}

double eval_FS(double a, const NonlinearityParams& p) {
  if (p.mu_S == 0.0 || !(a > 0.0)) return 0.0;
  const double pw = power_4n(a, p.n);
  if (pw == 0.0) return 0.0;
  return p.mu_S * pw * std::pow(log_term(a, p.R), p.theta);
}

double eval_F(double a, const NonlinearityParams& p) { return eval_FL(a, p) + eval_FS(a, p); }

Eigen::ArrayXd eval_FL(const Eigen::ArrayXd& a, const NonlinearityParams& p) {
  return a.unaryExpr([&p](double v) { return eval_FL(v, p); });
}

Eigen::ArrayXd eval_FS(const Eigen::ArrayXd& a, const NonlinearityParams& p) {
  return a.unaryExpr([&p](double v) { return eval_FS(v, p); });
}

Eigen::ArrayXd eval_F(const Eigen::ArrayXd& a, const NonlinearityParams& p) {
  return a.unaryExpr([&p](double v) { return eval_F(v, p); });
}

namespace {

// Sign-equivalent form of the inf-expression for θ̃ > 0 and log(R + 1/t) > 0:
//   δ0 L − θ̃/(s + 1),  s = R t,  L = log(R + 1/t) = log R + log1p(1/s).
double reduced(double s, double logR, double delta0, double th) {
  return delta0 * (logR + std::log1p(1.0 / s)) - th / (s + 1.0);
}

}  // namespace

bool is_admissible_R(double R, double delta0, double theta_tilde) {
  if (!(R > 0.0) || !(delta0 > 0.0)) return false;
  if (theta_tilde == 0.0) return true;  // expression ≡ δ0
  const double logR = std::log(R);
  // t → ∞: L → log R. Below R = 1 the logarithm turns negative and the
  // fractional power is undefined; at R = 1 the expression ~ (δ0 − θ̃)t^{-θ̃}.
  if (logR < 0.0) return false;
  if (logR == 0.0) return delta0 >= theta_tilde;

  // grid in s = R t, where the minimiser sits at s = O(1/log R)
  constexpr int kGrid = 481;
  const double ls0 = std::log(1e-12), ls1 = std::log(1e12);
  int best = 0;
  double best_v = std::numeric_limits<double>::infinity();
  for (int k = 0; k < kGrid; ++k) {
    const double s = std::exp(ls0 + (ls1 - ls0) * k / (kGrid - 1));
    const double v = reduced(s, logR, delta0, theta_tilde);
    if (v < best_v) {
      best_v = v;
      best = k;
    }
  }
  double a = ls0 + (ls1 - ls0) * std::max(best - 1, 0) / (kGrid - 1);
  double b = ls0 + (ls1 - ls0) * std::min(best + 1, kGrid - 1) / (kGrid - 1);
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = reduced(std::exp(c), logR, delta0, theta_tilde);
  double fd = reduced(std::exp(d), logR, delta0, theta_tilde);
  for (int it = 0; it < 100; ++it) {
    if (fc < fd) {
      b = d; d = c; fd = fc;
      c = b - g * (b - a);
      fc = reduced(std::exp(c), logR, delta0, theta_tilde);
    } else {
      a = c; c = d; fc = fd;
      d = a + g * (b - a);
      fd = reduced(std::exp(d), logR, delta0, theta_tilde);
    }
  }
  best_v = std::min({best_v, fc, fd});
  // analytic limits: s → 0⁺ gives +∞, s → ∞ gives δ0 log R > 0
  return best_v >= 0.0;
}

double min_admissible_R(double delta0, double rel_tol) {
  if (!(delta0 > 0.0 && delta0 < 1.0))
    throw Error(ErrorKind::Precondition, "delta0 must lie in (0, 1)");
  auto ok = [delta0](double logR) {
    const double R = std::exp(logR);
    for (int k = 0; k <= 10; ++k)
      if (!is_admissible_R(R, delta0, k / 10.0)) return false;
    return true;
  };
  const double log_max = std::log(1e300);
  double lo = 0.0, hi = 1.0;
  if (ok(lo)) return 1.0;
  while (!ok(hi)) {
    lo = hi;
    if (hi >= log_max)
      throw Error(ErrorKind::NoAdmissibleR,
                  "no admissible R up to 1e300 for delta0=" + std::to_string(delta0));
    hi = std::min(2.0 * hi, log_max);
  }
  while (hi - lo > rel_tol) {
    const double m = 0.5 * (lo + hi);
    (ok(m) ? hi : lo) = m;
  }
  return std::exp(hi);
}

}  // namespace cdho
