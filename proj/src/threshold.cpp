#include "cdho/threshold.hpp"

#include <Eigen/Core>
#include <cmath>
#include <limits>

#include "cdho/error.hpp"
#include "cdho/fit.hpp"
#include "cdho/quadrature.hpp"

namespace cdho {

const char* to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::Converging: return "Converging";
    case Verdict::Diverging: return "Diverging";
    case Verdict::Inconclusive: return "Inconclusive";
  }
  return "Inconclusive";
}

ThresholdReport classify_threshold(const std::function<double(double)>& decay,
                                   const std::function<double(double)>& F, double s0,
                                   double s_max, double divergence_bound,
                                   const ThresholdOptions& opt) {
  if (!(s0 > 1.0)) throw Error(ErrorKind::Precondition, "s0 must exceed 1");
  if (!(s_max > s0) || !std::isfinite(s_max) || s_max > 1e300)
    throw Error(ErrorKind::Precondition, "S_max must satisfy s0 < S_max <= 1e300");
  if (opt.ladder_points < 8) throw Error(ErrorKind::Precondition, "ladder needs >= 8 points");

  // u = log s, integrand e^u F(decay(e^u))
  auto g = [&](double u) {
    const double s = std::exp(u);
    const double a = decay(s);
    if (!(a >= 0.0))
      throw Error(ErrorKind::QuadratureFailure, "decay(s) negative or non-finite at s=" + std::to_string(s));
    return s * F(a);
  };

  const double u0 = std::log(s0), u1 = std::log(s_max);
  const int K = opt.ladder_points;
  ThresholdReport rep;
  std::vector<double> us, gs;
  double total = 0.0, prev = u0;
  bool exceeded = false;
  for (int k = 1; k <= K; ++k) {
    const double u = u0 * std::pow(u1 / u0, static_cast<double>(k) / K);
    const auto q = integrate_gk15<double>(g, prev, u, 1e-300, opt.rel_tol, 48);
    total += q.value;
    rep.partial_integrals.push_back({u, total});
    us.push_back(u);
    gs.push_back(g(u));
    prev = u;
    if (total > divergence_bound) {
      exceeded = true;
      break;
    }
  }
  rep.tail_estimate = std::numeric_limits<double>::quiet_NaN();
  if (exceeded) {
    rep.verdict = Verdict::Diverging;
    rep.reason = "partial integral exceeds divergence bound " + std::to_string(divergence_bound);
    return rep;
  }

  // power fit of the integrand over the final decade of u
  const double u_cut = std::max(us.back() / 10.0, us[us.size() / 2]);
  std::vector<double> lx, ly;
  for (std::size_t k = 0; k < us.size(); ++k) {
    if (us[k] < u_cut) continue;
    if (!(gs[k] > 0.0)) {
      rep.verdict = Verdict::Inconclusive;
      rep.reason = "integrand not positive in the tail";
      return rep;
    }
    lx.push_back(std::log(us[k]));
    ly.push_back(std::log(gs[k]));
  }
  const LinearFit f = fit_line(Eigen::Map<Eigen::VectorXd>(lx.data(), lx.size()),
                               Eigen::Map<Eigen::VectorXd>(ly.data(), ly.size()));
  rep.fit.q = -f.coeffs(1);
  rep.fit.C = std::exp(f.coeffs(0));
  rep.fit.rms = f.rms;
  const double q = rep.fit.q;

  if (f.rms > opt.max_fit_rms) {
    rep.verdict = Verdict::Inconclusive;
    rep.reason = "tail is not a clean power of log s";
    return rep;
  }
  if (q > 1.0 + opt.q_converge_margin) {
    // Cauchy check: increments over the last ladder panels shrink
    const auto& pi = rep.partial_integrals;
    const std::size_t m = pi.size();
    const double d1 = pi[m - 1].value - pi[m - 2].value, d2 = pi[m - 2].value - pi[m - 3].value;
    if (!(d1 <= d2)) {
      rep.verdict = Verdict::Inconclusive;
      rep.reason = "partial integrals not Cauchy on the ladder";
      return rep;
    }
    rep.verdict = Verdict::Converging;
    rep.fit.p = q - 1.0;
    rep.tail_estimate = rep.fit.C * std::pow(us.back(), 1.0 - q) / (q - 1.0);
    rep.reason = "tail ~ (log T)^-" + std::to_string(rep.fit.p);
    return rep;
  }
  if (q <= 1.0 + opt.q_diverge_margin) {
    rep.verdict = Verdict::Diverging;
    rep.fit.p = std::max(0.0, 1.0 - q);
    rep.reason = rep.fit.p < opt.q_diverge_margin ? "growth ~ log log T"
                                                   : "growth ~ (log T)^" + std::to_string(rep.fit.p);
    return rep;
  }
  rep.verdict = Verdict::Inconclusive;
  rep.reason = "tail exponent q=" + std::to_string(q) + " too close to 1";
  return rep;
}

nlohmann::json to_json(const ThresholdReport& r) {
  nlohmann::json j;
  j["verdict"] = to_string(r.verdict);
  j["reason"] = r.reason;
  j["tail_estimate"] = std::isfinite(r.tail_estimate) ? nlohmann::json(r.tail_estimate) : nlohmann::json();
  j["tail_fit"] = {{"q", r.fit.q}, {"C", r.fit.C}, {"p", r.fit.p}, {"rms", r.fit.rms}};
  auto& ladder = j["partial_integrals"] = nlohmann::json::array();
  for (const auto& p : r.partial_integrals)
    ladder.push_back({{"log_T", p.log_T}, {"T", std::exp(p.log_T)}, {"value", p.value}});
  return j;
}

}  // namespace cdho
