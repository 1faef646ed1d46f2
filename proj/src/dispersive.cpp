#include "cdho/dispersive.hpp"

#include <cmath>

#include "cdho/error.hpp"
#include "cdho/fit.hpp"

namespace cdho {

DispersiveFit dispersive_fit(const std::vector<double>& t, const std::vector<double>& linf,
                             const FundamentalPair& pair) {
  if (t.size() != linf.size()) throw Error(ErrorKind::Precondition, "dispersive_fit: size mismatch");
  std::vector<double> ts, ys;
  for (std::size_t k = 0; k < t.size(); ++k)
    if (t[k] > std::max(pair.r0(), 1.0) && linf[k] > 0) {
      ts.push_back(t[k]);
      ys.push_back(std::log(linf[k]));
    }
  if (ts.size() < 8 || std::log10(ts.back() / ts.front()) < 2.0 - 1e-9)
    throw Error(ErrorKind::IllConditioned, "dispersive_fit needs >= 2 decades of t beyond r0");

  const Eigen::Index m = static_cast<Eigen::Index>(ts.size());
  Eigen::VectorXd y = Eigen::Map<Eigen::VectorXd>(ys.data(), m);
  Eigen::VectorXd lz(m);
  Eigen::MatrixXd joint(m, 3);
  for (Eigen::Index k = 0; k < m; ++k) {
    lz(k) = std::log(std::abs(pair.zeta2(ts[k])));
    joint(k, 0) = 1.0;
    joint(k, 1) = std::log(ts[k]);
    joint(k, 2) = std::log(std::log(ts[k]));
  }
  DispersiveFit out;
  out.points = static_cast<int>(m);
  const LinearFit a = fit_line(lz, y);
  out.slope_vs_zeta2 = a.coeffs(1);
  out.slope_vs_zeta2_se = a.std_errors(1);
  const LinearFit b = least_squares(joint, y);
  out.slope_vs_t = b.coeffs(1);
  out.slope_vs_t_se = b.std_errors(1);
  out.log_exponent = b.coeffs(2);
  out.log_exponent_se = b.std_errors(2);
  return out;
}

}  // namespace cdho
