#include "cdho/fit.hpp"

#include <cmath>

#include "cdho/error.hpp"

namespace cdho {

LinearFit least_squares(const Eigen::MatrixXd& design, const Eigen::VectorXd& y,
                        double max_condition) {
  const Eigen::Index m = design.rows(), p = design.cols();
  if (m != y.size()) throw Error(ErrorKind::Precondition, "design/data size mismatch");
  if (m < p + 1)
    throw Error(ErrorKind::IllConditioned, "need more samples than fit parameters");

  Eigen::VectorXd scale = design.colwise().norm().transpose();
  for (Eigen::Index k = 0; k < p; ++k)
    if (!(scale(k) > 0.0) || !std::isfinite(scale(k)))
      throw Error(ErrorKind::IllConditioned, "degenerate design column");
  Eigen::MatrixXd a = design * scale.cwiseInverse().asDiagonal();

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  LinearFit fit;
  fit.condition = s(0) / s(p - 1);
  if (!(fit.condition < max_condition))
    throw Error(ErrorKind::IllConditioned,
                "condition number " + std::to_string(fit.condition) + " of fit basis");

  Eigen::VectorXd cs = svd.solve(y);
  fit.coeffs = cs.cwiseQuotient(scale);
  fit.residuals = y - design * fit.coeffs;
  fit.rms = std::sqrt(fit.residuals.squaredNorm() / static_cast<double>(m));

  const double sigma2 = fit.residuals.squaredNorm() / static_cast<double>(m - p);
  Eigen::MatrixXd vs = svd.matrixV() * s.cwiseInverse().asDiagonal();
  Eigen::VectorXd var = (vs.array().square().rowwise().sum()).matrix() * sigma2;
  fit.std_errors = var.cwiseSqrt().cwiseQuotient(scale);
  return fit;
}

LinearFit fit_line(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  Eigen::MatrixXd a(x.size(), 2);
  a.col(0).setOnes();
  a.col(1) = x;
  return least_squares(a, y);
}

}  // namespace cdho
