#pragma once

#include <Eigen/Dense>

namespace cdho {

struct LinearFit {
  Eigen::VectorXd coeffs;
  Eigen::VectorXd std_errors;
  Eigen::VectorXd residuals;
  double rms = 0.0;
  double condition = 0.0;

  // two-sided ~95% half-width for coefficient k
  double ci(Eigen::Index k) const { return 2.0 * std_errors(k); }
};

// Column-scaled SVD least squares. Throws IllConditioned when the scaled
// design is rank deficient beyond max_condition or underdetermined.
LinearFit least_squares(const Eigen::MatrixXd& design, const Eigen::VectorXd& y,
                        double max_condition = 1e10);

// y ≈ c0 + c1·x
LinearFit fit_line(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

}  // namespace cdho
