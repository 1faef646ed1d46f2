#pragma once

#include <Eigen/Core>

namespace cdho {

// F = F_L + F_S with
//   F_L(a) = μ_L a^{4/n} log(R + 1/a),  F_S(a) = μ_S a^{4/n} (log(R + 1/a))^θ,  F(0) = 0.
struct NonlinearityParams {
  double mu_L = 0.0;
  double mu_S = 0.0;
  double theta = 0.0;
  double R = 0.0;
  double delta0 = 0.01;
  int n = 1;

  // Validates every field, including admissibility of R at delta0.
  static NonlinearityParams make(double mu_L, double mu_S, double theta, double R,
                                 double delta0 = 0.01, int n = 1);
  // R = min_admissible_R(delta0) with a small safety factor.
  static NonlinearityParams with_min_R(double mu_L, double mu_S, double theta,
                                       double delta0 = 0.01, int n = 1);
  static NonlinearityParams linear(int n = 1);

  bool is_linear() const { return mu_L == 0.0 && mu_S == 0.0; }
  void validate() const;
};

// a^{4/n}·log(R + 1/a), stable for tiny a.
double log_power(double a, double R, int n);

double eval_FL(double a, const NonlinearityParams& p);
double eval_FS(double a, const NonlinearityParams& p);
double eval_F(double a, const NonlinearityParams& p);

// Coefficient-wise on amplitude arrays.
Eigen::ArrayXd eval_FL(const Eigen::ArrayXd& a, const NonlinearityParams& p);
Eigen::ArrayXd eval_FS(const Eigen::ArrayXd& a, const NonlinearityParams& p);
Eigen::ArrayXd eval_F(const Eigen::ArrayXd& a, const NonlinearityParams& p);

bool is_admissible_R(double R, double delta0, double theta_tilde);
double min_admissible_R(double delta0, double rel_tol = 1e-10);

}  // namespace cdho
