#pragma once

#include <Eigen/Core>
#include <string>

namespace cdho {

enum class SigmaKind { Zero, Constant, CanonicalCritical, Section4 };

const char* to_string(SigmaKind kind) noexcept;
SigmaKind sigma_kind_from_string(const std::string& name);

// σ(t) for ζ'' + σ(t)ζ = 0.
//   Zero:               σ ≡ 0
//   Constant:           σ ≡ alpha_sq (negative values give the repulsive case)
//   CanonicalCritical:  σ = Σ smooth_coeffs[k]·t^k for |t| ≤ r0, 1/(4t²) beyond
//   Section4:           σ = alpha² for |t| ≤ r0, 1/(4t²) beyond
struct SigmaModel {
  SigmaKind kind = SigmaKind::Zero;
  double alpha = 0.0;
  double alpha_sq = 0.0;
  double r0 = 10.0;
  Eigen::VectorXd smooth_coeffs;

  static SigmaModel zero(double r0 = 10.0);
  static SigmaModel constant(double alpha_sq, double r0 = 10.0);
  static SigmaModel canonical(double r0, Eigen::VectorXd smooth_coeffs);
  static SigmaModel section4(double alpha, double r0);
  // Section4 with α from the C¹ matching at ±r0.
  static SigmaModel matched_section4(double r0);

  bool is_critical() const {
    return kind == SigmaKind::CanonicalCritical || kind == SigmaKind::Section4;
  }
  bool is_even() const;
  void validate() const;
};

double eval_sigma(const SigmaModel& model, double t);

}  // namespace cdho
