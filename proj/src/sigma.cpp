#include "cdho/sigma.hpp"

#include <cmath>

#include "cdho/error.hpp"
#include "cdho/fundamental.hpp"

namespace cdho {

const char* to_string(SigmaKind kind) noexcept {
  switch (kind) {
    case SigmaKind::Zero: return "zero";
    case SigmaKind::Constant: return "constant";
    case SigmaKind::CanonicalCritical: return "canonical";
    case SigmaKind::Section4: return "section4";
  }
  return "unknown";
}

SigmaKind sigma_kind_from_string(const std::string& name) {
  if (name == "zero") return SigmaKind::Zero;
  if (name == "constant") return SigmaKind::Constant;
  if (name == "canonical") return SigmaKind::CanonicalCritical;
  if (name == "section4") return SigmaKind::Section4;
  throw Error(ErrorKind::Config, "model.kind: unknown sigma model '" + name + "'");
}

SigmaModel SigmaModel::zero(double r0) {
  SigmaModel m;
  m.kind = SigmaKind::Zero;
  m.r0 = r0;
  return m;
}

SigmaModel SigmaModel::constant(double alpha_sq, double r0) {
  SigmaModel m;
  m.kind = SigmaKind::Constant;
  m.alpha_sq = alpha_sq;
  m.alpha = std::sqrt(std::abs(alpha_sq));
  m.r0 = r0;
  return m;
}

SigmaModel SigmaModel::canonical(double r0, Eigen::VectorXd smooth_coeffs) {
  SigmaModel m;
  m.kind = SigmaKind::CanonicalCritical;
  m.r0 = r0;
  m.smooth_coeffs = std::move(smooth_coeffs);
  m.validate();
  return m;
}

SigmaModel SigmaModel::section4(double alpha, double r0) {
  SigmaModel m;
  m.kind = SigmaKind::Section4;
  m.alpha = alpha;
  m.alpha_sq = alpha * alpha;
  m.r0 = r0;
  m.validate();
  return m;
}

SigmaModel SigmaModel::matched_section4(double r0) {
  return section4(solve_matching(r0).alpha, r0);
}

bool SigmaModel::is_even() const {
  if (kind != SigmaKind::CanonicalCritical) return true;
  for (Eigen::Index k = 1; k < smooth_coeffs.size(); k += 2)
    if (smooth_coeffs(k) != 0.0) return false;
  return true;
}

void SigmaModel::validate() const {
  if (!(r0 > 0.0) || !std::isfinite(r0))
    throw Error(ErrorKind::Config, "model.r0 must be positive and finite");
  if (kind == SigmaKind::Section4 && !(alpha != 0.0 && std::isfinite(alpha)))
    throw Error(ErrorKind::Config, "model.alpha must be finite and nonzero");
  if (kind == SigmaKind::Constant && !std::isfinite(alpha_sq))
    throw Error(ErrorKind::Config, "model.alpha_sq must be finite");
  for (Eigen::Index k = 0; k < smooth_coeffs.size(); ++k)
    if (!std::isfinite(smooth_coeffs(k)))
      throw Error(ErrorKind::Config, "model.smooth_coeffs must be finite");
}

double eval_sigma(const SigmaModel& model, double t) {
  switch (model.kind) {
    case SigmaKind::Zero: return 0.0;
    case SigmaKind::Constant: return model.alpha_sq;
    case SigmaKind::Section4:
      return std::abs(t) <= model.r0 ? model.alpha_sq : 0.25 / (t * t);
    case SigmaKind::CanonicalCritical: {
      if (std::abs(t) > model.r0) return 0.25 / (t * t);
      double acc = 0.0;
      for (Eigen::Index k = model.smooth_coeffs.size() - 1; k >= 0; --k)
        acc = acc * t + model.smooth_coeffs(k);
      return acc;
    }
  }
  return 0.0;
}

}  // namespace cdho
