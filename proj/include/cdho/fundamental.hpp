#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cdho/sigma.hpp"

namespace cdho {

struct ZetaValues {
  double z1 = 0, z2 = 0, dz1 = 0, dz2 = 0;
  double wronskian() const { return z1 * dz2 - dz1 * z2; }
};

enum class EvalMethod { ClosedForm, Numeric };

// ζ1 = c11·y1 + c12·y2, ζ2 = c21·y1 + c22·y2 with y1 = |t|^{1/2}, y2 = |t|^{1/2}log|t|.
struct ExteriorCoeffs {
  double c11 = 0, c12 = 0, c21 = 0, c22 = 0;
};

// y1, y2 and their t-derivatives at t ≠ 0.
struct CriticalBasis {
  double y1, y2, dy1, dy2;
};
CriticalBasis critical_basis(double t);

// Coefficients of the critical basis matching (ζ, ζ') at the boundary time tb.
ExteriorCoeffs match_exterior(const ZetaValues& at_boundary, double tb);

class FundamentalPair {
 public:
  using Evaluator = std::function<ZetaValues(double)>;

  struct Segment {
    double lo, hi;
    EvalMethod method;
    Evaluator eval;
  };

  FundamentalPair() = default;

  // Pair from explicit closed forms (synthetic pairs, tests).
  static FundamentalPair from_evaluator(Evaluator eval, double r0, double t_max,
                                        std::vector<double> zeta2_zeros = {});

  ZetaValues operator()(double t) const;
  double zeta1(double t) const { return (*this)(t).z1; }
  double zeta2(double t) const { return (*this)(t).z2; }
  double dzeta1(double t) const { return (*this)(t).dz1; }
  double dzeta2(double t) const { return (*this)(t).dz2; }
  EvalMethod method_at(double t) const;

  // Radius beyond which the lower bound |ζ2| ≥ c holds for this pair.
  double r0() const { return r0_; }
  double model_r0() const { return model_r0_; }
  double lower_bound_c() const { return lower_bound_c_; }
  double t_max() const { return t_max_; }
  double tol() const { return tol_; }
  const SigmaModel& model() const { return model_; }

  // Exterior coefficients for t > r0 (side = +1) or t < −r0 (side = −1).
  const std::optional<ExteriorCoeffs>& exterior(int side) const {
    return side > 0 ? plus_ : minus_;
  }
  double c1_plus() const;
  double c1_minus() const;
  double c2_plus() const;
  double c2_minus() const;

  // Nonzero zeros of ζ2 inside the domain, ascending.
  const std::vector<double>& zeta2_zeros() const { return zeros_; }
  // Number of zeros of ζ2 strictly between 0 and t.
  int caustic_count(double t) const;

  const std::vector<Segment>& segments() const { return segments_; }

 private:
  friend FundamentalPair solve_fundamental(const SigmaModel&, double, double, bool);
  void finalize();

  SigmaModel model_;
  std::vector<Segment> segments_;
  std::vector<double> zeros_;
  std::optional<ExteriorCoeffs> plus_, minus_;
  double model_r0_ = 0, r0_ = 0, lower_bound_c_ = 0, t_max_ = 0, tol_ = 0;
};

// Closed forms wherever the model admits them; otherwise Dormand–Prince 5(4)
// restarted at ±r0. prefer_closed_form = false integrates every region.
FundamentalPair solve_fundamental(const SigmaModel& model, double t_max, double tol = 1e-10,
                                  bool prefer_closed_form = true);

double wronskian(const FundamentalPair& pair, double t);

struct MatchingSolution {
  double alpha;  // x / r0
  double x;      // smallest positive root of x·tan x = −1/2
  double r0;
  ExteriorCoeffs plus;  // t < −r0: ζ1 coefficients equal, ζ2 coefficients negate
};

// α for which the Section4 pair has vanishing y2-coefficient in ζ1 beyond r0.
MatchingSolution solve_matching(double r0);

// Max residual of the four continuity conditions at t = ±r0, using the
// matching coefficients of solve_matching and the interior closed forms.
double matching_residual(const MatchingSolution& m);

struct SideFit {
  ExteriorCoeffs coeffs;
  double rel_residual1 = 0, rel_residual2 = 0;
  double condition = 0;
};

struct AsymptoticFit {
  SideFit plus, minus;
  double t_lo = 0, t_hi = 0;
};

// Least-squares fit on log-spaced |t| ∈ [t_lo, t_hi] for both signs of t; t_lo ≥ model_r0.
AsymptoticFit asymptotic_coeffs(const FundamentalPair& pair, double t_lo, double t_hi,
                                int points = 200);
// Default window [1e2·r0, 1e4·r0] of the model's matching radius.
AsymptoticFit asymptotic_coeffs(const FundamentalPair& pair);

struct A1Report {
  bool passed = true;
  std::vector<std::string> failures;
  double c = 0;
  double r0 = 0;
  double min_abs_zeta2 = 0;
  std::optional<AsymptoticFit> fit;
};

A1Report verify_A1(const FundamentalPair& pair, const std::vector<double>& probe_grid);

// Log-spaced symmetric probe grid on r0 < |t| ≤ t_max.
std::vector<double> default_probe_grid(double r0, double t_max, int per_side = 200);

}  // namespace cdho
