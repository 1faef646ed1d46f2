#include "cdho/fundamental.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>

#include "cdho/error.hpp"
#include "cdho/fit.hpp"
#include "cdho/ode.hpp"

namespace cdho {

namespace {

using State = Eigen::Vector4d;  // (ζ1, ζ2, ζ1', ζ2')
using Dense = DenseSolution<State>;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

ZetaValues from_state(const State& s) { return {s(0), s(1), s(2), s(3)}; }
State to_state(const ZetaValues& v) { return State(v.z1, v.z2, v.dz1, v.dz2); }

FundamentalPair::Evaluator trig_evaluator(double alpha_sq) {
  if (alpha_sq > 0) {
    const double b = std::sqrt(alpha_sq);
    return [b](double t) {
      const double c = std::cos(b * t), s = std::sin(b * t);
      return ZetaValues{c, s / b, -b * s, c};
    };
  }
  if (alpha_sq < 0) {
    const double b = std::sqrt(-alpha_sq);
    return [b](double t) {
      const double c = std::cosh(b * t), s = std::sinh(b * t);
      return ZetaValues{c, s / b, b * s, c};
    };
  }
  return [](double t) { return ZetaValues{1.0, t, 0.0, 1.0}; };
}

FundamentalPair::Evaluator exterior_evaluator(const ExteriorCoeffs& c) {
  return [c](double t) {
    const CriticalBasis y = critical_basis(t);
    return ZetaValues{c.c11 * y.y1 + c.c12 * y.y2, c.c21 * y.y1 + c.c22 * y.y2,
                      c.c11 * y.dy1 + c.c12 * y.dy2, c.c21 * y.dy1 + c.c22 * y.dy2};
  };
}

FundamentalPair::Evaluator dense_evaluator(std::shared_ptr<const Dense> sol) {
  return [sol](double t) { return from_state((*sol)(t)); };
}

template <class SigmaFn>
std::shared_ptr<const Dense> integrate_region(SigmaFn sigma, double t0, const ZetaValues& y0,
                                              double t1, double tol) {
  OdeOptions opt;
  opt.rtol = tol;
  opt.atol = tol;
  auto rhs = [&sigma](double t, const State& y) {
    const double s = sigma(t);
    return State(y(2), y(3), -s * y(0), -s * y(1));
  };
  return std::make_shared<const Dense>(integrate_dopri5<State>(rhs, t0, to_state(y0), t1, opt));
}

void trig_zeros(double alpha_sq, double lo, double hi, std::vector<double>& out) {
  if (!(alpha_sq > 0)) return;
  const double period = std::numbers::pi / std::sqrt(alpha_sq);
  for (long k = static_cast<long>(std::ceil(lo / period)); k * period <= hi; ++k)
    if (k != 0) out.push_back(static_cast<double>(k) * period);
}

void exterior_zero(const ExteriorCoeffs& c, int side, double r0, double t_max,
                   std::vector<double>& out) {
  if (c.c22 == 0.0) return;
  const double a = std::exp(-c.c21 / c.c22);
  if (a > r0 && a <= t_max) out.push_back(side * a);
}

void dense_zeros(const Dense& sol, std::vector<double>& out) {
  for (const auto& st : sol.steps()) {
    const double ta = st.t0, tb = st.t0 + st.h;
    double za = st(ta)(1), zb = st(tb)(1);
    if (!(za * zb < 0)) continue;
    double a = ta, b = tb;
    for (int it = 0; it < 200 && std::abs(b - a) > 1e-15 * std::max(1.0, std::abs(a)); ++it) {
      const double m = 0.5 * (a + b), zm = st(m)(1);
      if ((zm < 0) == (za < 0)) {
        a = m;
        za = zm;
      } else {
        b = m;
      }
    }
    out.push_back(0.5 * (a + b));
  }
}

}  // namespace

CriticalBasis critical_basis(double t) {
  const double a = std::abs(t), s = t < 0 ? -1.0 : 1.0;
  const double y1 = std::sqrt(a), l = std::log(a);
  return {y1, y1 * l, s * 0.5 / y1, s * (0.5 * l + 1.0) / y1};
}

ExteriorCoeffs match_exterior(const ZetaValues& v, double tb) {
  const CriticalBasis y = critical_basis(tb);
  const double w = y.y1 * y.dy2 - y.dy1 * y.y2;  // ±1
  ExteriorCoeffs c;
  c.c11 = (v.z1 * y.dy2 - v.dz1 * y.y2) / w;
  c.c12 = (y.y1 * v.dz1 - y.dy1 * v.z1) / w;
  c.c21 = (v.z2 * y.dy2 - v.dz2 * y.y2) / w;
  c.c22 = (y.y1 * v.dz2 - y.dy1 * v.z2) / w;
  return c;
}

FundamentalPair FundamentalPair::from_evaluator(Evaluator eval, double r0, double t_max,
                                                std::vector<double> zeta2_zeros) {
  FundamentalPair p;
  p.segments_.push_back({-t_max, t_max, EvalMethod::ClosedForm, std::move(eval)});
  p.zeros_ = std::move(zeta2_zeros);
  std::sort(p.zeros_.begin(), p.zeros_.end());
  p.model_r0_ = r0;
  p.r0_ = r0;
  p.t_max_ = t_max;
  p.tol_ = 0.0;
  p.model_.r0 = r0;
  const auto probes = default_probe_grid(r0, t_max);
  double m = std::numeric_limits<double>::infinity();
  for (double t : probes) m = std::min(m, std::abs(p.zeta2(t)));
  p.lower_bound_c_ = probes.empty() ? 0.0 : 0.9 * m;
  return p;
}

ZetaValues FundamentalPair::operator()(double t) const {
  const double slack = 1e-12 * std::max(1.0, t_max_);
  for (const auto& seg : segments_)
    if (t >= seg.lo - slack && t <= seg.hi + slack)
      return seg.eval(std::clamp(t, seg.lo, seg.hi));
  throw Error(ErrorKind::Precondition,
              "t=" + std::to_string(t) + " outside the pair's domain [-t_max, t_max]");
}

EvalMethod FundamentalPair::method_at(double t) const {
  for (const auto& seg : segments_)
    if (t >= seg.lo && t <= seg.hi) return seg.method;
  throw Error(ErrorKind::Precondition, "t outside the pair's domain");
}

double FundamentalPair::c1_plus() const { return plus_ ? plus_->c11 : kNaN; }
double FundamentalPair::c1_minus() const { return minus_ ? minus_->c11 : kNaN; }
double FundamentalPair::c2_plus() const { return plus_ ? plus_->c22 : kNaN; }
double FundamentalPair::c2_minus() const { return minus_ ? minus_->c22 : kNaN; }

int FundamentalPair::caustic_count(double t) const {
  int m = 0;
  for (double z : zeros_)
    if ((t > 0 && z > 0 && z < t) || (t < 0 && z < 0 && z > t)) ++m;
  return m;
}

void FundamentalPair::finalize() {
  std::sort(zeros_.begin(), zeros_.end());
  std::vector<double> uniq;
  for (double z : zeros_)
    if (uniq.empty() || std::abs(z - uniq.back()) > 1e-9 * std::max(1.0, std::abs(z)))
      uniq.push_back(z);
  zeros_ = std::move(uniq);

  r0_ = model_r0_;
  if (model_.is_critical())
    for (double z : zeros_)
      if (std::abs(z) > model_r0_) r0_ = std::max(r0_, 2.0 * std::abs(z));
  r0_ = std::min(r0_, t_max_);

  const auto probes = default_probe_grid(r0_, t_max_);
  double m = std::abs(zeta2(r0_));
  for (double t : probes) m = std::min(m, std::abs(zeta2(t)));
  lower_bound_c_ = 0.9 * m;
}

FundamentalPair solve_fundamental(const SigmaModel& model, double t_max, double tol,
                                  bool prefer_closed_form) {
  model.validate();
  if (!(tol > 0)) throw Error(ErrorKind::Precondition, "tol must be positive");
  if (!(t_max > 0) || !std::isfinite(t_max))
    throw Error(ErrorKind::Precondition, "t_max must be positive and finite");

  FundamentalPair p;
  p.model_ = model;
  p.t_max_ = t_max;
  p.tol_ = tol;
  p.model_r0_ = model.r0;
  const ZetaValues origin{1.0, 0.0, 0.0, 1.0};

  auto add_dense = [&](std::shared_ptr<const Dense> sol) {
    const double a = sol->t_begin(), b = sol->t_end();
    p.segments_.push_back({std::min(a, b), std::max(a, b), EvalMethod::Numeric,
                           dense_evaluator(sol)});
    dense_zeros(*sol, p.zeros_);
  };

  if (!model.is_critical()) {
    const double a2 = model.kind == SigmaKind::Constant ? model.alpha_sq : 0.0;
    if (prefer_closed_form) {
      p.segments_.push_back({-t_max, t_max, EvalMethod::ClosedForm, trig_evaluator(a2)});
      trig_zeros(a2, -t_max, t_max, p.zeros_);
    } else {
      auto sigma = [a2](double) { return a2; };
      add_dense(integrate_region(sigma, 0.0, origin, -t_max, tol));
      add_dense(integrate_region(sigma, 0.0, origin, t_max, tol));
    }
    p.finalize();
    return p;
  }

  const double r0 = model.r0;
  const double t_in = std::min(r0, t_max);
  FundamentalPair::Evaluator interior;
  if (model.kind == SigmaKind::Section4 && prefer_closed_form) {
    interior = trig_evaluator(model.alpha_sq);
    p.segments_.push_back({-t_in, t_in, EvalMethod::ClosedForm, interior});
    trig_zeros(model.alpha_sq, -t_in, t_in, p.zeros_);
  } else {
    auto sigma = [&model](double t) { return eval_sigma(model, std::clamp(t, -model.r0, model.r0)); };
    auto neg = integrate_region(sigma, 0.0, origin, -t_in, tol);
    auto pos = integrate_region(sigma, 0.0, origin, t_in, tol);
    add_dense(neg);
    add_dense(pos);
    interior = [neg, pos](double t) { return from_state(t < 0 ? (*neg)(t) : (*pos)(t)); };
  }

  if (t_max > r0) {
    auto exterior_sigma = [](double t) { return 0.25 / (t * t); };
    for (int side : {-1, 1}) {
      const double tb = side * r0;
      const ZetaValues vb = interior(tb);
      const ExteriorCoeffs c = match_exterior(vb, tb);
      (side > 0 ? p.plus_ : p.minus_) = c;
      if (prefer_closed_form) {
        const double lo = side > 0 ? r0 : -t_max, hi = side > 0 ? t_max : -r0;
        p.segments_.push_back({lo, hi, EvalMethod::ClosedForm, exterior_evaluator(c)});
        exterior_zero(c, side, r0, t_max, p.zeros_);
      } else {
        add_dense(integrate_region(exterior_sigma, tb, vb, side * t_max, tol));
      }
    }
  }
  // interior first so that ±r0 resolves to the interior representation
  std::stable_sort(p.segments_.begin(), p.segments_.end(),
                   [r0](const auto& a, const auto& b) {
                     const bool ia = a.hi <= r0 && a.lo >= -r0, ib = b.hi <= r0 && b.lo >= -r0;
                     return ia && !ib;
                   });
  p.finalize();
  return p;
}

double wronskian(const FundamentalPair& pair, double t) { return pair(t).wronskian(); }

MatchingSolution solve_matching(double r0) {
  if (!(r0 > 0)) throw Error(ErrorKind::Precondition, "r0 must be positive");
  auto g = [](double x) { return x * std::sin(x) + 0.5 * std::cos(x); };  // cos·(x tan x + 1/2)
  double a = std::numbers::pi / 2 + 1e-9, b = std::numbers::pi - 1e-9;
  double ga = g(a), gb = g(b);
  // on (π/2, π) cos < 0, so x tan x + 1/2 and g have opposite signs
  if (!(ga * gb < 0)) throw Error(ErrorKind::RootNotBracketed, "x·tan x = -1/2 on (π/2, π)");
  for (int it = 0; it < 200 && b - a > 4e-16 * b; ++it) {
    const double m = 0.5 * (a + b), gm = g(m);
    if ((gm < 0) == (ga < 0)) {
      a = m;
      ga = gm;
    } else {
      b = m;
    }
  }
  MatchingSolution s;
  s.x = 0.5 * (a + b);
  s.alpha = s.x / r0;
  s.r0 = r0;
  const double c = std::cos(s.x), sn = std::sin(s.x), sr = std::sqrt(r0), l = std::log(r0);
  s.plus.c11 = c / sr;
  s.plus.c12 = 0.0;
  s.plus.c21 = (sn / s.alpha) * (0.5 * l + 1.0) / sr - c * sr * l;
  s.plus.c22 = sr * c - 0.5 * sn / (s.alpha * sr);
  if (std::abs(s.plus.c22) < 1e-12)
    throw Error(ErrorKind::IllConditioned, "matching gives c22 = 0");
  return s;
}

double matching_residual(const MatchingSolution& m) {
  const double a = m.alpha;
  double worst = 0.0;
  for (int side : {-1, 1}) {
    const double t = side * m.r0;
    const ZetaValues in{std::cos(a * t), std::sin(a * t) / a, -a * std::sin(a * t),
                        std::cos(a * t)};
    const ExteriorCoeffs& c = m.plus;
    const CriticalBasis y = critical_basis(t);
    const double s = side;  // ζ2 coefficients are odd in t
    const double r[4] = {c.c11 * y.y1 + c.c12 * y.y2 - in.z1,
                         c.c11 * y.dy1 + c.c12 * y.dy2 - in.dz1,
                         s * (c.c21 * y.y1 + c.c22 * y.y2) - in.z2,
                         s * (c.c21 * y.dy1 + c.c22 * y.dy2) - in.dz2};
    for (double v : r) worst = std::max(worst, std::abs(v));
  }
  return worst;
}

namespace {

SideFit fit_side(const FundamentalPair& pair, int side, double t_lo, double t_hi, int points) {
  Eigen::MatrixXd a(points, 2);
  Eigen::VectorXd z1(points), z2(points);
  const double la = std::log(t_lo), lb = std::log(t_hi);
  for (int k = 0; k < points; ++k) {
    const double t = side * std::exp(la + (lb - la) * k / (points - 1));
    const CriticalBasis y = critical_basis(t);
    const ZetaValues v = pair(t);
    a(k, 0) = y.y1;
    a(k, 1) = y.y2;
    z1(k) = v.z1;
    z2(k) = v.z2;
  }
  const LinearFit f1 = least_squares(a, z1, 1e8);
  const LinearFit f2 = least_squares(a, z2, 1e8);
  auto rms = [](const Eigen::VectorXd& v) { return std::sqrt(v.squaredNorm() / v.size()); };
  SideFit s;
  s.coeffs = {f1.coeffs(0), f1.coeffs(1), f2.coeffs(0), f2.coeffs(1)};
  s.rel_residual1 = f1.rms / std::max(rms(z1), 1e-300);
  s.rel_residual2 = f2.rms / std::max(rms(z2), 1e-300);
  s.condition = f1.condition;
  return s;
}

}  // namespace

AsymptoticFit asymptotic_coeffs(const FundamentalPair& pair, double t_lo, double t_hi,
                                int points) {
  if (!(t_lo >= pair.model_r0()))
    throw Error(ErrorKind::Precondition, "fit window must lie beyond the matching radius");
  if (t_hi > pair.t_max() * (1 + 1e-12))
    throw Error(ErrorKind::Precondition, "fit window exceeds the pair's domain");
  if (!(t_hi > 1.5 * t_lo) || points < 8)
    throw Error(ErrorKind::IllConditioned, "fit window too narrow for the critical basis");
  AsymptoticFit f;
  f.t_lo = t_lo;
  f.t_hi = t_hi;
  f.plus = fit_side(pair, 1, t_lo, t_hi, points);
  f.minus = fit_side(pair, -1, t_lo, t_hi, points);
  return f;
}

AsymptoticFit asymptotic_coeffs(const FundamentalPair& pair) {
  return asymptotic_coeffs(pair, std::max(1e2 * pair.model_r0(), pair.r0()),
                           1e4 * pair.model_r0());
}

std::vector<double> default_probe_grid(double r0, double t_max, int per_side) {
  std::vector<double> g;
  if (!(t_max > r0) || per_side < 2) return g;
  const double la = std::log(r0 * (1 + 1e-9)), lb = std::log(t_max);
  for (int k = per_side - 1; k >= 0; --k) g.push_back(-std::exp(la + (lb - la) * k / (per_side - 1)));
  for (int k = 0; k < per_side; ++k) g.push_back(std::exp(la + (lb - la) * k / (per_side - 1)));
  g.front() = -t_max;
  g.back() = t_max;
  return g;
}

A1Report verify_A1(const FundamentalPair& pair, const std::vector<double>& probe_grid) {
  A1Report rep;
  rep.c = pair.lower_bound_c();
  rep.r0 = pair.r0();
  auto fail = [&rep](std::string msg) {
    rep.passed = false;
    rep.failures.push_back(std::move(msg));
  };

  std::vector<double> plus, minus;
  for (double t : probe_grid) {
    if (std::abs(t) <= pair.r0() || std::abs(t) > pair.t_max()) continue;
    (t > 0 ? plus : minus).push_back(std::abs(t));
  }
  if (plus.empty() && minus.empty()) {
    fail("probe grid does not extend beyond r0");
    return rep;
  }

  rep.min_abs_zeta2 = std::numeric_limits<double>::infinity();
  for (int side : {1, -1}) {
    auto& ts = side > 0 ? plus : minus;
    std::sort(ts.begin(), ts.end());
    double prev_t = 0, prev_z = 0;
    for (std::size_t k = 0; k < ts.size(); ++k) {
      const double t = side * ts[k], z = pair.zeta2(t);
      rep.min_abs_zeta2 = std::min(rep.min_abs_zeta2, std::abs(z));
      if (std::abs(z) < rep.c)
        fail("|zeta2(" + std::to_string(t) + ")| = " + std::to_string(std::abs(z)) +
             " < c = " + std::to_string(rep.c));
      if (k > 0 && z * prev_z < 0)
        fail("zeta2 changes sign between t=" + std::to_string(prev_t) + " and t=" +
             std::to_string(t));
      prev_t = t;
      prev_z = z;
    }
  }
  for (double z : pair.zeta2_zeros())
    if (std::abs(z) > pair.r0()) fail("zeta2 vanishes at t=" + std::to_string(z) + " beyond r0");

  // finiteness of the limits: exact two-term representation on the outer decades
  const double t_hi = std::max(plus.empty() ? 0.0 : plus.back(), minus.empty() ? 0.0 : minus.back());
  const double t_lo = std::max(pair.r0() * (1 + 1e-9), t_hi / 100.0);
  try {
    AsymptoticFit f = asymptotic_coeffs(pair, t_lo, t_hi, 200);
    rep.fit = f;
    for (int side : {1, -1}) {
      const SideFit& s = side > 0 ? f.plus : f.minus;
      const std::string tag = side > 0 ? "+" : "-";
      if (s.rel_residual1 > 1e-6)
        fail("zeta1/|t|^{1/2} has no finite limit as t -> " + tag + "inf (fit residual " +
             std::to_string(s.rel_residual1) + ")");
      else if (std::abs(s.coeffs.c12) > 1e-6 * std::max(std::abs(s.coeffs.c11), 1e-300))
        fail("zeta1/|t|^{1/2} diverges: y2-coefficient c12 = " + std::to_string(s.coeffs.c12));
      else if (!(std::abs(s.coeffs.c11) > 1e-12))
        fail("c1," + tag + " vanishes");
      if (s.rel_residual2 > 1e-6)
        fail("zeta2/(|t|^{1/2}log|t|) has no finite limit as t -> " + tag + "inf (fit residual " +
             std::to_string(s.rel_residual2) + ")");
      else if (!(std::abs(s.coeffs.c22) > 1e-12))
        fail("c2," + tag + " vanishes");
    }
  } catch (const Error& e) {
    fail(std::string("asymptotic fit failed: ") + e.what());
  }
  return rep;
}

}  // namespace cdho
