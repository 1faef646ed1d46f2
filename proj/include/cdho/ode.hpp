#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "cdho/error.hpp"

namespace cdho {

struct OdeOptions {
  double rtol = 1e-10;
  double atol = 1e-10;
  double h_init = 0.0;  // 0: automatic
  double h_max = std::numeric_limits<double>::infinity();
  long max_steps = 2'000'000;
};

// One accepted Dormand–Prince step with its quartic continuous extension.
template <class State>
struct DenseStep {
  using Scalar = typename State::Scalar;
  Scalar t0, h;
  State r1, r2, r3, r4, r5;

  State operator()(Scalar t) const {
    const Scalar s = (t - t0) / h, s1 = Scalar(1) - s;
    return r1 + s * (r2 + s1 * (r3 + s * (r4 + s1 * r5)));
  }
};

template <class State>
class DenseSolution {
 public:
  using Scalar = typename State::Scalar;

  DenseSolution() = default;
  DenseSolution(std::vector<DenseStep<State>> steps, Scalar t_begin, Scalar t_end)
      : steps_(std::move(steps)), t_begin_(t_begin), t_end_(t_end) {}

  Scalar t_begin() const { return t_begin_; }
  Scalar t_end() const { return t_end_; }
  const std::vector<DenseStep<State>>& steps() const { return steps_; }

  bool contains(Scalar t) const {
    return t >= std::min(t_begin_, t_end_) && t <= std::max(t_begin_, t_end_);
  }

  State operator()(Scalar t) const {
    if (!contains(t)) throw Error(ErrorKind::Precondition, "time outside dense solution");
    const bool fwd = t_end_ >= t_begin_;
    // steps are ordered along the direction of integration
    auto it = std::lower_bound(steps_.begin(), steps_.end(), t,
                               [fwd](const DenseStep<State>& st, Scalar v) {
                                 return fwd ? st.t0 + st.h < v : st.t0 + st.h > v;
                               });
    if (it == steps_.end()) --it;
    return (*it)(t);
  }

 private:
  std::vector<DenseStep<State>> steps_;
  Scalar t_begin_ = 0, t_end_ = 0;
};

// Dormand–Prince 5(4) with FSAL and Hairer's dense output.
template <class State, class Rhs>
DenseSolution<State> integrate_dopri5(Rhs&& f, typename State::Scalar t0, State y0,
                                      typename State::Scalar t1, const OdeOptions& opt = {}) {
  using Scalar = typename State::Scalar;
  using std::abs;
  using std::max;
  using std::min;
  using std::pow;
  using std::sqrt;

  constexpr Scalar a21 = Scalar(1) / 5;
  constexpr Scalar a31 = Scalar(3) / 40, a32 = Scalar(9) / 40;
  constexpr Scalar a41 = Scalar(44) / 45, a42 = Scalar(-56) / 15, a43 = Scalar(32) / 9;
  constexpr Scalar a51 = Scalar(19372) / 6561, a52 = Scalar(-25360) / 2187,
                   a53 = Scalar(64448) / 6561, a54 = Scalar(-212) / 729;
  constexpr Scalar a61 = Scalar(9017) / 3168, a62 = Scalar(-355) / 33,
                   a63 = Scalar(46732) / 5247, a64 = Scalar(49) / 176,
                   a65 = Scalar(-5103) / 18656;
  constexpr Scalar a71 = Scalar(35) / 384, a73 = Scalar(500) / 1113, a74 = Scalar(125) / 192,
                   a75 = Scalar(-2187) / 6784, a76 = Scalar(11) / 84;
  constexpr Scalar c2 = Scalar(1) / 5, c3 = Scalar(3) / 10, c4 = Scalar(4) / 5,
                   c5 = Scalar(8) / 9;
  constexpr Scalar e1 = Scalar(71) / 57600, e3 = Scalar(-71) / 16695, e4 = Scalar(71) / 1920,
                   e5 = Scalar(-17253) / 339200, e6 = Scalar(22) / 525, e7 = Scalar(-1) / 40;
  constexpr Scalar d1 = Scalar(-12715105075.0) / Scalar(11282082432.0),
                   d3 = Scalar(87487479700.0) / Scalar(32700410799.0),
                   d4 = Scalar(-10690763975.0) / Scalar(1880347072.0),
                   d5 = Scalar(701980252875.0) / Scalar(199316789632.0),
                   d6 = Scalar(-1453857185.0) / Scalar(822651844.0),
                   d7 = Scalar(69997945.0) / Scalar(29380423.0);

  std::vector<DenseStep<State>> steps;
  if (t1 == t0) {
    steps.push_back({t0, Scalar(1), y0, State::Zero(y0.size()), State::Zero(y0.size()),
                     State::Zero(y0.size()), State::Zero(y0.size())});
    return DenseSolution<State>(std::move(steps), t0, t1);
  }

  const Scalar dir = t1 > t0 ? Scalar(1) : Scalar(-1);
  const Scalar span = abs(t1 - t0);
  auto err_norm = [&](const State& err, const State& ya, const State& yb) {
    Scalar acc = 0;
    for (Eigen::Index i = 0; i < err.size(); ++i) {
      const Scalar sc = opt.atol + opt.rtol * max(abs(ya(i)), abs(yb(i)));
      acc += (err(i) / sc) * (err(i) / sc);
    }
    return sqrt(acc / Scalar(err.size()));
  };

  State k1 = f(t0, y0);
  Scalar h = opt.h_init > 0 ? opt.h_init : min(span, Scalar(0.01) * max(Scalar(1), span));
  h = min(h, Scalar(opt.h_max));
  if (opt.h_init <= 0) {
    // Hairer's initial step heuristic, first-order version
    const Scalar d0 = err_norm(y0, y0, y0), dd = err_norm(k1, y0, y0);
    if (d0 > 1e-5 && dd > 1e-5) h = min(h, Scalar(0.01) * d0 / dd);
    h = max(h, span * Scalar(1e-12));
  }

  Scalar t = t0;
  State y = y0;
  long n_steps = 0;
  Scalar fac_old = Scalar(1e-4);
  bool last_rejected = false;
  while (dir * (t1 - t) > 0) {
    if (++n_steps > opt.max_steps)
      throw Error(ErrorKind::IntegrationFailure, "step budget exhausted");
    bool last = false;
    if (h >= abs(t1 - t)) {
      h = abs(t1 - t);
      last = true;
    }
    if (h < Scalar(64) * std::numeric_limits<Scalar>::epsilon() * max(Scalar(1), abs(t)))
      throw Error(ErrorKind::IntegrationFailure,
                  "step size underflow near t=" + std::to_string(static_cast<double>(t)));
    const Scalar hs = dir * h;
    const State k2 = f(t + c2 * hs, State(y + hs * a21 * k1));
    const State k3 = f(t + c3 * hs, State(y + hs * (a31 * k1 + a32 * k2)));
    const State k4 = f(t + c4 * hs, State(y + hs * (a41 * k1 + a42 * k2 + a43 * k3)));
    const State k5 =
        f(t + c5 * hs, State(y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)));
    const State k6 =
        f(t + hs, State(y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)));
    const State y_new = y + hs * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    const State k7 = f(t + hs, y_new);
    const State err = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const Scalar en = err_norm(err, y, y_new);
    if (!std::isfinite(static_cast<double>(en)))
      throw Error(ErrorKind::IntegrationFailure, "non-finite error estimate");

    if (en <= 1) {
      const State ydiff = y_new - y;
      const State bspl = hs * k1 - ydiff;
      DenseStep<State> st{t, hs, y, ydiff, bspl, State(ydiff - hs * k7 - bspl),
                          State(hs * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7))};
      steps.push_back(std::move(st));
      t = last ? t1 : t + hs;
      y = y_new;
      k1 = k7;
      // PI controller (beta = 0.04)
      Scalar fac = pow(max(en, Scalar(1e-10)), Scalar(0.17)) * pow(fac_old, Scalar(-0.04));
      fac = std::clamp(fac / Scalar(0.9), Scalar(0.1), Scalar(5));
      Scalar h_new = h / fac;
      if (last_rejected) h_new = min(h_new, h);
      fac_old = max(en, Scalar(1e-4));
      h = min(h_new, Scalar(opt.h_max));
      last_rejected = false;
    } else {
      h = h / min(Scalar(5), pow(en, Scalar(0.2)) / Scalar(0.9));
      last_rejected = true;
    }
  }
  return DenseSolution<State>(std::move(steps), t0, t1);
}

}  // namespace cdho
