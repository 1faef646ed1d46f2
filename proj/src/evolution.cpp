#include "cdho/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "cdho/error.hpp"
#include "cdho/fit.hpp"
#include "cdho/mdfm.hpp"
#include "cdho/norms.hpp"

namespace cdho {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// e^{−iθ}
Eigen::ArrayXcd cis_neg(const Eigen::ArrayXd& th) {
  Eigen::ArrayXcd r(th.size());
  r.real() = th.cos();
  r.imag() = -th.sin();
  return r;
}

class PositionStepper {
 public:
  PositionStepper(const Grid& g, const SigmaModel& model, const NonlinearityParams& params)
      : g_(g), model_(model), params_(params), r2_(g.radius_sq(Space::Position)),
        k2_(g.wavenumber_sq_fft_order()), inv_size_(1.0 / static_cast<double>(g.size())) {}

  void advance(Eigen::ArrayXcd& u, double t, double dt) {
    const double sig = eval_sigma(model_, t + 0.5 * dt);
    phase(u, sig, 0.5 * dt);
    if (dt != kinetic_dt_) {
      kinetic_ = cis_neg(0.5 * dt * k2_) * inv_size_;
      kinetic_dt_ = dt;
    }
    dft_inplace(u, g_.n, g_.N, false);
    u *= kinetic_;
    dft_inplace(u, g_.n, g_.N, true);
    phase(u, sig, 0.5 * dt);
  }

 private:
  void phase(Eigen::ArrayXcd& u, double sig, double h) {
    Eigen::ArrayXd th = (0.5 * h * sig) * r2_;
    if (!params_.is_linear()) th += h * eval_F(u.abs().eval(), params_);
    u *= cis_neg(th);
  }

  Grid g_;
  SigmaModel model_;
  NonlinearityParams params_;
  Eigen::ArrayXd r2_, k2_;
  Eigen::ArrayXcd kinetic_;
  double kinetic_dt_ = std::numeric_limits<double>::quiet_NaN();
  double inv_size_;
};

// Profile v = base + delta. In ĝ = F[M(ζ2/ζ1)v] the nonlinear flow is the pointwise
// rotation ĝ ← e^{−i dt F(|ζ2|^{−n/2}|ĝ|)}ĝ, applied at the midpoint time.
class ProfileStepper {
 public:
  ProfileStepper(const Field& base, const FundamentalPair& pair, const NonlinearityParams& params)
      : g_(base.grid), pair_(pair), params_(params), base_(base.values),
        delta_(Eigen::ArrayXcd::Zero(base.values.size())), r2_(g_.radius_sq(Space::Position)),
        scale_(std::pow(g_.dx() / std::sqrt(2.0 * std::numbers::pi), g_.n)),
        inv_size_(1.0 / static_cast<double>(g_.size())) {}

  void advance(double t, double dt) {
    if (params_.is_linear()) return;
    const ZetaValues z = pair_(t + 0.5 * dt);
    const Eigen::ArrayXcd c = chirp(z);
    Eigen::ArrayXcd w = c * (base_ + delta_);
    dft_inplace(w, g_.n, g_.N, false);
    const double amp = scale_ * std::pow(std::abs(z.z2), -0.5 * g_.n);
    const Eigen::ArrayXd th = dt * eval_F((amp * w.abs()).eval(), params_);
    // e^{−iθ} − 1 without cancellation
    Eigen::ArrayXcd m(th.size());
    m.real() = -2.0 * (0.5 * th).sin().square();
    m.imag() = -th.sin();
    w *= m;
    dft_inplace(w, g_.n, g_.N, true);
    delta_ += c.conjugate() * w * inv_size_;
  }

  Eigen::ArrayXcd chirp(const ZetaValues& z) const {
    const Eigen::ArrayXd ph = r2_ * (z.z1 / (2.0 * z.z2));
    Eigen::ArrayXcd r(ph.size());
    r.real() = ph.cos();
    r.imag() = ph.sin();
    return r;
  }

  Field base() const { return Field(g_, Space::Position, base_); }
  Field delta() const { return Field(g_, Space::Position, delta_); }
  Field profile() const { return Field(g_, Space::Position, base_ + delta_); }

  // F[M(ζ2/ζ1)v] at time t, continuous-transform normalisation
  Field spectrum(double t) const {
    const ZetaValues z = pair_(t);
    return fourier(Field(g_, Space::Position, chirp(z) * (base_ + delta_)));
  }

 private:
  Grid g_;
  const FundamentalPair& pair_;
  NonlinearityParams params_;
  Eigen::ArrayXcd base_, delta_;
  Eigen::ArrayXd r2_;
  double scale_, inv_size_;
};

// Step times from t_start to t_max. The partition is built outward from the end with the
// smaller |t| so that a reversed run retraces the same steps.
std::vector<double> partition(const SolverConfig& c, const std::vector<double>& stops_in) {
  const double a = c.t_start, b = c.t_max;
  const bool from_a = std::abs(a) <= std::abs(b);
  const double anchor = from_a ? a : b, far = from_a ? b : a;
  const double dir = far >= anchor ? 1.0 : -1.0;
  std::vector<double> stops;
  for (double s : stops_in)
    if (dir * (s - anchor) > 0 && dir * (far - s) > 0) stops.push_back(s);
  stops.push_back(far);
  std::sort(stops.begin(), stops.end(), [dir](double x, double y) { return dir * x < dir * y; });
  stops.erase(std::unique(stops.begin(), stops.end()), stops.end());

  std::vector<double> ts{anchor};
  double t = anchor;
  for (double s : stops) {
    while (dir * (s - t) > 0) {
      const double h = c.dt0 * std::max(1.0, std::abs(t) / c.t_ref);
      t = dir * (s - t) <= h * (1.0 + 1e-9) ? s : t + dir * h;
      ts.push_back(t);
    }
  }
  if (!from_a) std::reverse(ts.begin(), ts.end());
  return ts;
}

double weighted_position_norm(const Field& v, double gamma) {
  return sobolev_norm(v, gamma, SobolevSide::PositionWeighted);
}

}  // namespace

const char* to_string(Scheme s) noexcept { return s == Scheme::Position ? "position" : "hybrid"; }

bool gamma_admissible(double gamma, int n) {
  if (n == 3) return gamma > 1.5 && gamma <= 2.0;
  return gamma > 0.5 * n && gamma < 1.0 + 4.0 / n;
}

void SolverConfig::validate(int n) const {
  if (!(dt0 > 0) || !std::isfinite(dt0)) throw Error(ErrorKind::Config, "solver.dt0 must be positive");
  if (!std::isfinite(t_start) || !std::isfinite(t_max)) throw Error(ErrorKind::Config, "solver times must be finite");
  if (!(t_ref > 0)) throw Error(ErrorKind::Config, "solver.t_ref must be positive");
  if (!(t_first > 0)) throw Error(ErrorKind::Config, "solver.t_first must be positive");
  if (snapshots_per_decade < 1) throw Error(ErrorKind::Config, "solver.snapshots_per_decade must be >= 1");
  if (!gamma_admissible(gamma, n))
    throw Error(ErrorKind::Config, "solver.gamma=" + std::to_string(gamma) +
                                       " outside the admissible window for n=" + std::to_string(n));
  if (!(epsilon_prime >= 0)) throw Error(ErrorKind::Config, "solver.epsilon_prime must be >= 0");
  if (!(t_switch >= 0)) throw Error(ErrorKind::Config, "solver.t_switch must be >= 0");
  if (monitor_every < 1) throw Error(ErrorKind::Config, "solver.monitor_every must be >= 1");
}

std::vector<double> snapshot_schedule(const SolverConfig& c) {
  const double lo = std::min(c.t_start, c.t_max), hi = std::max(c.t_start, c.t_max);
  std::vector<double> s;
  const double amax = std::max(std::abs(lo), std::abs(hi));
  for (int k = 0;; ++k) {
    const double a = c.t_first * std::pow(10.0, static_cast<double>(k) / c.snapshots_per_decade);
    if (a > amax) break;
    for (double v : {a, -a})
      if (v > lo && v < hi) s.push_back(v);
  }
  for (double v : c.extra_snapshots)
    if (v > lo && v < hi) s.push_back(v);
  s.push_back(c.t_max);
  const double dir = c.t_max >= c.t_start ? 1.0 : -1.0;
  std::sort(s.begin(), s.end(), [dir](double x, double y) { return dir * x < dir * y; });
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

Field step(const Field& u, double t, double dt, const SigmaModel& model,
           const NonlinearityParams& params) {
  if (u.space != Space::Position) throw Error(ErrorKind::Precondition, "step expects position space");
  if (dt == 0.0 || !std::isfinite(dt)) throw Error(ErrorKind::Precondition, "step: dt must be finite and nonzero");
  PositionStepper s(u.grid, model, params);
  Eigen::ArrayXcd v = u.values;
  s.advance(v, t, dt);
  return Field(u.grid, Space::Position, std::move(v));
}

Trajectory evolve(const Field& u0, const SolverConfig& config, const SigmaModel& model,
                  const NonlinearityParams& params) {
  const double span = std::max(std::abs(config.t_start), std::abs(config.t_max));
  const FundamentalPair pair = solve_fundamental(model, std::max(span, model.r0) * 1.01, 1e-10);
  return evolve(u0, config, model, params, pair);
}

Trajectory evolve(const Field& u0, const SolverConfig& config, const SigmaModel& model,
                  const NonlinearityParams& params, const FundamentalPair& pair) {
  return evolve(InitialState{config.t_start, StateKind::Solution, u0}, config, model, params, pair);
}

Trajectory evolve(const InitialState& init, const SolverConfig& cfg, const SigmaModel& model,
                  const NonlinearityParams& params, const FundamentalPair& pair) {
  const Grid& g = init.state.grid;
  cfg.validate(g.n);
  params.validate();
  if (params.n != g.n) throw Error(ErrorKind::Config, "params.n does not match grid.n");
  if (init.state.space != Space::Position) throw Error(ErrorKind::Precondition, "evolve expects position-space data");
  if (init.t != cfg.t_start) throw Error(ErrorKind::Precondition, "initial time differs from solver.t_start");
  if (std::max(std::abs(cfg.t_start), std::abs(cfg.t_max)) > pair.t_max() * (1 + 1e-12))
    throw Error(ErrorKind::Precondition, "run extends beyond the fundamental pair's domain");

  if (init.kind == StateKind::Solution && cfg.epsilon_prime > 0 && cfg.t_start == 0.0) {
    const double size = sobolev_norm(init.state, cfg.gamma, SobolevSide::FrequencyWeighted) +
                        sobolev_norm(init.state, cfg.gamma, SobolevSide::PositionWeighted);
    if (size > cfg.epsilon_prime * (1 + 1e-9))
      throw Error(ErrorKind::Precondition, "initial data size " + std::to_string(size) +
                                               " exceeds epsilon_prime");
  }

  const bool hybrid = cfg.scheme == Scheme::Hybrid;
  const double t_switch = hybrid ? (cfg.t_switch > 0 ? cfg.t_switch : pair.r0()) : 0.0;
  const double dir = cfg.t_max >= cfg.t_start ? 1.0 : -1.0;
  if (hybrid && std::abs(cfg.t_max) < std::abs(cfg.t_start))
    throw Error(ErrorKind::Precondition, "hybrid scheme integrates away from t = 0 only");

  Trajectory traj;
  traj.gamma = cfg.gamma;
  traj.scheme = cfg.scheme;
  traj.pair = pair;

  const std::vector<double> snaps = snapshot_schedule(cfg);
  std::vector<double> stops = snaps;
  if (model.is_critical()) {
    stops.push_back(model.r0);
    stops.push_back(-model.r0);
  }
  if (hybrid) stops.push_back(dir * t_switch);
  const std::vector<double> ts = partition(cfg, stops);

  PositionStepper pos(g, model, params);
  std::optional<ProfileStepper> prof;
  Eigen::ArrayXcd u;
  if (init.kind == StateKind::ProfileDelta) {
    if (!hybrid) throw Error(ErrorKind::Precondition, "profile restart requires the hybrid scheme");
    prof.emplace(init.state, pair, params);
    traj.profile_base = init.state;
    traj.profile_base_time = init.t;
  } else {
    u = init.state.values;
  }

  // reference ‖v‖_{0,γ} for the log-change column
  double ref_norm = kNaN, ref_offset = 0.0;
  if (prof) {
    ref_norm = weighted_position_norm(init.state, cfg.gamma);
  } else if (init.t == 0.0) {
    ref_norm = weighted_position_norm(init.state, cfg.gamma);
  } else if (std::abs(init.t) >= pair.r0()) {
    ref_norm = weighted_position_norm(mdfm_pullback(init.state, pair, init.t, g), cfg.gamma);
  }

  double linf0 = 0.0;
  auto monitor = [&](double t, Diagnostics& d) {
    if (d.escape > cfg.escape_limit)
      throw Error(ErrorKind::MassEscape, "mass fraction " + std::to_string(d.escape) +
                                             " near the box edge at t=" + std::to_string(t));
    if (d.spectral_tail > cfg.tail_limit)
      throw Error(ErrorKind::SpectralTail, "top-third spectral mass " + std::to_string(d.spectral_tail) +
                                               " at t=" + std::to_string(t));
    if (linf0 > 0 && d.linf > cfg.blowup_factor * linf0)
      throw Error(ErrorKind::BlowupDetected, "sup norm grew " + std::to_string(d.linf / linf0) +
                                                 "x by t=" + std::to_string(t));
  };

  auto diagnose = [&](double t, bool full) {
    Diagnostics d;
    d.t = t;
    d.h_gamma_0 = d.h_0_gamma = d.dlog_h_0_gamma = kNaN;
    if (prof) {
      const Field v = prof->profile();
      const Field spec = prof->spectrum(t);
      d.l2 = l2_norm(v);
      d.linf = std::pow(std::abs(pair.zeta2(t)), -0.5 * g.n) * linf_norm(spec);
      d.escape = edge_mass_fraction(v);
      d.spectral_tail = edge_mass_fraction(spec, 1.0 / 3.0);
      if (full) {
        d.h_gamma_0 = sobolev_norm(v, cfg.gamma, SobolevSide::FrequencyWeighted);
        d.h_0_gamma = weighted_position_norm(v, cfg.gamma);
        d.dlog_h_0_gamma = ref_offset + weighted_log_ratio(prof->base(), prof->delta(), cfg.gamma,
                                                           SobolevSide::PositionWeighted);
      }
    } else {
      const Field uf(g, Space::Position, u);
      d.l2 = l2_norm(uf);
      d.linf = linf_norm(uf);
      d.escape = edge_mass_fraction(uf);
      d.spectral_tail = spectral_tail_fraction(uf);
      if (full && (t == 0.0 || std::abs(t) >= pair.r0())) {
        const Field v = t == 0.0 ? uf : mdfm_pullback(uf, pair, t, g);
        d.h_gamma_0 = sobolev_norm(v, cfg.gamma, SobolevSide::FrequencyWeighted);
        d.h_0_gamma = weighted_position_norm(v, cfg.gamma);
        d.dlog_h_0_gamma = std::log(d.h_0_gamma / ref_norm);
      }
    }
    return d;
  };

  auto record = [&](double t) {
    Diagnostics d = diagnose(t, true);
    monitor(t, d);
    traj.diagnostics.push_back(d);
    if (cfg.store_states) {
      if (prof)
        traj.snapshots.push_back({t, StateKind::ProfileDelta, prof->delta()});
      else
        traj.snapshots.push_back({t, StateKind::Solution, Field(g, Space::Position, u)});
    }
  };

  {
    Diagnostics d0 = diagnose(cfg.t_start, false);
    linf0 = d0.linf;
  }
  record(cfg.t_start);

  std::size_t next_snap = 0;
  for (std::size_t k = 1; k < ts.size(); ++k) {
    const double t = ts[k - 1], tn = ts[k];
    if (prof)
      prof->advance(t, tn - t);
    else
      pos.advance(u, t, tn - t);
    ++traj.steps;

    if (hybrid && !prof && std::abs(tn) >= t_switch) {
      const Field v = mdfm_pullback(Field(g, Space::Position, u), pair, tn, g);
      prof.emplace(v, pair, params);
      traj.profile_base = v;
      traj.profile_base_time = tn;
      ref_offset = std::isfinite(ref_norm) ? std::log(weighted_position_norm(v, cfg.gamma) / ref_norm) : 0.0;
    }

    while (next_snap < snaps.size() && dir * (snaps[next_snap] - tn) < 0) ++next_snap;
    if (next_snap < snaps.size() && snaps[next_snap] == tn) {
      record(tn);
      ++next_snap;
    } else if (traj.steps % cfg.monitor_every == 0) {
      Diagnostics d = diagnose(tn, false);
      monitor(tn, d);
    }
  }
  return traj;
}

Field Trajectory::profile(std::size_t i) const {
  const Snapshot& s = snapshots.at(i);
  if (s.kind == StateKind::ProfileDelta) {
    if (!profile_base) throw Error(ErrorKind::Precondition, "trajectory lacks its profile base");
    return Field(s.state.grid, Space::Position, profile_base->values + s.state.values);
  }
  if (s.t == 0.0) return s.state;
  if (!pair) throw Error(ErrorKind::Precondition, "trajectory lacks its fundamental pair");
  return mdfm_pullback(s.state, *pair, s.t, s.state.grid);
}

Field Trajectory::solution(std::size_t i) const {
  const Snapshot& s = snapshots.at(i);
  if (s.kind == StateKind::Solution) return s.state;
  if (!pair) throw Error(ErrorKind::Precondition, "trajectory lacks its fundamental pair");
  const Field v = profile(i);
  return mdfm_propagate(v, *pair, s.t, dispersed_grid(v.grid, pair->zeta2(s.t)));
}

GrowthFit track_weighted_growth(const Trajectory& traj, double gamma, double t_min) {
  const double r0 = traj.pair ? traj.pair->r0() : 0.0;
  const double lo = std::max({t_min, r0, std::exp(1.0) * 1.0001});
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < traj.diagnostics.size(); ++i) {
    const Diagnostics& d = traj.diagnostics[i];
    if (std::abs(d.t) < lo) continue;
    double y = kNaN;
    if (gamma == traj.gamma && std::isfinite(d.dlog_h_0_gamma)) {
      y = d.dlog_h_0_gamma;
    } else if (i < traj.snapshots.size()) {
      const Snapshot& s = traj.snapshots[i];
      if (s.kind == StateKind::ProfileDelta && traj.profile_base)
        y = weighted_log_ratio(*traj.profile_base, s.state, gamma, SobolevSide::PositionWeighted);
      else
        y = std::log(sobolev_norm(traj.profile(i), gamma, SobolevSide::PositionWeighted));
    }
    if (!std::isfinite(y)) continue;
    xs.push_back(std::log(std::log(std::abs(d.t))));
    ys.push_back(y);
  }
  if (xs.size() < 5 || xs.back() - xs.front() < 0.1)
    throw Error(ErrorKind::IllConditioned, "track_weighted_growth: run too short for a log log t fit");
  const LinearFit f = fit_line(Eigen::Map<Eigen::VectorXd>(xs.data(), xs.size()),
                               Eigen::Map<Eigen::VectorXd>(ys.data(), ys.size()));
  GrowthFit r;
  r.coefficient = f.coeffs(1);
  r.std_error = f.std_errors(1);
  r.intercept = f.coeffs(0);
  r.points = static_cast<int>(xs.size());
  return r;
}

}  // namespace cdho
