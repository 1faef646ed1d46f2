#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "cdho/fundamental.hpp"
#include "cdho/grid.hpp"
#include "cdho/nonlinearity.hpp"
#include "cdho/sigma.hpp"

namespace cdho {

enum class Scheme {
  Position,  // Strang splitting in x for the whole run
  Hybrid     // Strang up to t_switch, then the profile v = U0(0,t)u with exact linear flow
};

const char* to_string(Scheme s) noexcept;

struct SolverConfig {
  double dt0 = 0.01;
  double t_start = 0.0;
  double t_max = 100.0;  // end time; below t_start runs backwards
  double t_ref = 10.0;   // dt = dt0·max(1, |t|/t_ref)
  double t_first = 1.0;  // first log-spaced snapshot (|t|)
  int snapshots_per_decade = 40;
  std::vector<double> extra_snapshots;
  double epsilon_prime = 0.0;  // 0: no data-size check
  double gamma = 1.0;
  Scheme scheme = Scheme::Position;
  double t_switch = 0.0;  // hybrid: 0 selects the pair's r0
  int monitor_every = 50;
  double escape_limit = 1e-6;
  double tail_limit = 1e-8;
  double blowup_factor = 10.0;
  bool store_states = true;

  void validate(int n) const;
};

// Admissible Sobolev window of the global existence result.
bool gamma_admissible(double gamma, int n);

enum class StateKind {
  Solution,     // u(t) on the grid
  ProfileDelta  // v(t) − profile_base
};

struct Snapshot {
  double t;
  StateKind kind;
  Field state;
};

struct Diagnostics {
  double t = 0, l2 = 0, linf = 0, h_gamma_0 = 0, h_0_gamma = 0, escape = 0;
  double spectral_tail = 0;
  double dlog_h_0_gamma = 0;  // log(‖v(t)‖_{0,γ}/‖v_ref‖_{0,γ}); NaN when v is unavailable
};

struct Trajectory {
  std::vector<Snapshot> snapshots;
  std::vector<Diagnostics> diagnostics;
  std::optional<Field> profile_base;
  double profile_base_time = 0.0;
  double gamma = 1.0;
  Scheme scheme = Scheme::Position;
  std::optional<FundamentalPair> pair;
  long steps = 0;

  // v(t_i) = U0(0,t_i)u(t_i); throws if unavailable.
  Field profile(std::size_t i) const;
  // u(t_i) on the grid; for profile snapshots, via the MDFM on the dispersed grid.
  Field solution(std::size_t i) const;
};

// One Strang step from t to t + dt (dt may be negative).
Field step(const Field& u, double t, double dt, const SigmaModel& model,
           const NonlinearityParams& params);

struct InitialState {
  double t = 0.0;
  StateKind kind = StateKind::Solution;
  Field state;  // u(t), or v(t) for a profile restart
};

Trajectory evolve(const Field& u0, const SolverConfig& config, const SigmaModel& model,
                  const NonlinearityParams& params);
Trajectory evolve(const Field& u0, const SolverConfig& config, const SigmaModel& model,
                  const NonlinearityParams& params, const FundamentalPair& pair);
Trajectory evolve(const InitialState& init, const SolverConfig& config, const SigmaModel& model,
                  const NonlinearityParams& params, const FundamentalPair& pair);

// Log-spaced snapshot times in (t_start, t_max], always including t_max.
std::vector<double> snapshot_schedule(const SolverConfig& config);

struct GrowthFit {
  double coefficient = 0, std_error = 0, intercept = 0;
  int points = 0;
};

// Slope of log‖v(t)‖_{0,γ} against log log t over snapshots with |t| ≥ max(t_min, r0, e).
GrowthFit track_weighted_growth(const Trajectory& traj, double gamma, double t_min = 0.0);

}  // namespace cdho
