#include <cmath>
#include <numbers>
#include <optional>

#include "cdho/error.hpp"
#include "cdho/evolution.hpp"
#include "cdho/norms.hpp"
#include "doctest.h"

using namespace cdho;

namespace {

Field gaussian(const Grid& g, double w, double amp = 1.0, double k = 0.0) {
  return Field::sample(g, Space::Position, [&](const Eigen::VectorXd& x) {
    return amp * std::exp(cd(-x.squaredNorm() / (2 * w * w), k * x(0)));
  });
}

template <class Fn>
std::optional<ErrorKind> kind_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  return std::nullopt;
}

}  // namespace

TEST_CASE("Strang step conserves mass") {
  const Grid g(1, 512, 16.0);
  const SigmaModel m = SigmaModel::matched_section4(1.0);
  const NonlinearityParams p = NonlinearityParams::with_min_R(1.0, 0.5, 0.5);
  Field u = gaussian(g, 1.0, 0.2);
  const double m0 = l2_norm(u);
  double t = 0.0;
  for (int k = 0; k < 200; ++k, t += 0.01) u = step(u, t, 0.01, m, p);
  CHECK(std::abs(l2_norm(u) - m0) < 1e-12 * m0);
}

TEST_CASE("free step is exact") {
  const Grid g(1, 2048, 40.0);
  const Field u0 = gaussian(g, 1.0, std::pow(std::numbers::pi, -0.25));
  const Field u = step(u0, 0.0, 0.5, SigmaModel::zero(), NonlinearityParams::linear());
  const Field ex = Field::sample(g, Space::Position, [](const Eigen::VectorXd& x) {
    const cd a(1.0, 0.5);
    return std::pow(std::numbers::pi, -0.25) / std::sqrt(a) * std::exp(-x(0) * x(0) / (2.0 * a));
  });
  CHECK(l2_distance(u, ex) < 1e-12);
}

TEST_CASE("a step followed by its reverse returns the data") {
  const Grid g(1, 256, 16.0);
  const SigmaModel m = SigmaModel::matched_section4(1.0);
  const NonlinearityParams p = NonlinearityParams::with_min_R(1.0, 0.5, 0.5);
  const Field u0 = gaussian(g, 1.0, 0.2, 0.5);
  const Field u1 = step(u0, 0.7, 0.03, m, p);
  const Field back = step(u1, 0.73, -0.03, m, p);
  CHECK(l2_distance(back, u0) < 1e-13);

  SolverConfig cfg;
  cfg.dt0 = 0.01;
  cfg.t_max = 2.0;
  cfg.t_first = 0.5;
  cfg.snapshots_per_decade = 4;
  const Trajectory fwd = evolve(u0, cfg, m, p);
  SolverConfig rev = cfg;
  rev.t_start = 2.0;
  rev.t_max = 0.0;
  InitialState init{2.0, StateKind::Solution, fwd.snapshots.back().state};
  const FundamentalPair pair = solve_fundamental(m, 10.0, 1e-11);
  const Trajectory bwd = evolve(init, rev, m, p, pair);
  CHECK(bwd.snapshots.back().t == 0.0);
  CHECK(l2_distance(bwd.snapshots.back().state, u0) < 1e-11);
}

TEST_CASE("snapshot schedule") {
  SolverConfig cfg;
  cfg.t_first = 1.0;
  cfg.snapshots_per_decade = 2;
  cfg.t_max = 100.0;
  const auto s = snapshot_schedule(cfg);
  REQUIRE(s.size() == 5);
  CHECK(s[0] == doctest::Approx(1.0));
  CHECK(s[1] == doctest::Approx(std::sqrt(10.0)));
  CHECK(s[4] == 100.0);
  cfg.t_max = -100.0;
  cfg.extra_snapshots = {-5.0};
  const auto b = snapshot_schedule(cfg);
  REQUIRE(b.size() == 6);
  for (std::size_t i = 1; i < b.size(); ++i) CHECK(b[i] < b[i - 1]);
  CHECK(b.back() == -100.0);
}

TEST_CASE("Sobolev window of the existence result") {
  CHECK(gamma_admissible(1.0, 1));
  CHECK_FALSE(gamma_admissible(0.5, 1));
  CHECK_FALSE(gamma_admissible(5.0, 1));
  CHECK(gamma_admissible(2.0, 3));
  CHECK_FALSE(gamma_admissible(1.5, 3));
  SolverConfig cfg;
  cfg.gamma = 0.4;
  CHECK(kind_of([&] { cfg.validate(1); }) == ErrorKind::Config);
  cfg.gamma = 1.0;
  cfg.dt0 = -1.0;
  CHECK(kind_of([&] { cfg.validate(1); }) == ErrorKind::Config);
}

TEST_CASE("data size precondition") {
  const Grid g(1, 256, 16.0);
  SolverConfig cfg;
  cfg.t_max = 1.0;
  cfg.epsilon_prime = 1e-3;
  const Field big = gaussian(g, 1.0, 1.0);
  CHECK(kind_of([&] {
          evolve(big, cfg, SigmaModel::matched_section4(1.0), NonlinearityParams::with_min_R(1, 0, 0));
        }) == ErrorKind::Precondition);
}

TEST_CASE("mass escaping the box stops the run") {
  const Grid g(1, 256, 10.0);
  SolverConfig cfg;
  cfg.t_max = 4.0;
  cfg.monitor_every = 5;
  const Field u0 = gaussian(g, 1.0, 1.0, 6.0);
  CHECK(kind_of([&] { evolve(u0, cfg, SigmaModel::zero(), NonlinearityParams::linear()); }) ==
        ErrorKind::MassEscape);
}

TEST_CASE("growth fit recovers a synthetic log log exponent") {
  Trajectory traj;
  traj.gamma = 1.0;
  for (int k = 0; k <= 80; ++k) {
    Diagnostics d;
    d.t = 10.0 * std::pow(10.0, k / 20.0);
    d.dlog_h_0_gamma = 0.1 * std::log(std::log(d.t)) + 0.3;
    traj.diagnostics.push_back(d);
  }
  const GrowthFit f = track_weighted_growth(traj, 1.0);
  CHECK(f.coefficient == doctest::Approx(0.1).epsilon(0.02));
  CHECK(f.intercept == doctest::Approx(0.3).epsilon(1e-6));
  CHECK(f.points == 81);
  traj.diagnostics.resize(3);
  CHECK(kind_of([&] { track_weighted_growth(traj, 1.0); }) == ErrorKind::IllConditioned);
}

TEST_CASE("linear profile does not grow") {
  const SigmaModel m = SigmaModel::matched_section4(1.0);
  const FundamentalPair pair = solve_fundamental(m, 2e3, 1e-11);
  const Grid g(1, 512, 16.0);
  SolverConfig cfg;
  cfg.scheme = Scheme::Hybrid;
  cfg.t_max = 1e3;
  cfg.dt0 = 0.01;
  cfg.snapshots_per_decade = 10;
  cfg.store_states = false;
  const Trajectory traj =
      evolve(gaussian(g, 1.0 / std::sqrt(m.alpha), 1e-3), cfg, m, NonlinearityParams::linear(), pair);
  const GrowthFit f = track_weighted_growth(traj, 1.0);
  CHECK(std::abs(f.coefficient) < 1e-8);
  for (const Diagnostics& d : traj.diagnostics)
    CHECK(d.l2 == doctest::Approx(traj.diagnostics.front().l2).epsilon(1e-10));
}
