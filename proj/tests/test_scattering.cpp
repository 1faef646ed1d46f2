#include <cmath>
#include <numbers>
#include <optional>

#include "cdho/error.hpp"
#include "cdho/evolution.hpp"
#include "cdho/scattering.hpp"
#include "doctest.h"

using namespace cdho;

namespace {

template <class Fn>
std::optional<ErrorKind> kind_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  return std::nullopt;
}

// ζ2 = τ^{1/2}log τ beyond r0 = 3, the critical exterior mode
FundamentalPair log_pair() {
  return FundamentalPair::from_evaluator(
      [](double t) {
        const double a = std::abs(t), s = t < 0 ? -1.0 : 1.0;
        ZetaValues z;
        z.z1 = std::sqrt(a);
        z.dz1 = s * 0.5 / std::sqrt(a);
        z.z2 = std::sqrt(a) * std::log(a);
        z.dz2 = s * (0.5 * std::log(a) + 1.0) / std::sqrt(a);
        return z;
      },
      3.0, 1e4);
}

ScatteringRecord constant_record(double amp, const NonlinearityParams& p, PhaseConvention c, int decades = 3) {
  const Grid g(1, 16, 4.0);
  const Field base(g, Space::Frequency, Eigen::ArrayXcd::Constant(g.size(), cd(amp, 0.0)));
  const Field zero(g, Space::Frequency, Eigen::ArrayXcd::Zero(g.size()));
  ScatteringRecord rec = make_record(base, p, c);
  const FundamentalPair pair = log_pair();
  for (int k = 0; k <= 40 * decades; ++k) phase_integral(rec, 3.0 * std::pow(10.0, k / 40.0), zero, pair);
  return rec;
}

}  // namespace

TEST_CASE("phase vanishes without the long-range term") {
  const NonlinearityParams p = NonlinearityParams::make(0.0, 1.0, 0.5, std::exp(1.0), 0.5);
  const ScatteringRecord rec = constant_record(0.5, p, PhaseConvention::Single);
  for (std::size_t k = 0; k < rec.size(); ++k) CHECK(rec.theta(k).abs().maxCoeff() == 0.0);
}

TEST_CASE("accumulated phase matches quadrature") {
  const NonlinearityParams p = NonlinearityParams::make(1.0, 0.0, 0.0, std::exp(1.0), 0.5);
  const ScatteringRecord rec = constant_record(0.5, p, PhaseConvention::Single);
  const double ref = 0.10570813794593291809;
  const Eigen::ArrayXd th = rec.theta(rec.size() - 1);
  CHECK(th(0) == doctest::Approx(ref).epsilon(1e-3));
  CHECK((th - th(0)).abs().maxCoeff() < 1e-15);
  for (std::size_t k = 1; k < rec.size(); ++k) CHECK(rec.theta(k)(0) >= rec.theta(k - 1)(0));

  const NonlinearityParams p2 = NonlinearityParams::make(0.5, 0.0, 0.0, std::exp(1.0), 0.5);
  const ScatteringRecord s = constant_record(0.5, p2, PhaseConvention::Single);
  const ScatteringRecord d = constant_record(0.5, p2, PhaseConvention::Double);
  CHECK(s.theta(s.size() - 1)(0) == doctest::Approx(0.5 * ref).epsilon(1e-3));
  CHECK(d.theta(d.size() - 1)(0) == doctest::Approx(0.25 * ref).epsilon(1e-3));
}

TEST_CASE("phase record rejects bad times") {
  const NonlinearityParams p = NonlinearityParams::make(1.0, 0.0, 0.0, std::exp(1.0), 0.5);
  const Grid g(1, 16, 4.0);
  const Field base(g, Space::Frequency, Eigen::ArrayXcd::Constant(g.size(), cd(0.5, 0.0)));
  const Field zero(g, Space::Frequency, Eigen::ArrayXcd::Zero(g.size()));
  const FundamentalPair pair = log_pair();
  ScatteringRecord rec = make_record(base, p);
  CHECK(kind_of([&] { phase_integral(rec, 2.0, zero, pair); }) == ErrorKind::Precondition);
  phase_integral(rec, 5.0, zero, pair);
  CHECK(kind_of([&] { phase_integral(rec, 4.0, zero, pair); }) == ErrorKind::NonMonotoneTime);
  CHECK(kind_of([&] { phase_integral(rec, 5.0, zero, pair); }) == ErrorKind::NonMonotoneTime);
  CHECK(kind_of([&] { phase_integral(rec, -6.0, zero, pair); }) == ErrorKind::NonMonotoneTime);
  CHECK(kind_of([&] { make_record(Field(g, Space::Position), p); }) == ErrorKind::Precondition);
}

TEST_CASE("ladder length is checked") {
  const NonlinearityParams p = NonlinearityParams::make(1.0, 0.0, 0.0, std::exp(1.0), 0.5);
  const ScatteringRecord rec = constant_record(0.5, p, PhaseConvention::Single, 1);
  CHECK(kind_of([&] { extract_W(rec); }) == ErrorKind::LadderTooShort);
}

TEST_CASE("a global phase rotates W and leaves residuals alone") {
  const NonlinearityParams p = NonlinearityParams::make(1.0, 0.0, 0.0, std::exp(1.0), 0.5);
  const ScatteringRecord rec = constant_record(0.5, p, PhaseConvention::Single);
  const ScatteringResult a = extract_W(rec);
  // constant profile: the residual is the phase mismatch |B||e^{iΘk} − e^{iΘL}| alone
  const Eigen::ArrayXd thL = rec.theta(rec.size() - 1);
  const double box = std::sqrt(rec.base.grid.size() * rec.base.grid.cell(Space::Frequency));
  for (std::size_t k = 0; k < a.residual_l2.size(); ++k) {
    const double d = rec.theta(k + 1)(0) - thL(0);
    CHECK(a.residual_l2[k] == doctest::Approx(0.5 * box * std::abs(2 * std::sin(0.5 * d))).epsilon(1e-12));
  }
  ScatteringRecord rot = rec;
  const cd ph = std::polar(1.0, 0.7);
  rot.base.values *= ph;
  const ScatteringResult b = extract_W(rot);
  CHECK((b.W.values - ph * a.W.values).abs().maxCoeff() < 1e-15);
  for (std::size_t k = 0; k < a.residual_l2.size(); ++k)
    CHECK(b.residual_l2[k] == doctest::Approx(a.residual_l2[k]).epsilon(1e-6).scale(1e-15));
  const ScatteringResult off = extract_W(rec, false);
  CHECK(off.W.values.isApprox(rec.base.values));
}

TEST_CASE("profile comparison needs a nonzero W") {
  const NonlinearityParams p = NonlinearityParams::make(1.0, 0.0, 0.0, std::exp(1.0), 0.5);
  const ScatteringRecord rec = constant_record(0.0, p, PhaseConvention::Single);
  const ScatteringResult res = extract_W(rec);
  CHECK_FALSE(profile_compare(rec, res, log_pair()).has_value());
}

TEST_CASE("L4 bound preconditions") {
  const NonlinearityParams p = NonlinearityParams::make(1.0, 0.0, 0.0, std::exp(1.0), 0.5);
  const ScatteringRecord rec = constant_record(0.5, p, PhaseConvention::Single);
  const Trajectory traj;
  const FundamentalPair pair = log_pair();
  CHECK(kind_of([&] { verify_L4_bound(traj, rec, pair, 1e-3, 0.0, 1.0, 0.75); }) == ErrorKind::Precondition);
  CHECK(kind_of([&] { verify_L4_bound(traj, rec, pair, 1e-3, 0.2, 1.0, 0.4); }) == ErrorKind::Precondition);
  CHECK(kind_of([&] { verify_L4_bound(traj, rec, pair, 1e-3, 0.3, 1.0, 0.75); }) == ErrorKind::Precondition);
  CHECK(kind_of([&] { verify_L4_bound(traj, rec, pair, 0.0, 0.2, 1.0, 0.75); }) == ErrorKind::Precondition);
}

TEST_CASE("linear runs scatter to the transform of the data") {
  const SigmaModel m = SigmaModel::matched_section4(1.0);
  const FundamentalPair pair = solve_fundamental(m, 2e3, 1e-11);
  const Grid g(1, 512, 16.0);
  const Field u0 = Field::sample(g, Space::Position, [&](const Eigen::VectorXd& x) {
    return cd(1e-3 * std::exp(-0.5 * m.alpha * x(0) * x(0)), 0.0);
  });
  SolverConfig cfg;
  cfg.scheme = Scheme::Hybrid;
  cfg.t_max = 1e3;
  cfg.snapshots_per_decade = 10;
  const NonlinearityParams lin = NonlinearityParams::linear();
  const Trajectory traj = evolve(u0, cfg, m, lin, pair);
  const ScatteringRecord rec = build_record(traj, lin);
  const ScatteringResult res = extract_W(rec);
  const Field F = fourier(u0);
  CHECK((res.W.values - F.values).abs().maxCoeff() < 1e-4 * F.values.abs().maxCoeff());
  CHECK((res.W.values - rec.spectrum(0).values).abs().maxCoeff() < 1e-12 * F.values.abs().maxCoeff());
  for (double r : res.residual_l2) CHECK(r < 1e-12);
}
