#include <cmath>

#include "cdho/error.hpp"
#include "cdho/fit.hpp"
#include "cdho/fundamental.hpp"
#include "cdho/sigma.hpp"
#include "doctest.h"

using namespace cdho;

// reference digits: tests/oracles/matching.py
constexpr double kX = 2.9750863216882793777;
constexpr double kC11 = -0.3118542783976368538;
constexpr double kC21 = 7.5596951435433457492;
constexpr double kC22 = -3.2066258803251926967;

TEST_CASE("sigma models evaluate piecewise") {
  CHECK(eval_sigma(SigmaModel::zero(), 3.7) == 0.0);
  CHECK(eval_sigma(SigmaModel::canonical(10.0, Eigen::VectorXd::Constant(1, 0.3)), 20.0) ==
        doctest::Approx(0.000625).epsilon(1e-15));
  const SigmaModel m = SigmaModel::matched_section4(10.0);
  CHECK(eval_sigma(m, 0.0) == doctest::Approx(0.088511386214966961647).epsilon(1e-14));
  CHECK(eval_sigma(m, 12.0) == doctest::Approx(1.0 / (4 * 144.0)).epsilon(1e-15));
  for (double t : {0.3, 5.0, 9.99, 10.01, 50.0}) CHECK(eval_sigma(m, t) == eval_sigma(m, -t));
  CHECK(m.is_even());
}

TEST_CASE("sigma kinds round-trip through names") {
  for (SigmaKind k : {SigmaKind::Zero, SigmaKind::Constant, SigmaKind::CanonicalCritical, SigmaKind::Section4})
    CHECK(sigma_kind_from_string(to_string(k)) == k);
  CHECK_THROWS_AS(sigma_kind_from_string("harmonic"), Error);
}

TEST_CASE("zero and constant models use closed forms") {
  const FundamentalPair z = solve_fundamental(SigmaModel::zero(), 100.0);
  for (double t : {-7.0, 0.0, 2.5, 90.0}) {
    CHECK(z.zeta1(t) == doctest::Approx(1.0));
    CHECK(z.zeta2(t) == doctest::Approx(t));
  }
  const double a = 0.7;
  const FundamentalPair c = solve_fundamental(SigmaModel::constant(a * a), 50.0);
  for (double t : {-3.0, 1.0, 12.0}) {
    CHECK(c.zeta1(t) == doctest::Approx(std::cos(a * t)).epsilon(1e-14));
    CHECK(c.zeta2(t) == doctest::Approx(std::sin(a * t) / a).epsilon(1e-14));
  }
  CHECK(c.method_at(1.0) == EvalMethod::ClosedForm);
}

TEST_CASE("initial conditions and Wronskian of the numeric solver") {
  const SigmaModel m = SigmaModel::canonical(5.0, (Eigen::VectorXd(3) << 0.2, 0.0, 0.01).finished());
  const FundamentalPair p = solve_fundamental(m, 200.0, 1e-11);
  const ZetaValues v0 = p(0.0);
  CHECK(v0.z1 == doctest::Approx(1.0));
  CHECK(v0.dz1 == doctest::Approx(0.0));
  CHECK(std::abs(v0.z2) < 1e-15);
  CHECK(v0.dz2 == doctest::Approx(1.0));
  for (int i = -200; i <= 200; ++i) CHECK(std::abs(wronskian(p, i * 1.0) - 1.0) < 1e-8);
}

TEST_CASE("exterior solutions are exact combinations of the critical basis") {
  const FundamentalPair p = solve_fundamental(SigmaModel::matched_section4(10.0), 1e4, 1e-11);
  const ExteriorCoeffs e = *p.exterior(+1);
  for (double t : {15.0, 300.0, 9000.0}) {
    const CriticalBasis b = critical_basis(t);
    CHECK(p.zeta1(t) == doctest::Approx(e.c11 * b.y1 + e.c12 * b.y2).epsilon(1e-12));
    CHECK(p.zeta2(t) == doctest::Approx(e.c21 * b.y1 + e.c22 * b.y2).epsilon(1e-12));
  }
}

TEST_CASE("matching root and coefficients agree with the high-precision reference") {
  const MatchingSolution s = solve_matching(10.0);
  CHECK(s.x == doctest::Approx(kX).epsilon(1e-14));
  CHECK(s.alpha == doctest::Approx(kX / 10.0).epsilon(1e-14));
  CHECK(s.plus.c11 == doctest::Approx(kC11).epsilon(1e-12));
  CHECK(std::abs(s.plus.c12) < 1e-14);
  CHECK(s.plus.c21 == doctest::Approx(kC21).epsilon(1e-12));
  CHECK(s.plus.c22 == doctest::Approx(kC22).epsilon(1e-12));
  CHECK(matching_residual(s) < 1e-10);
  // scale covariance: x does not depend on r0
  CHECK(solve_matching(3.0).x == doctest::Approx(kX).epsilon(1e-14));
}

TEST_CASE("numeric and closed-form pairs agree") {
  const SigmaModel m = SigmaModel::matched_section4(10.0);
  const FundamentalPair a = solve_fundamental(m, 1000.0, 1e-11);
  const FundamentalPair b = solve_fundamental(m, 1000.0, 1e-12, false);
  for (double t : {-800.0, -10.0, -3.0, 4.0, 10.0, 11.0, 640.0}) {
    CHECK(std::abs(a.zeta1(t) - b.zeta1(t)) < 1e-8 * (1 + std::abs(a.zeta1(t))));
    CHECK(std::abs(a.zeta2(t) - b.zeta2(t)) < 1e-8 * (1 + std::abs(a.zeta2(t))));
  }
  const AsymptoticFit f = asymptotic_coeffs(b, 20.0, 1000.0);
  CHECK(std::abs(f.plus.coeffs.c12) < 1e-8);
  CHECK(f.plus.coeffs.c22 == doctest::Approx(kC22).epsilon(1e-8));
  // minus side: ζ1 even, ζ2 odd
  CHECK(f.minus.coeffs.c11 == doctest::Approx(kC11).epsilon(1e-8));
  CHECK(f.minus.coeffs.c22 == doctest::Approx(-kC22).epsilon(1e-8));
}

TEST_CASE("lower bound on zeta2 beyond r0") {
  const FundamentalPair p = solve_fundamental(SigmaModel::matched_section4(10.0), 1e6, 1e-11);
  const A1Report ok = verify_A1(p, default_probe_grid(p.r0(), 1e6));
  CHECK(ok.passed);
  CHECK(ok.c > 0);
  CHECK(p.c1_plus() == doctest::Approx(kC11).epsilon(1e-12));
  CHECK(p.c2_plus() == doctest::Approx(kC22).epsilon(1e-12));
  CHECK(p.c2_minus() == doctest::Approx(-kC22).epsilon(1e-12));

  const FundamentalPair z = solve_fundamental(SigmaModel::zero(), 1e6);
  CHECK_FALSE(verify_A1(z, default_probe_grid(z.r0(), 1e6)).passed);
  const FundamentalPair c = solve_fundamental(SigmaModel::constant(0.25), 1e3);
  const A1Report bad = verify_A1(c, default_probe_grid(c.r0(), 1e3));
  CHECK_FALSE(bad.passed);
  CHECK_FALSE(bad.failures.empty());
}

TEST_CASE("caustics of the matched model lie just beyond the matching radius") {
  const FundamentalPair p = solve_fundamental(SigmaModel::matched_section4(1.0), 100.0, 1e-11);
  REQUIRE(p.zeta2_zeros().size() == 2);
  CHECK(p.zeta2_zeros().back() == doctest::Approx(1.0565).epsilon(1e-3));
  CHECK(p.caustic_count(50.0) == 1);
  CHECK(p.caustic_count(-50.0) == 1);
  CHECK(p.caustic_count(0.5) == 0);
}

TEST_CASE("least squares reports ill-conditioning") {
  Eigen::MatrixXd a(4, 2);
  a << 1, 2, 2, 4, 3, 6, 4, 8;
  CHECK_THROWS_AS(least_squares(a, Eigen::VectorXd::Ones(4)), Error);
  const LinearFit f = fit_line((Eigen::VectorXd(4) << 0, 1, 2, 3).finished(),
                               (Eigen::VectorXd(4) << 1, 3, 5, 7).finished());
  CHECK(f.coeffs(1) == doctest::Approx(2.0));
  CHECK(f.coeffs(0) == doctest::Approx(1.0));
}
