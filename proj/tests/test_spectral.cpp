#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "cdho/chirpz.hpp"
#include "cdho/dispersive.hpp"
#include "cdho/error.hpp"
#include "cdho/field_io.hpp"
#include "cdho/mdfm.hpp"
#include "cdho/norms.hpp"
#include "doctest.h"

using namespace cdho;

namespace {

Field gaussian(const Grid& g, double w, double amp = 1.0) {
  return Field::sample(g, Space::Position, [&](const Eigen::VectorXd& x) {
    return cd(amp * std::exp(-x.squaredNorm() / (2 * w * w)));
  });
}

}  // namespace

TEST_CASE("grid validation and geometry") {
  CHECK_THROWS_AS(Grid(1, 100, 10.0), Error);
  CHECK_THROWS_AS(Grid(4, 64, 10.0), Error);
  const Grid g(2, 64, 8.0);
  CHECK(g.size() == 64 * 64);
  CHECK(g.dx() == doctest::Approx(0.25));
  CHECK(g.axis(Space::Position)(32) == 0.0);
  CHECK(g.axis(Space::Frequency)(32) == 0.0);
}

TEST_CASE("unitary Fourier transform") {
  const Grid g(1, 512, 20.0);
  const Field u = gaussian(g, 1.0);
  const Field f = fourier(u);
  CHECK(l2_norm(f) == doctest::Approx(l2_norm(u)).epsilon(1e-14));
  // e^{−x²/2} is its own transform
  const Field ex = Field::sample(g, Space::Frequency, [](const Eigen::VectorXd& k) {
    return cd(std::exp(-0.5 * k.squaredNorm()), 0.0);
  });
  CHECK(l2_distance(f, ex) < 1e-13);
  CHECK(l2_distance(inverse_fourier(f), u) < 1e-14);
  const Grid g2(2, 64, 10.0);
  const Field v = gaussian(g2, 1.3);
  CHECK(l2_distance(inverse_fourier(fourier(v)), v) < 1e-13);
}

TEST_CASE("chirp-z agrees with the direct sum") {
  Eigen::VectorXcd in(37);
  for (int j = 0; j < 37; ++j) in(j) = cd(std::sin(0.3 * j), std::cos(1.1 * j * j));
  const auto a = chirp_z<double>(in, -3.0, 0.17, -2.5, 0.093, 53, -1);
  const auto b = direct_sum<double>(in, -3.0, 0.17, -2.5, 0.093, 53, -1);
  CHECK((a - b).norm() < 1e-11 * b.norm());
}

TEST_CASE("dilation of a Gaussian") {
  const Grid g(1, 4096, 40.0);
  const Field u0 = gaussian(g, 1.0, std::pow(std::numbers::pi, -0.25));
  const Field d = apply_D(u0, 2.0);
  const Field ex = Field::sample(g, Space::Position, [](const Eigen::VectorXd& x) {
    return std::pow(2.0, -0.5) * std::polar(1.0, -std::numbers::pi / 4) * std::pow(std::numbers::pi, -0.25) *
           std::exp(-x(0) * x(0) / 8);
  });
  CHECK(l2_distance(d, ex) < 1e-10);
  CHECK(l2_norm(d) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("MDFM reproduces free evolution and inverts") {
  const Grid g(1, 4096, 40.0);
  const Field u0 = gaussian(g, 1.0, std::pow(std::numbers::pi, -0.25));
  const FundamentalPair pair = solve_fundamental(SigmaModel::zero(), 10.0);
  for (double t : {0.5, 1.0, 2.0, 4.0, -2.0}) {
    const Field u = mdfm_propagate(u0, pair, t);
    const Field ex = Field::sample(g, Space::Position, [t](const Eigen::VectorXd& x) {
      const cd a(1.0, t);
      return std::pow(std::numbers::pi, -0.25) / std::sqrt(a) * std::exp(-x(0) * x(0) / (2.0 * a));
    });
    CHECK(l2_distance(u, ex) < 1e-6);
    CHECK(l2_distance(mdfm_pullback(u, pair, t, g), u0) < 1e-10);
  }
  CHECK_THROWS_AS(mdfm_propagate(u0, pair, 0.0), Error);
}

TEST_CASE("ground state of the interior oscillator only rotates") {
  const SigmaModel m = SigmaModel::matched_section4(1.0);
  const FundamentalPair pair = solve_fundamental(m, 10.0, 1e-11);
  const Grid g(1, 1024, 20.0);
  const Field u0 = gaussian(g, 1.0 / std::sqrt(m.alpha));
  for (double t : {0.3, 0.9}) {
    const Field u = mdfm_propagate(u0, pair, t);
    Field ex = u0;
    ex.values *= std::polar(1.0, -0.5 * m.alpha * t);
    CHECK(l2_distance(u, ex) < 1e-9 * l2_norm(u0));
  }
}

TEST_CASE("propagation past the caustic keeps the branch continuous") {
  const SigmaModel m = SigmaModel::matched_section4(1.0);
  const FundamentalPair pair = solve_fundamental(m, 10.0, 1e-11);
  const Grid g(1, 1024, 20.0);
  const Field u0 = gaussian(g, 0.8);
  // composition through the zero of ζ2 near t ≈ 1.0565 against the pullback identity
  for (double t : {1.0, 1.2, 3.0}) {
    const Grid out = dispersed_grid(g, pair.zeta2(t));
    const Field u = mdfm_propagate(u0, pair, t, out.L > g.L ? out : g);
    CHECK(l2_norm(u) == doctest::Approx(l2_norm(u0)).epsilon(1e-8));
    CHECK(l2_distance(mdfm_pullback(u, pair, t, g), u0) < 1e-6);
  }
}

TEST_CASE("escape is detected on a box that is too small") {
  const Grid g(1, 256, 6.0);
  const Field u0 = gaussian(g, 0.5);
  const FundamentalPair pair = solve_fundamental(SigmaModel::zero(), 100.0);
  CHECK_THROWS_AS(mdfm_propagate(u0, pair, 50.0, g), Error);
}

TEST_CASE("Sobolev norms") {
  const Grid g(1, 1024, 20.0);
  const Field u = gaussian(g, 1.0);
  const double ref = std::sqrt(2.75 * std::sqrt(std::numbers::pi));
  CHECK(sobolev_norm(u, 2.0, SobolevSide::FrequencyWeighted) == doctest::Approx(ref).epsilon(1e-12));
  CHECK(sobolev_norm(u, 2.0, SobolevSide::PositionWeighted) == doctest::Approx(ref).epsilon(1e-12));
  CHECK(sobolev_norm(u, 0.0, SobolevSide::PositionWeighted) == doctest::Approx(l2_norm(u)).epsilon(1e-14));
  double prev = 0.0;
  for (double gm : {0.0, 0.5, 1.0, 1.5, 2.5}) {
    const double v = sobolev_norm(u, gm, SobolevSide::FrequencyWeighted);
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("weighted log ratio resolves tiny perturbations") {
  const Grid g(1, 512, 20.0);
  const Field b = gaussian(g, 1.0);
  Field d = gaussian(g, 0.7);
  d.values *= 1e-14;
  Field sum = b;
  sum.values += d.values;
  const double exact = std::log(sobolev_norm(sum, 1.0, SobolevSide::PositionWeighted) /
                                sobolev_norm(b, 1.0, SobolevSide::PositionWeighted));
  const double r = weighted_log_ratio(b, d, 1.0, SobolevSide::PositionWeighted);
  CHECK(r > 0);
  CHECK(std::abs(r - exact) < 1e-15);
  d.values *= 1e-6;
  CHECK(weighted_log_ratio(b, d, 1.0, SobolevSide::PositionWeighted) == doctest::Approx(r * 1e-6).epsilon(1e-6));
}

TEST_CASE("Leibniz ratio is finite") {
  const Grid g(1, 256, 16.0);
  const NonlinearityParams p = NonlinearityParams::with_min_R(1.0, 1.0, 0.5);
  for (double gm : {0.75, 1.5, 2.5}) {
    const double r = leibniz_ratio(gaussian(g, 1.0), gm, p, NonlinearPart::L);
    CHECK(std::isfinite(r));
    CHECK(r > 0);
  }
}

TEST_CASE("dispersive fit recovers exact exponents") {
  const FundamentalPair pair = solve_fundamental(SigmaModel::matched_section4(1.0), 2e5, 1e-11);
  std::vector<double> t, v;
  for (int k = 0; k <= 120; ++k) {
    t.push_back(1e2 * std::pow(10.0, k / 40.0));
    v.push_back(3.0 * std::pow(std::abs(pair.zeta2(t.back())), -0.5));
  }
  const DispersiveFit f = dispersive_fit(t, v, pair);
  CHECK(f.slope_vs_zeta2 == doctest::Approx(-0.5).epsilon(1e-10));
  CHECK(std::abs(f.slope_vs_t + 0.25) < 0.05);
  CHECK(std::abs(f.log_exponent + 0.5) < 0.1);
}

TEST_CASE("field files round-trip") {
  const auto dir = std::filesystem::temp_directory_path() / "cdho_test_io";
  std::filesystem::create_directories(dir);
  const Grid g(1, 64, 5.0);
  Field u = gaussian(g, 1.0);
  u.values *= cd(0.3, -1.7);
  write_field((dir / "u.bin").string(), u, 12.5, {{"state", "solution"}});
  const FieldFile r = read_field((dir / "u.bin").string());
  CHECK(r.time == 12.5);
  CHECK(r.field.grid == g);
  CHECK(r.field.space == Space::Position);
  CHECK((r.field.values == u.values).all());
  CHECK(r.header.at("state") == "solution");
  write_field_csv((dir / "u.csv").string(), u);
  std::ifstream in(dir / "u.csv");
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) ++lines;
  CHECK(lines == 65);
  CHECK_THROWS_AS(read_field((dir / "missing.bin").string()), Error);
  std::filesystem::remove_all(dir);
}
