#include <cmath>
#include <numbers>

#include "cdho/error.hpp"
#include "cdho/nonlinearity.hpp"
#include "cdho/threshold.hpp"
#include "doctest.h"

using namespace cdho;

TEST_CASE("F values") {
  const NonlinearityParams p{1.0, 0.0, 0.0, std::numbers::e, 0.5, 2};
  CHECK(eval_FL(1.0, p) == doctest::Approx(1.31326168751822283405).epsilon(1e-15));
  CHECK(eval_FL(0.0, p) == 0.0);
  CHECK(eval_FS(0.0, NonlinearityParams{0.0, 1.0, 0.5, std::numbers::e, 0.5, 1}) == 0.0);
  const NonlinearityParams zero{0.0, 0.0, 0.3, 5.0, 0.5, 1};
  for (double a : {1e-300, 0.1, 3.0}) CHECK(eval_FL(a, zero) == 0.0);
  // tiny amplitudes stay finite and tend to zero
  CHECK(eval_FL(1e-100, p) < 1e-190);
  CHECK(std::isfinite(eval_FL(1e-300, p)));
}

TEST_CASE("F is the sum of its parts, array and scalar forms agree") {
  const NonlinearityParams p = NonlinearityParams::make(0.7, 0.4, 0.5, 50.0, 0.5, 1);
  Eigen::ArrayXd a = Eigen::ArrayXd::LinSpaced(40, 0.0, 3.0);
  const Eigen::ArrayXd f = eval_F(a, p), fl = eval_FL(a, p), fs = eval_FS(a, p);
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    CHECK(f(i) == eval_FL(a(i), p) + eval_FS(a(i), p));
    CHECK(fl(i) == eval_FL(a(i), p));
    CHECK(fs(i) == eval_FS(a(i), p));
  }
}

TEST_CASE("admissibility examples") {
  CHECK(is_admissible_R(2.0, 0.3, 0.0));
  CHECK(is_admissible_R(std::exp(10.0), 0.1, 1.0));
  CHECK_FALSE(is_admissible_R(1.0, 1e-6, 1.0));
}

TEST_CASE("minimal admissible R") {
  const double r5 = min_admissible_R(0.5);
  CHECK(r5 == doctest::Approx(1.35914091).epsilon(1e-7));
  CHECK(is_admissible_R(r5, 0.5, 1.0));
  CHECK_FALSE(is_admissible_R(r5 / 2, 0.5, 1.0));
  CHECK(min_admissible_R(0.99) <= min_admissible_R(0.1));
  CHECK(std::log(min_admissible_R(0.01)) == doctest::Approx(94.3948).epsilon(1e-5));
  CHECK_THROWS_AS(min_admissible_R(1e-3), Error);

  // a^δ0 (log(R* + 1/a))^θ̃ is nondecreasing
  for (double th : {0.0, 0.5, 1.0}) {
    double prev = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const double a = std::pow(10.0, -8.0 + 12.0 * i / 999.0);
      const double v = std::pow(a, 0.5) * std::pow(std::log(r5 + 1.0 / a), th);
      CHECK(v >= prev * (1 - 1e-12));
      prev = v;
    }
  }
}

TEST_CASE("F_L and F_S are monotone for admissible R") {
  const NonlinearityParams p = NonlinearityParams::with_min_R(1.0, 1.0, 0.5);
  double pl = 0.0, ps = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double a = std::pow(10.0, -12.0 + 14.0 * i / 9999.0);
    const double l = eval_FL(a, p), s = eval_FS(a, p);
    CHECK(l >= pl);
    CHECK(s >= ps);
    pl = l;
    ps = s;
  }
}

TEST_CASE("params validation") {
  CHECK_THROWS_AS(NonlinearityParams::make(1, 0, 1.0, 10.0), Error);  // θ outside [0, 1)
  CHECK_THROWS_AS(NonlinearityParams::make(1, 0, 0.0, 10.0, 1.5), Error);
  CHECK_THROWS_AS(NonlinearityParams::make(1, 0, 0.5, 1.0, 1e-6), Error);  // R not admissible
  CHECK(NonlinearityParams::linear(1).is_linear());
}

TEST_CASE("classifier on 1/(s (log s)^q)") {
  for (double q : {0.5, 1.0, 1.5, 2.0}) {
    const ThresholdReport r = classify_threshold(
        [](double s) { return s; }, [q](double s) { return 1.0 / (s * std::pow(std::log(s), q)); },
        std::numbers::e, 1e300, 1e6);
    CHECK(r.verdict == (q > 1 ? Verdict::Converging : Verdict::Diverging));
    for (std::size_t k = 1; k < r.partial_integrals.size(); ++k)
      CHECK(r.partial_integrals[k].value >= r.partial_integrals[k - 1].value);
  }
}

TEST_CASE("classifier tail and report serialisation") {
  auto decay = [](double s) { return std::pow(s, -0.25) / std::sqrt(std::log(s)); };
  const ThresholdReport r =
      classify_threshold(decay, [](double a) { return std::pow(a, 4.0); }, std::numbers::e, 1e300, 1e6);
  REQUIRE(r.verdict == Verdict::Converging);
  CHECK(r.fit.p == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(r.partial_integrals.back().value + r.tail_estimate == doctest::Approx(1.0).epsilon(1e-6));
  const nlohmann::json j = to_json(r);
  CHECK(j.at("verdict") == "Converging");
  CHECK(j.at("partial_integrals").size() == r.partial_integrals.size());

  const ThresholdReport d =
      classify_threshold(decay, [](double a) { return std::pow(a, 3.6); }, std::numbers::e, 1e300, 1e6);
  CHECK(d.verdict == Verdict::Diverging);
  CHECK(std::isnan(d.tail_estimate));
}

TEST_CASE("classifier rejects bad input") {
  auto id = [](double s) { return s; };
  CHECK_THROWS_AS(classify_threshold(id, id, 0.5, 10.0, 1.0), Error);
  CHECK_THROWS_AS(classify_threshold([](double) { return std::nan(""); }, id, 3.0, 10.0, 1.0), Error);
}
