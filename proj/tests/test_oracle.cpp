#include <cmath>

#include "doctest.h"
#include "scoredens/score_oracle.hpp"
#include "scoredens/stats.hpp"

using namespace scoredens;

namespace {

Point pt(double x) {
  Point p(1);
  p << x;
  return p;
}

GaussianMixture std_normal(int d) {
  return GaussianMixture({1.0}, {GaussianParams::spherical(Point::Zero(d), 1.0)});
}

}  // namespace

TEST_SUITE("oracle") {

TEST_CASE("exact oracle evaluates the stationary score") {
  const TimeWindow w(0.01, 4.0);
  const ScoreOracle oracle = exact_oracle(std_normal(2), w);
  Point x(2);
  x << 0.7, -0.2;
  for (double t : {0.01, 1.0, 4.0}) {
    CHECK((oracle.eval(t, x) + x).norm() < 1e-12);
    CHECK(oracle.error_profile(t) == 0.0);
  }
  CHECK_THROWS_AS(oracle.eval(0.005, x), std::domain_error);
  CHECK_THROWS_AS(oracle.eval(4.5, x), std::domain_error);
}

TEST_CASE("biased oracle") {
  const TimeWindow w(0.0, 4.0);
  const ScoreOracle base = exact_oracle(std_normal(1), w);
  const ScoreOracle same = biased_oracle(base, pt(1.0), [](double) { return 0.0; });
  CHECK(same.eval(1.0, pt(0.4))[0] == base.eval(1.0, pt(0.4))[0]);

  const ScoreOracle shifted = biased_oracle(base, pt(1.0), [](double) { return 0.1; });
  for (double t : {0.5, 1.0, 3.0}) {
    CHECK(shifted.eval(t, pt(0.0))[0] == doctest::Approx(0.1).epsilon(1e-14));
  }
  CHECK_THROWS_AS(biased_oracle(base, pt(2.0), [](double) { return 0.1; }),
                  std::invalid_argument);
  const ScoreOracle negative = biased_oracle(base, pt(1.0), [](double) { return -0.1; });
  CHECK_THROWS_AS(negative.eval(1.0, pt(0.0)), std::invalid_argument);
}

TEST_CASE("integrated error") {
  const ScoreOracle oracle = exact_oracle(std_normal(1), TimeWindow(0.0, 4.0));
  CHECK(integrated_error(oracle) == doctest::Approx(0.0));

  const ScoreOracle constant = biased_oracle(oracle, pt(1.0), [](double) { return 0.1; });
  CHECK(integrated_error(constant) == doctest::Approx(0.2).epsilon(1e-10));

  const ScoreOracle base1 = exact_oracle(std_normal(1), TimeWindow(0.0, 1.0));
  const ScoreOracle root_t = biased_oracle(base1, pt(1.0), [](double t) { return std::sqrt(t); });
  CHECK(integrated_error(root_t) ==
        doctest::Approx(0.7071067811865476).epsilon(1e-10));
}

TEST_CASE("declared error matches the empirical L2 error") {
  RandomStream rng(8080);
  const GaussianMixture mix =
      GaussianMixture({0.5, 0.5}, {GaussianParams::spherical(pt(-1.0), 1.0),
                                   GaussianParams::spherical(pt(1.0), 1.0)});
  const TimeWindow w(0.05, 2.0);
  const ScoreOracle base = exact_oracle(mix, w);
  const auto eps = [](double t) { return 0.05 + 0.02 * t; };
  const ScoreOracle corrupted = biased_oracle(base, pt(1.0), eps);
  for (double t : {w.tau, 0.5 * (w.tau + w.T), w.T}) {
    RunningStat sq;
    for (int i = 0; i < 100000; ++i) {
      const Point x0 = mix.sample(rng);
      const Point xt = ou_push_point(x0, rng.normal_vector(1), t);
      sq.add((corrupted.eval(t, xt) - base.eval(t, xt)).squaredNorm());
    }
    const double declared = eps(t);
    // constant-in-x bias: the empirical error is deterministic, so the
    // statistical slack degenerates and only rounding dust remains
    CHECK(std::abs(sq.mean() - declared * declared) <= 5.0 * sq.stderr_mean() + 1e-15);
  }
}

TEST_CASE("random field corruption stays within the declared bound") {
  RandomStream rng(11);
  const GaussianMixture mix = std_normal(2);
  const TimeWindow w(0.05, 2.0);
  const ScoreOracle base = exact_oracle(mix, w);
  const ScoreOracle field = random_field_oracle(base, [](double) { return 0.2; }, 2, rng);
  RunningStat sq;
  for (int i = 0; i < 20000; ++i) {
    const Point x0 = mix.sample(rng);
    const Point xt = ou_push_point(x0, rng.normal_vector(2), 1.0);
    sq.add((field.eval(1.0, xt) - base.eval(1.0, xt)).squaredNorm());
  }
  CHECK(std::sqrt(sq.mean()) <= 0.2 + 1e-3);
  CHECK(sq.mean() > 0.0);
}

TEST_CASE("evaluation is deterministic") {
  const ScoreOracle oracle = exact_oracle(std_normal(3), TimeWindow(0.01, 3.0));
  RandomStream rng(5);
  const Point x = rng.normal_vector(3);
  const Point a = oracle.eval(1.234, x);
  const Point b = oracle.eval(1.234, x);
  CHECK(a == b);
}

TEST_CASE("time-shifted oracle") {
  const ScoreOracle base = exact_oracle(std_normal(1), TimeWindow(0.01, 3.0));
  const ScoreOracle shifted = time_shifted_oracle(base, 0.5);
  CHECK(shifted.window.T == doctest::Approx(2.5));
  CHECK(shifted.eval(1.0, pt(0.3))[0] == base.eval(1.5, pt(0.3))[0]);
  CHECK_THROWS_AS(time_shifted_oracle(base, 3.5), std::invalid_argument);
}

}  // TEST_SUITE
