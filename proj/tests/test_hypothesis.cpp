#include <cmath>

#include "doctest.h"
#include "scoredens/hypothesis.hpp"
#include "scoredens/stats.hpp"

using namespace scoredens;

namespace {

HclweParams pancake_params(int d) {
  Point secret = Point::Zero(d);
  secret[0] = 1.0;
  return HclweParams{0.1, 2.0, 8, secret};
}

std::vector<Point> draw(const GaussianMixture& mix, long n, RandomStream rng) {
  std::vector<Point> out(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) {
    RandomStream s = rng.derive(static_cast<std::uint64_t>(i));
    out[static_cast<std::size_t>(i)] = mix.sample(s);
  }
  return out;
}

}  // namespace

TEST_SUITE("hypothesis") {

TEST_CASE("tester basics") {
  const GaussianMixture null_mix = hclwe_null(2);
  TesterConfig cfg;
  cfg.m = 20;
  cfg.epsilon = 0.01;
  cfg.null_logdensity = [&](const Point& x) { return null_mix.logdensity(x); };
  RandomStream rng(42);
  const std::vector<Point> samples = draw(null_mix, 20, rng);

  const TesterVerdict h0 = run_tester(
      cfg, [&](const Point& x) { return null_mix.logdensity(x); }, samples);
  CHECK(h0.verdict == Hypothesis::H0);
  CHECK(!h0.violating_index.has_value());
  CHECK(h0.ratios.size() == 20);

  const TesterVerdict h1 = run_tester(
      cfg, [&](const Point& x) { return null_mix.logdensity(x) + 2.0 * cfg.epsilon; },
      samples);
  CHECK(h1.verdict == Hypothesis::H1);
  CHECK(h1.violating_index.value() == 0);

  // boundary is inclusive: exactly epsilon stays H0
  const TesterVerdict edge = run_tester(
      cfg, [&](const Point& x) { return null_mix.logdensity(x) + cfg.epsilon; }, samples);
  CHECK(edge.verdict == Hypothesis::H0);

  CHECK_THROWS_AS(run_tester(cfg, [&](const Point&) { return 0.0; },
                             draw(null_mix, 3, rng)),
                  std::invalid_argument);
}

TEST_CASE("verdict invariant to shifting both densities") {
  const GaussianMixture null_mix = hclwe_null(2);
  RandomStream rng(7);
  const std::vector<Point> samples = draw(null_mix, 15, rng);
  const double shift = 3.7;
  TesterConfig cfg;
  cfg.m = 15;
  cfg.epsilon = 0.05;
  cfg.null_logdensity = [&](const Point& x) { return null_mix.logdensity(x); };
  TesterConfig cfg_shifted = cfg;
  cfg_shifted.null_logdensity = [&](const Point& x) {
    return null_mix.logdensity(x) + shift;
  };
  const LogDensityFn phat = [&](const Point& x) {
    return null_mix.logdensity(x) + 0.04 * std::sin(x[0]);
  };
  const LogDensityFn phat_shifted = [&](const Point& x) { return phat(x) + shift; };
  const TesterVerdict a = run_tester(cfg, phat, samples);
  const TesterVerdict b = run_tester(cfg_shifted, phat_shifted, samples);
  CHECK(a.verdict == b.verdict);
  for (std::size_t i = 0; i < a.ratios.size(); ++i) {
    CHECK(a.ratios[i] == doctest::Approx(b.ratios[i]).epsilon(1e-9));
  }
}

TEST_CASE("exact evaluators separate the hypotheses") {
  const HclweParams params = pancake_params(4);
  const GaussianMixture null_mix = hclwe_null(4);
  TesterConfig cfg;
  cfg.null_logdensity = [&](const Point& x) { return null_mix.logdensity(x); };
  RandomStream rng(2025);

  int h0_correct = 0, h1_correct = 0;
  const int reps = 50;
  for (int rep = 0; rep < reps; ++rep) {
    RandomStream local = rng.derive(rep);
    // under H0 with phat = null the ratio is identically zero
    const std::vector<Point> null_samples = draw(null_mix, cfg.m, local.derive("h0"));
    const TesterVerdict v0 =
        run_tester(cfg, cfg.null_logdensity, null_samples);
    if (v0.verdict == Hypothesis::H0) ++h0_correct;

    HclweParams p = params;
    RandomStream srng = local.derive("secret");
    p.secret = uniform_unit_vector(4, srng);
    const GaussianMixture truth = hclwe_mixture(p);
    const std::vector<Point> h1_samples = draw(truth, cfg.m, local.derive("h1"));
    const TesterVerdict v1 = run_tester(
        cfg, [&](const Point& x) { return truth.logdensity(x); }, h1_samples);
    if (v1.verdict == Hypothesis::H1) ++h1_correct;
  }
  CHECK(h0_correct == reps);
  CHECK(h1_correct >= static_cast<int>(0.9 * reps));
}

TEST_CASE("uniform unit vectors") {
  RandomStream rng(31);
  RunningStat sign_stat;
  for (int i = 0; i < 10000; ++i) {
    const Point v = uniform_unit_vector(1, rng);
    CHECK(std::abs(std::abs(v[0]) - 1.0) < 1e-12);
    sign_stat.add(v[0] > 0.0 ? 1.0 : 0.0);
  }
  CHECK(std::abs(sign_stat.mean() - 0.5) < 3.0 * 0.5 / std::sqrt(10000.0));

  const int d = 5;
  Point mean = Point::Zero(d);
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    const Point v = uniform_unit_vector(d, rng);
    CHECK(std::abs(v.norm() - 1.0) < 1e-12);
    mean += v;
  }
  mean /= static_cast<double>(n);
  CHECK(mean.norm() < 4.0 * std::sqrt(static_cast<double>(d)) / std::sqrt(n));
}

TEST_CASE("truncation tail bound") {
  const HclweParams p = pancake_params(4);
  const double tail = hclwe_tail_weight(p, 4 * p.k);
  CHECK(tail <= 2.0 * std::exp(-3.1415926535897932 * p.k * p.k / (2.0 * p.gamma * p.gamma)));
}

TEST_CASE("experiment with the null evaluator never fires H1") {
  // If phat is pinned to the null, the rule cannot fire: H0 accuracy 1, H1 0.
  const GaussianMixture null_mix = hclwe_null(3);
  TesterConfig cfg;
  cfg.m = 10;
  cfg.null_logdensity = [&](const Point& x) { return null_mix.logdensity(x); };
  RandomStream rng(12);
  HclweParams p = pancake_params(3);
  const GaussianMixture truth = hclwe_mixture(p);
  const TesterVerdict v =
      run_tester(cfg, cfg.null_logdensity, draw(truth, cfg.m, rng));
  CHECK(v.verdict == Hypothesis::H0);
}

TEST_CASE("end-to-end experiment smoke") {
  const HclweParams params = pancake_params(3);
  HclwePipelineConfig pipeline;
  pipeline.tau = 1e-3;
  pipeline.m_mc = 6000;
  pipeline.tester_m = 24;
  pipeline.band = 1.0;
  pipeline.T = 2.5;
  RandomStream rng(64);
  const HclweExperimentReport rep = hclwe_experiment(params, pipeline, 20, rng);
  CHECK(rep.h0_trials + rep.h1_trials == 20);
  CHECK(rep.combined_accuracy > 0.6);
  CHECK(rep.mean_abs_ratio_h1 > rep.mean_abs_ratio_h0);
  CHECK_THROWS_AS(hclwe_experiment(params, pipeline, 5, rng), std::invalid_argument);
}

}  // TEST_SUITE
